"""Discrete weighted Rayleigh quotient, its minimisation, and sharpness sequences.

For a grid field ``phi`` the quotient is ``N / D`` with

    N = sum_cells d^-alpha |grad phi|^p h^n     (support cells)
    D = sum_cells d^-(alpha+p) |phi_c|^p h^n    (see ``mass_cells``)

where ``phi_c`` is the cell-centre value of the n-linear interpolant.  The
energy runs over every cell the interpolant lives on, so the drop to the
zero boundary band is paid for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import integrate
from scipy.optimize import brentq

from .constants import HardyParams, hardy_constant
from .errors import NumericalError, ParameterDomainError, ZeroDenominatorError
from .geometry import PuncturedSpace
from .grid import (
    Grid,
    GridField,
    average_matrix,
    build_grid,
    cell_average,
    cell_average_adjoint,
    cell_weights,
    distance_power_field,
    gradient_adjoint,
    gradient_matrix,
    mass_cell_set,
    nodal_gradient,
)

NUMERATOR_CELLS = "support"
_GRAD_FLOOR = 1e-14


@dataclass(frozen=True)
class QuotientValue:
    numerator: float
    denominator: float
    value: float


@dataclass
class MinimizeReport:
    best_value: float
    iterations: int
    trace: list
    converged: bool
    field: GridField | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": [[int(i), float(v)] for i, v in self.trace],
        }


@dataclass(frozen=True)
class SharpnessRow:
    k: int
    quotient: QuotientValue
    oracle: float

    @property
    def relative_gap(self) -> float:
        return abs(self.quotient.value - self.oracle) / self.oracle


class _Weights:
    """Cell weights for one (params, grid) pair, reused across evaluations."""

    def __init__(self, params: HardyParams, grid: Grid):
        self.p = params.p
        self.grid = grid
        self.num = cell_weights(grid, params.alpha, NUMERATOR_CELLS)
        self.den = cell_weights(grid, params.alpha + params.p, mass_cells(params))


def mass_cells(params: HardyParams) -> str:
    """Cell set for the mass integral: full support for ``alpha < 1``, interior otherwise."""
    return mass_cell_set(params.alpha + params.p, params.p)


def _parts(w: _Weights, vals: np.ndarray):
    grid, p = w.grid, w.p
    g = nodal_gradient(grid, vals)
    gnorm = np.sqrt(np.sum(g * g, axis=-1))
    avg = cell_average(grid, vals)
    num = float(np.sum(w.num * gnorm**p))
    den = float(np.sum(w.den * np.abs(avg) ** p))
    return g, gnorm, avg, num, den


def _evaluate(w: _Weights, vals: np.ndarray, with_gradient: bool):
    g, gnorm, avg, num, den = _parts(w, vals)
    if not den > 0:
        raise ZeroDenominatorError("field vanishes on every interior cell; quotient undefined")
    q = QuotientValue(num, den, num / den)
    if not math.isfinite(q.value):
        raise NumericalError(f"non-finite quotient (numerator={num}, denominator={den})")
    if not with_gradient:
        return q, None
    p, grid = w.p, w.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(gnorm > _GRAD_FLOOR, p * w.num * gnorm ** (p - 2), 0.0)
        dcoef = np.where(avg != 0, p * w.den * np.abs(avg) ** (p - 2) * avg, 0.0)
    dnum = gradient_adjoint(grid, coef[..., None] * g)
    dden = cell_average_adjoint(grid, dcoef)
    grad = (dnum - q.value * dden) / den
    grad[~grid.mask] = 0.0
    return q, grad


def quotient(params: HardyParams, grid: Grid, phi: GridField) -> QuotientValue:
    """Weighted Rayleigh quotient of a grid field."""
    return _evaluate(_Weights(params, grid), phi.values, False)[0]


def quotient_gradient(params: HardyParams, grid: Grid, phi: GridField):
    """Quotient and its exact derivative with respect to the masked nodal values."""
    return _evaluate(_Weights(params, grid), phi.values, True)


def default_init(params: HardyParams, grid: Grid) -> GridField:
    """``d ** ((alpha + p - n) / p)`` on the mask (``d ** ((p - 1) / p)`` if not supercritical)."""
    beta = params.excess / params.p if params.supercritical else (params.p - 1) / params.p
    return distance_power_field(grid, beta)


def random_init(grid: Grid, seed: int) -> GridField:
    rng = np.random.default_rng(seed)
    vals = np.where(grid.mask, rng.uniform(0.0, 1.0, grid.dims), 0.0)
    return GridField(grid, vals)


class _Preconditioner:
    """Frozen-coefficient energy operator ``G^T diag(w |g|^(p-2)) G`` on the masked nodes.

    Applying its inverse to the quotient gradient turns a unit step into one
    sweep of the nonlinear inverse power method.
    """

    def __init__(self, w: _Weights):
        grid = w.grid
        self.w = w
        self.free = np.flatnonzero(grid.mask.ravel())
        self.G = gradient_matrix(grid)[:, self.free].tocsc()
        self.A = average_matrix(grid)[:, self.free].tocsc()
        self.n = grid.n

    def solve(self, vals, grad):
        w, p = self.w, self.w.p
        g, gnorm, avg, _, den = _parts(w, vals)
        active = w.num > 0
        gref = np.max(gnorm[active]) if active.any() else 1.0
        # frozen |g|^(p-2), clipped so the operator stays definite for both p > 2 and p < 2
        glim = np.clip(gnorm, 1e-3 * gref, None)
        cw = w.num * glim ** (p - 2)
        K = self.G.T @ sp.diags(np.repeat(cw.ravel(), self.n)) @ self.G
        aref = np.max(np.abs(avg)[w.den > 0])
        alim = np.clip(np.abs(avg), 1e-3 * aref, None)
        M = self.A.T @ sp.diags((w.den * alim ** (p - 2)).ravel()) @ self.A
        shift = 1e-8 * K.diagonal().max()
        op = (K + shift * sp.identity(K.shape[0]) + 1e-12 * M).tocsc()
        rhs = grad.ravel()[self.free]
        sol = spla.spsolve(op, rhs)
        out = np.zeros(w.grid.dims)
        out.ravel()[self.free] = sol * den / p
        return out


def _normalise(w: _Weights, vals):
    _, _, _, _, den = _parts(w, vals)
    if not den > 0:
        raise ZeroDenominatorError("field vanishes on every interior cell; quotient undefined")
    return vals / den ** (1.0 / w.p)


def minimize(
    params: HardyParams,
    grid: Grid,
    init: GridField | None = None,
    step: float = 1.0,
    max_iter: int = 200,
    rel_tol: float = 1e-6,
    preconditioner: str = "energy",
) -> MinimizeReport:
    """Normalised, preconditioned gradient descent on the discrete quotient.

    Each iteration moves against the (preconditioned) gradient, rescales to
    unit denominator, and accepts the move only if the quotient does not
    increase; a rejected move halves the step, an accepted one doubles it
    (capped at the initial step).  Stops when an accepted step improves the
    quotient by less than ``rel_tol`` relatively, or when the step underflows.
    """
    if not step > 0:
        raise ParameterDomainError(f"step must be positive, got {step!r}")
    if preconditioner not in ("energy", "none"):
        raise ParameterDomainError(f"unknown preconditioner {preconditioner!r}")
    w = _Weights(params, grid)
    vals = (default_init(params, grid) if init is None else init).values
    vals = _normalise(w, vals)
    q, grad = _evaluate(w, vals, True)
    trace = [(0, q.value)]
    pre = _Preconditioner(w) if preconditioner == "energy" else None
    t = step
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        direction = -(pre.solve(vals, grad) if pre is not None else grad)
        accepted = False
        while t > 1e-12 * step:
            cand = vals + t * direction
            try:
                cand = _normalise(w, cand)
                qc, gc = _evaluate(w, cand, True)
            except (ZeroDenominatorError, NumericalError):
                t *= 0.5
                continue
            if qc.value <= q.value:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            converged = True
            it -= 1
            break
        improvement = (q.value - qc.value) / q.value
        vals, q, grad = cand, qc, gc
        trace.append((it, q.value))
        t = min(2 * t, step)
        if improvement < rel_tol:
            converged = True
            break
    return MinimizeReport(q.value, it, trace, converged, GridField(grid, vals))


# -- p = 2 cross-check ------------------------------------------------------------


def inverse_iteration(params: HardyParams, grid: Grid, init: GridField | None = None, max_iter: int = 200, rel_tol: float = 1e-10) -> float:
    """Smallest generalised eigenvalue of the p = 2 quotient by inverse iteration."""
    if params.p != 2:
        raise ParameterDomainError("inverse iteration applies to p = 2 only")
    w = _Weights(params, grid)
    free = np.flatnonzero(grid.mask.ravel())
    G = gradient_matrix(grid)[:, free]
    A = average_matrix(grid)[:, free]
    K = (G.T @ sp.diags(np.repeat(w.num.ravel(), grid.n)) @ G).tocsc()
    M = (A.T @ sp.diags(w.den.ravel()) @ A).tocsc()
    solve = spla.factorized(K)
    x = (default_init(params, grid) if init is None else init).values.ravel()[free]
    lam = np.inf
    for _ in range(max_iter):
        y = solve(M @ x)
        y /= math.sqrt(y @ (M @ y))
        new = (y @ (K @ y)) / (y @ (M @ y))
        x = y
        if abs(lam - new) <= rel_tol * new:
            lam = new
            break
        lam = new
    return float(lam)


# -- sharpness sequences ------------------------------------------------------------


def log_cutoff(r, rho: float, k: float):
    """Cutoff equal to 1 on most of ``[rho e^-k, rho]`` and 0 outside.

    Rises linearly in ``log r`` over the first unit of logarithmic length
    above ``rho e^-k`` and falls linearly in ``r`` over ``[rho / 2, rho]``.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        inner = np.clip(np.log(r / (rho * math.exp(-k))), 0.0, 1.0)
    outer = np.clip(2.0 - 2.0 * r / rho, 0.0, 1.0)
    return np.minimum(inner, outer)


def _log_cutoff_derivative(r, rho, k):
    r = np.asarray(r, dtype=float)
    t = np.log(r / (rho * math.exp(-k)))
    inner = np.clip(t, 0.0, 1.0)
    outer = np.clip(2.0 - 2.0 * r / rho, 0.0, 1.0)
    d_inner = np.where((t > 0) & (t < 1), 1.0 / r, 0.0)
    d_outer = np.where((r > rho / 2) & (r < rho), -2.0 / rho, 0.0)
    return np.where(inner <= outer, d_inner, d_outer)


def radial_oracle(params: HardyParams, rho: float, k: float) -> float:
    """Continuum quotient of ``log_cutoff(r) * r**beta`` by 1D quadrature in ``r``.

    The angular measure cancels, leaving
    ``int |phi'|^p r^(n-1-alpha) dr / int |phi|^p r^(n-1-alpha-p) dr``.
    """
    n, p, alpha = params.n, params.p, params.alpha
    beta = params.excess / p
    r0 = rho * math.exp(-k)
    breaks = sorted({r0, min(r0 * math.e, rho), rho / 2, rho})
    # the two ramps cross when k is small; add the crossing so each piece is smooth
    if r0 * math.e > rho / 2:
        f = lambda r: math.log(r / r0) - (2 - 2 * r / rho)
        lo, hi = max(r0, rho / 2), min(r0 * math.e, rho)
        if f(lo) < 0 < f(hi):
            breaks = sorted(set(breaks) | {brentq(f, lo, hi, xtol=1e-15)})
    breaks = [b for b in breaks if r0 <= b <= rho]

    def phi(r):
        return float(log_cutoff(r, rho, k)) * r**beta

    def dphi(r):
        eta = float(log_cutoff(r, rho, k))
        return float(_log_cutoff_derivative(r, rho, k)) * r**beta + eta * beta * r ** (beta - 1)

    num = den = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        num += integrate.quad(lambda r: abs(dphi(r)) ** p * r ** (n - 1 - alpha), a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
        den += integrate.quad(lambda r: abs(phi(r)) ** p * r ** (n - 1 - alpha - p), a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
    return num / den


def sharpness_sequence(
    params: HardyParams, y, rho_outer: float, k_max: int, resolution: int, band: float = 1.0, k_min: int = 1
) -> list[SharpnessRow]:
    """Quotients of ``log_cutoff(|x - y|) |x - y|**beta`` on the punctured space, k = k_min..k_max.

    The grid covers the cube of half-width ``rho_outer`` about the puncture.
    Each row carries the grid quotient and the 1D radial oracle value.
    """
    params.require_supercritical()
    if k_max < 2:
        raise ParameterDomainError(f"k_max must be >= 2, got {k_max!r}")
    if not rho_outer > 0:
        raise ParameterDomainError(f"rho_outer must be positive, got {rho_outer!r}")
    y = np.asarray(y, dtype=float)
    if y.shape != (params.n,):
        raise ParameterDomainError(f"puncture must have dimension {params.n}")
    domain = PuncturedSpace(tuple(y))
    grid = build_grid(domain, (y - rho_outer, y + rho_outer), resolution, band)
    w = _Weights(params, grid)
    beta = params.excess / params.p
    r = grid.node_distance
    rows = []
    for k in range(k_min, k_max + 1):
        vals = np.zeros(grid.dims)
        m = grid.mask
        vals[m] = log_cutoff(r[m], rho_outer, k) * r[m] ** beta
        q, _ = _evaluate(w, vals, False)
        rows.append(SharpnessRow(k, q, radial_oracle(params, rho_outer, k)))
    return rows


def lower_bound_slack(params: HardyParams, value: float) -> float:
    """``value / c - 1``: negative when a discrete value undercuts the sharp constant."""
    return value / hardy_constant(params) - 1.0
