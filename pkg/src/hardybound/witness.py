"""Explicit positive (super)solutions and a discrete weak-form verifier.

The verifier tests the weighted p-Laplace equation

    -div(d^-alpha |grad v|^(p-2) grad v) - mu v^(p-1) / d^(alpha+p) = 0

against every nonnegative hat function of a grid.  Candidate values and
gradients are analytic at cell centres; only the test functions are
discrete.  Since hats span the cone of nonnegative grid fields, a
nonnegative residual on every hat is a nonnegative residual on the cone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .constants import (
    HardyParams,
    epsilon_bound,
    hardy_constant,
    perturbed_level,
)
from .errors import ParameterDomainError
from .geometry import Domain
from .grid import (
    Grid,
    GridField,
    cell_average,
    cell_average_adjoint,
    interior_hat_nodes,
    gradient_adjoint,
    nodal_gradient,
)

RADIAL = "radial_power"
DISTANCE = "distance_power"
MIN_FAMILY = "min_family"


@dataclass(frozen=True)
class Candidate:
    kind: str
    params: HardyParams
    exponent: float | None = None
    center: tuple | None = None
    members: tuple = ()

    def __post_init__(self):
        if self.kind not in (RADIAL, DISTANCE, MIN_FAMILY):
            raise ValueError(f"unknown candidate kind {self.kind!r}")
        if self.kind == MIN_FAMILY:
            if not self.members:
                raise ValueError("min_family needs at least one member")
            if any(m.kind != RADIAL for m in self.members):
                raise ValueError("min_family members must be radial_power candidates")
            if len({m.exponent for m in self.members}) != 1:
                raise ValueError("min_family members must share one exponent")


def radial_power(params: HardyParams, y, exponent: float) -> Candidate:
    """``|x - y| ** exponent``."""
    return Candidate(RADIAL, params, float(exponent), tuple(np.asarray(y, dtype=float).tolist()))


def radial_solution(params: HardyParams, y) -> Candidate:
    """``|x - y| ** ((alpha + p - n) / (p - 1))``: weighted p-harmonic off ``y``."""
    params.require_supercritical()
    return radial_power(params, y, params.excess / (params.p - 1))


def radial_ground_state(params: HardyParams, y) -> Candidate:
    """``|x - y| ** ((alpha + p - n) / p)``: solves the equation at ``mu = c`` off ``y``."""
    params.require_supercritical()
    return radial_power(params, y, params.excess / params.p)


def distance_power(params: HardyParams, gamma: float) -> Candidate:
    return Candidate(DISTANCE, params, float(gamma))


def min_family(members) -> Candidate:
    members = tuple(members)
    if not members:
        raise ValueError("min_family needs at least one member")
    return Candidate(MIN_FAMILY, members[0].params, members=members)


def power(candidate: Candidate, q: float) -> Candidate:
    """``candidate ** q`` for ``q > 0``, again a candidate of the same kind."""
    if not q > 0:
        raise ParameterDomainError(f"power must be positive, got {q!r}")
    if candidate.kind == MIN_FAMILY:
        return min_family(power(m, q) for m in candidate.members)
    return Candidate(candidate.kind, candidate.params, candidate.exponent * q, candidate.center)


def _evaluate_points(candidate: Candidate, pts: np.ndarray, domain: Domain):
    if candidate.kind == RADIAL:
        diff = pts - np.asarray(candidate.center)
        r = np.linalg.norm(diff, axis=1)
        b = candidate.exponent
        return r**b, (b * r ** (b - 2))[:, None] * diff
    if candidate.kind == DISTANCE:
        d = domain._distance(pts)
        proj, _ = domain._project(pts)
        unit = (pts - proj) / d[:, None]
        g = candidate.exponent
        return d**g, (g * d ** (g - 1))[:, None] * unit
    vals, grads = zip(*(_evaluate_points(m, pts, domain) for m in candidate.members))
    vals = np.stack(vals, axis=1)
    active = np.argmin(vals, axis=1)  # first index on ties
    rows = np.arange(len(pts))
    return vals[rows, active], np.stack(grads, axis=1)[rows, active]


def evaluate_many(candidate: Candidate, x, domain: Domain):
    """Values ``(m,)`` and a.e. gradients ``(m, n)`` at points of the domain."""
    pts = geometry._checked(domain, x)
    return _evaluate_points(candidate, pts, domain)


def evaluate(candidate: Candidate, x, domain: Domain):
    """Value and a.e. gradient at a single point."""
    v, g = evaluate_many(candidate, x, domain)
    return float(v[0]), g[0]


@dataclass
class ResidualReport:
    mu: float
    min_residual: float
    worst_test_index: int
    num_tests: int
    tolerance_used: float
    passed: bool
    worst_normalized: float
    worst_node: list

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "min_residual": self.min_residual,
            "worst_test_index": self.worst_test_index,
            "num_tests": self.num_tests,
            "tolerance_used": self.tolerance_used,
            "passed": self.passed,
            "worst_normalized": self.worst_normalized,
            "worst_node": list(self.worst_node),
        }


class _CellTerms:
    """Flux and mass densities of a candidate at the support-cell centres."""

    def __init__(self, candidate: Candidate, grid: Grid):
        p, alpha = candidate.params.p, candidate.params.alpha
        sel = grid.support_cells
        centers = grid.cell_centers()[sel]
        v, g = _evaluate_points(candidate, centers, grid.domain)
        if np.any(v <= 0):
            raise ParameterDomainError("candidate must be positive on the grid")
        d = grid.cell_distance[sel]
        gn = np.linalg.norm(g, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.where(gn > 0, d ** (-alpha) * gn ** (p - 2), 0.0)
        self.flux = np.zeros(grid.cell_dims + (grid.n,))
        self.flux[sel] = amp[:, None] * g * grid.cell_volume
        self.mass = np.zeros(grid.cell_dims)
        self.mass[sel] = d ** (-(alpha + p)) * v ** (p - 1) * grid.cell_volume
        self.grid = grid

    def pairing(self, psi_vals: np.ndarray):
        flux = float(np.sum(self.flux * nodal_gradient(self.grid, psi_vals)))
        mass = float(np.sum(self.mass * cell_average(self.grid, psi_vals)))
        return flux, mass

    def all_hats(self):
        """Flux and mass pairings with every hat, as nodal arrays."""
        return gradient_adjoint(self.grid, self.flux), cell_average_adjoint(self.grid, self.mass)


def _check_test_function(psi: GridField):
    if np.any(psi.values < 0):
        raise ParameterDomainError("test function must be nonnegative")


def weak_residual(candidate: Candidate, mu: float, grid: Grid, psi: GridField) -> float:
    """``int d^-alpha |grad v|^(p-2) grad v . grad psi - mu int d^-(alpha+p) v^(p-1) psi``."""
    _check_test_function(psi)
    flux, mass = _CellTerms(candidate, grid).pairing(psi.values)
    return flux - mu * mass


def hat_residual_parts(candidate: Candidate, grid: Grid):
    """Flux and mass pairings of the candidate with all hats at once (nodal arrays)."""
    return _CellTerms(candidate, grid).all_hats()


def nodes_away_from(grid: Grid, y, radius: float) -> np.ndarray:
    """Nodes whose hat support stays outside the closed ball ``B(y, radius)``.

    Near a point singularity the discretization error of a homogeneous
    candidate depends only on ``h / |x - y|``, so it never shrinks on hats
    a fixed number of cells away from ``y``; tests are taken at a fixed
    distance instead.
    """
    r = np.linalg.norm(grid.node_coords() - np.asarray(y, dtype=float), axis=-1)
    return r > radius + np.sqrt(grid.n) * grid.h


def default_tolerance(grid: Grid, constant: float = 5.0) -> float:
    return constant * grid.h


def verify_supersolution(
    candidate: Candidate,
    mu: float,
    grid: Grid,
    tolerance: float | None = None,
    test_nodes: np.ndarray | None = None,
) -> ResidualReport:
    """Check ``residual(psi) >= -tolerance * mass(psi)`` for every tested hat ``psi``.

    ``test_nodes`` restricts the hats (boolean array over nodes).  Only hats
    supported on interior cells are ever tested: a hat reaching into the
    boundary band is not compactly supported in the domain, and against the
    singular flux its pairing can diverge in the continuum.
    """
    tolerance = default_tolerance(grid) if tolerance is None else tolerance
    if tolerance < 0:
        raise ParameterDomainError(f"tolerance must be >= 0, got {tolerance!r}")
    nodes = interior_hat_nodes(grid)
    if test_nodes is not None:
        nodes = nodes & test_nodes
    flux, mass = hat_residual_parts(candidate, grid)
    res = (flux - mu * mass)[nodes]
    scale = mass[nodes]
    if res.size == 0:
        return ResidualReport(mu, 0.0, -1, 0, tolerance, True, 0.0, [])
    normalized = res / scale
    worst = int(np.argmin(normalized))
    node = grid.node_coords()[nodes][worst]
    return ResidualReport(
        mu=float(mu),
        min_residual=float(res.min()),
        worst_test_index=worst,
        num_tests=int(res.size),
        tolerance_used=float(tolerance),
        passed=bool(np.all(res >= -tolerance * scale)),
        worst_normalized=float(normalized[worst]),
        worst_node=node.tolist(),
    )


def min_family_comparison_check(family, grid: Grid) -> bool:
    """Min-family evaluation equals the brute-force pointwise minimum on the mask."""
    family = list(family)
    cand = min_family(family)
    pts = grid.node_coords()[grid.mask]
    got, _ = _evaluate_points(cand, pts, grid.domain)
    brute = np.full(len(pts), np.inf)
    for m in family:
        for i, x in enumerate(pts):
            brute[i] = min(brute[i], float(np.linalg.norm(x - np.asarray(m.center)) ** m.exponent))
    return bool(np.array_equal(got, brute) or np.allclose(got, brute, rtol=1e-14, atol=0))


@dataclass
class Step1Witness:
    candidate: Candidate  # min over the covering of radial solutions
    mu: float
    eps: float
    centers: list
    test_nodes: np.ndarray
    samples: np.ndarray

    @property
    def supersolution(self) -> Candidate:
        """The ``(p-1)/p`` power of :attr:`candidate`, the function actually verified."""
        p = self.candidate.params.p
        return power(self.candidate, (p - 1) / p)


def truncated_test_nodes(grid: Grid, eps: float) -> np.ndarray:
    """Masked nodes whose hat support (node and adjacent cell centres) has ``d > eps``."""
    cell_ok = grid.support_cells & (np.nan_to_num(grid.cell_distance, nan=-1.0) > eps)
    nodes = interior_hat_nodes(grid) & (np.nan_to_num(grid.node_distance, nan=-1.0) > eps)
    for _, sl in grid._corner_slices():
        nodes[sl] &= cell_ok
    return nodes


def _adjacent_cells(grid: Grid, nodes: np.ndarray) -> np.ndarray:
    cells = np.zeros(grid.cell_dims, dtype=bool)
    for _, sl in grid._corner_slices():
        cells |= nodes[sl]
    return cells


def step1_witness(
    domain: Domain,
    params: HardyParams,
    delta: float,
    grid: Grid,
    eps_fraction: float = 0.5,
    sample_budget: int = 1024,
) -> Step1Witness:
    """Covering-based witness on the truncated domain of a bounded domain.

    ``eps = eps_fraction * epsilon_bound(params, delta)`` (the bound itself is
    excluded, so ``0 < eps_fraction < 1``).  Centres are chosen so that every
    evaluation point of the verifier (tested nodes and the centres of their
    cells) is covered.
    """
    if not domain.bounded:
        raise ParameterDomainError(f"the construction requires a bounded domain, got {domain.kind}")
    if not (0 < eps_fraction < 1):
        raise ParameterDomainError(f"eps_fraction must lie in (0, 1), got {eps_fraction!r}")
    params.require_supercritical()
    c = hardy_constant(params)
    if not (0 < delta < c):
        raise ParameterDomainError(f"delta must lie in (0, {c}), got {delta!r}")
    eps = min(eps_fraction * epsilon_bound(params, delta), 0.5)
    mu = perturbed_level(params, delta, eps)
    nodes = truncated_test_nodes(grid, eps)
    samples = np.concatenate(
        [grid.node_coords()[nodes], grid.cell_centers()[_adjacent_cells(grid, nodes)]]
    )
    centers = geometry.build_covering(domain, eps, sample_budget, samples)
    family = min_family(radial_solution(params, b.location) for b in centers)
    return Step1Witness(family, mu, eps, centers, nodes, samples)
