"""Discrete checks of the semiconcavity, L^1-Hardy and Hoelder-chain inequalities.

All sums are midpoint rules over grid cells, with gradients taken from the
n-linear interpolant (see :mod:`hardybound.grid`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import HardyParams, hardy_constant
from .errors import ParameterDomainError, ZeroDenominatorError
from .geometry import Domain
from .grid import (
    Grid,
    GridField,
    cell_average,
    cell_average_adjoint,
    complete_hat_nodes,
    gradient_adjoint,
    mass_cell_set,
    nodal_gradient,
)

HOLDER_SLACK = 1e-12


@dataclass
class RatioReport:
    lhs: float
    rhs: float
    ratio: float
    passed: bool
    slack_used: float
    links: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "passed": self.passed,
            "slack_used": self.slack_used,
        }
        if self.links:
            out["links"] = {k: v.to_dict() for k, v in self.links.items()}
        return out


def default_slack(grid: Grid) -> float:
    """0.05 at 128 cells across the bounding box, halving with each refinement."""
    res = grid.cell_dims[0]
    return 0.05 * 128.0 / res


def _ratio_report(lhs: float, rhs: float, slack: float) -> RatioReport:
    ratio = lhs / rhs
    return RatioReport(float(lhs), float(rhs), float(ratio), bool(ratio >= 1.0 - slack), float(slack))


def _slack(grid: Grid, slack):
    slack = default_slack(grid) if slack is None else float(slack)
    if slack < 0:
        raise ParameterDomainError(f"slack must be >= 0, got {slack!r}")
    return slack


def _nonnegative(psi: GridField, what: str = "test function"):
    if np.any(psi.values < 0):
        raise ParameterDomainError(f"{what} must be nonnegative")


def _distance_terms(domain: Domain, grid: Grid):
    """``grad d * h^n`` and ``h^n / d`` at support-cell centres (zero elsewhere)."""
    sel = grid.support_cells
    pts = grid.cell_centers()[sel]
    proj, _ = domain._project(pts)
    d = grid.cell_distance[sel]
    flux = np.zeros(grid.cell_dims + (grid.n,))
    flux[sel] = (pts - proj) / d[:, None] * grid.cell_volume
    inv = np.zeros(grid.cell_dims)
    inv[sel] = grid.cell_volume / d
    return flux, inv


def semiconcavity_check(domain: Domain, grid: Grid, psi: GridField, slack: float | None = None) -> RatioReport:
    """``sum grad psi . grad d + (n - 1) sum psi / d >= -slack * sum psi / d``.

    ``lhs`` is the left-hand side, ``rhs`` the scale ``sum psi / d``; the
    ratio is reported as ``1 + lhs / rhs`` (1 for ``psi == 0``) so that the
    pass rule reads ``ratio >= 1 - slack`` like the other reports.
    """
    _nonnegative(psi)
    slack = _slack(grid, slack)
    flux, inv = _distance_terms(domain, grid)
    a = float(np.sum(flux * nodal_gradient(grid, psi.values)))
    b = float(np.sum(inv * cell_average(grid, psi.values)))
    lhs = a + (grid.n - 1) * b
    ratio = 1.0 + lhs / b if b > 0 else 1.0
    return RatioReport(lhs, b, ratio, bool(lhs >= -slack * b), slack)


def semiconcavity_sweep(domain: Domain, grid: Grid, slack: float | None = None, nodes: np.ndarray | None = None) -> RatioReport:
    """:func:`semiconcavity_check` over every hat at once; reports the worst hat."""
    slack = _slack(grid, slack)
    nodes = complete_hat_nodes(grid) if nodes is None else nodes
    flux, inv = _distance_terms(domain, grid)
    a = gradient_adjoint(grid, flux)[nodes]
    b = cell_average_adjoint(grid, inv)[nodes]
    if a.size == 0:
        raise ParameterDomainError("no hats to test")
    lhs = a + (grid.n - 1) * b
    rel = lhs / b
    worst = int(np.argmin(rel))
    return RatioReport(float(lhs[worst]), float(b[worst]), float(1.0 + rel[worst]), bool(np.all(lhs >= -slack * b)), slack)


def _l1_sides(grid: Grid, s: float, vals: np.ndarray):
    g = nodal_gradient(grid, vals)
    gnorm = np.sqrt(np.sum(g * g, axis=-1))
    sel = grid.support_cells
    d = grid.cell_distance
    num = float(np.sum(gnorm[sel] * d[sel] ** (1.0 - s)) * grid.cell_volume)
    msel = grid.cells(mass_cell_set(s, 1.0))
    avg = np.abs(cell_average(grid, vals))
    den = float(np.sum(avg[msel] * d[msel] ** (-s)) * grid.cell_volume)
    return num, den


def l1_hardy_check(domain: Domain, grid: Grid, s: float, phi: GridField, slack: float | None = None) -> RatioReport:
    """``sum |grad phi| / d^(s-1)  >=  (s - n) sum |phi| / d^s`` on the grid."""
    n = grid.n
    if not s > n:
        raise ParameterDomainError(f"need s > n, got s={s!r}, n={n}")
    slack = _slack(grid, slack)
    num, den = _l1_sides(grid, s, phi.values)
    if not den > 0:
        raise ZeroDenominatorError("phi vanishes on the integration cells")
    return _ratio_report(num, (s - n) * den, slack)


def holder_link(grid: Grid, params: HardyParams, psi: GridField) -> RatioReport:
    """Finite-sum Hoelder split with ``s = alpha + p`` on the support cells.

    ``lhs = (sum psi^p / d^s)^(1-1/p) (sum |grad psi|^p / d^(s-p))^(1/p)``,
    ``rhs = sum psi^(p-1) |grad psi| / d^(s-1)``; exact in the discrete setting.
    """
    p, s = params.p, params.alpha + params.p
    sel = grid.support_cells
    d = grid.cell_distance[sel]
    a = np.abs(cell_average(grid, psi.values))[sel]
    g = nodal_gradient(grid, psi.values)[sel]
    b = np.sqrt(np.sum(g * g, axis=-1))
    vol = grid.cell_volume
    mass = np.sum(a**p * d ** (-s)) * vol
    energy = np.sum(b**p * d ** (p - s)) * vol
    cross = np.sum(a ** (p - 1) * b * d ** (1.0 - s)) * vol
    lhs = mass ** (1.0 - 1.0 / p) * energy ** (1.0 / p)
    if not cross > 0:
        raise ZeroDenominatorError("psi has no gradient on its support")
    return _ratio_report(lhs, cross, HOLDER_SLACK)


def _hardy_ratio(grid: Grid, params: HardyParams, psi: GridField, slack: float) -> RatioReport:
    p, alpha = params.p, params.alpha
    g = nodal_gradient(grid, psi.values)
    gnorm = np.sqrt(np.sum(g * g, axis=-1))
    d = grid.cell_distance
    sel = grid.support_cells
    num = float(np.sum(gnorm[sel] ** p * d[sel] ** (-alpha)) * grid.cell_volume)
    msel = grid.cells(mass_cell_set(alpha + p, p))
    avg = np.abs(cell_average(grid, psi.values))
    den = float(np.sum(avg[msel] ** p * d[msel] ** (-(alpha + p))) * grid.cell_volume)
    if not den > 0:
        raise ZeroDenominatorError("psi vanishes on the integration cells")
    return _ratio_report(num, hardy_constant(params) * den, slack)


def holder_chain_check(
    domain: Domain, grid: Grid, params: HardyParams, psi: GridField, slack: float | None = None
) -> RatioReport:
    """Weighted Hardy inequality derived from the L^1 inequality through Hoelder.

    Links, all with ``s = alpha + p``:

    * ``l1``: :func:`l1_hardy_check` on ``phi = psi^p``;
    * ``holder``: :func:`holder_link` (slack ``1e-12``);
    * ``hardy``: ``sum |grad psi|^p / d^alpha >= c sum psi^p / d^(alpha+p)``.

    The returned report is the end-to-end ``hardy`` ratio; it passes iff every
    link passes.
    """
    params.require_supercritical()
    _nonnegative(psi, "psi")
    if not np.any(psi.values > 0):
        raise ZeroDenominatorError("psi vanishes identically")
    slack = _slack(grid, slack)
    phi = GridField(grid, psi.values**params.p)
    links = {
        "l1": l1_hardy_check(domain, grid, params.alpha + params.p, phi, slack),
        "holder": holder_link(grid, params, psi),
        "hardy": _hardy_ratio(grid, params, psi, slack),
    }
    end = links["hardy"]
    return RatioReport(end.lhs, end.rhs, end.ratio, all(r.passed for r in links.values()), slack, links)
