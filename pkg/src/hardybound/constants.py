"""Closed-form constants of the weighted distance Hardy inequality.

All functions are pure and work on a validated :class:`HardyParams` triple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterDomainError


@dataclass(frozen=True)
class HardyParams:
    """Dimension ``n``, integrability exponent ``p`` and weight exponent ``alpha``."""

    n: int
    p: float
    alpha: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ParameterDomainError(f"n must be an integer >= 2, got {self.n!r}")
        if not (1.0 < self.p < math.inf):
            raise ParameterDomainError(f"p must satisfy 1 < p < inf, got {self.p!r}")
        if not math.isfinite(self.alpha):
            raise ParameterDomainError(f"alpha must be finite, got {self.alpha!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def excess(self) -> float:
        """``alpha + p - n``; positive in the supercritical regime."""
        return self.alpha + self.p - self.n

    @property
    def supercritical(self) -> bool:
        return self.excess > 0

    def require_supercritical(self) -> None:
        if not self.supercritical:
            raise ParameterDomainError(
                f"alpha + p > n required, got alpha={self.alpha}, p={self.p}, n={self.n}"
            )


@dataclass(frozen=True)
class DerivedConstants:
    c_alpha_p_n: float
    c_p: float
    c_p_n: float
    k_alpha_p_n: float


def hardy_constant(params: HardyParams) -> float:
    """Sharp weighted constant ``((alpha + p - n) / p) ** p``."""
    params.require_supercritical()
    return (params.excess / params.p) ** params.p


def classical_constant(params: HardyParams) -> float:
    """``((p - 1) / p) ** p``, the one-dimensional / convex-domain constant."""
    return ((params.p - 1.0) / params.p) ** params.p


def punctured_constant(params: HardyParams) -> float:
    """``|(p - n) / p| ** p``, the constant of the punctured space."""
    return abs((params.p - params.n) / params.p) ** params.p


def radial_solution_constant(params: HardyParams) -> float:
    """``((alpha + p - n) / (p - 1)) ** (p - 1)``."""
    params.require_supercritical()
    return (params.excess / (params.p - 1.0)) ** (params.p - 1.0)


def gamma_upper(params: HardyParams) -> float:
    """Right end of the admissible exponent interval for ``d ** gamma``."""
    params.require_supercritical()
    return params.excess / (params.p - 1.0)


def supersolution_constant(params: HardyParams, gamma: float) -> float:
    """Level at which ``d ** gamma`` is a weak supersolution.

    ``gamma ** (p-1) * (alpha - n + 1 - (gamma - 1) * (p - 1))`` for
    ``0 < gamma < (alpha + p - n) / (p - 1)``.
    """
    upper = gamma_upper(params)
    if not (0.0 < gamma < upper):
        raise ParameterDomainError(f"gamma must lie in (0, {upper}), got {gamma!r}")
    p, n, alpha = params.p, params.n, params.alpha
    return abs(gamma) ** (p - 1.0) * (alpha - n + 1.0 - (gamma - 1.0) * (p - 1.0))


def optimal_gamma(params: HardyParams) -> float:
    """Maximiser of :func:`supersolution_constant` over gamma."""
    params.require_supercritical()
    return params.excess / params.p


def epsilon_bound(params: HardyParams, delta: float) -> float:
    """Supremum of admissible covering parameters for ``mu = c - delta``.

    The second term of the minimum is +inf for ``alpha == 0``, where the
    corresponding perturbation vanishes identically.
    """
    c = hardy_constant(params)
    if not (0.0 < delta < c):
        raise ParameterDomainError(f"delta must lie in (0, {c}), got {delta!r}")
    mu = c - delta
    first = (c / mu) ** (1.0 / params.p) - 1.0
    if params.alpha == 0.0:
        second = math.inf
    else:
        second = mu * params.excess / (params.p * abs(params.alpha) * c)
    return min(first, second)


def perturbed_level(params: HardyParams, delta: float, eps: float) -> float:
    """``mu_delta - eps * p * |alpha| * c / (alpha + p - n)``, the level certified on the truncated domain."""
    c = hardy_constant(params)
    if not (0.0 < delta < c):
        raise ParameterDomainError(f"delta must lie in (0, {c}), got {delta!r}")
    if eps <= 0:
        raise ParameterDomainError(f"eps must be positive, got {eps!r}")
    return (c - delta) - eps * params.p * abs(params.alpha) * c / params.excess


def derived_constants(params: HardyParams) -> DerivedConstants:
    """All closed forms at once; the weighted ones are 0 outside the supercritical regime."""
    if params.supercritical:
        c, k = hardy_constant(params), radial_solution_constant(params)
    else:
        c, k = 0.0, 0.0
    return DerivedConstants(
        c_alpha_p_n=c,
        c_p=classical_constant(params),
        c_p_n=punctured_constant(params),
        k_alpha_p_n=k,
    )
