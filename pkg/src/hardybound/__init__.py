"""Numerical companion for the weighted distance Hardy inequality.

Modules: ``constants`` (closed forms), ``geometry`` (domains, distance,
coverings), ``grid`` (uniform-grid discretisation), ``rayleigh`` (discrete
quotient, minimiser, sharpness sequences), ``witness`` (explicit
supersolutions and a weak-form verifier), ``inequalities`` (discrete checks
of the auxiliary inequalities) and ``cli``.
"""

__version__ = "0.1.0"

from .constants import (  # noqa: F401
    HardyParams,
    epsilon_bound,
    hardy_constant,
    optimal_gamma,
    supersolution_constant,
)
