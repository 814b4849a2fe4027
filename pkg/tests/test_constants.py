import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardybound.constants import (
    HardyParams,
    derived_constants,
    epsilon_bound,
    gamma_upper,
    hardy_constant,
    optimal_gamma,
    perturbed_level,
    radial_solution_constant,
    supersolution_constant,
)
from hardybound.errors import ParameterDomainError


def test_hardy_constant_examples():
    assert hardy_constant(HardyParams(2, 3.0, 0.0)) == pytest.approx(1 / 27, rel=1e-15)
    assert hardy_constant(HardyParams(2, 3.0, 2.0)) == 1.0
    assert hardy_constant(HardyParams(2, 2.0, 1.0)) == 0.25


def test_hardy_constant_rejects_subcritical():
    with pytest.raises(ParameterDomainError):
        hardy_constant(HardyParams(3, 2.0, 1.0))


@pytest.mark.parametrize("bad", [dict(n=1, p=2.0, alpha=0.0), dict(n=2, p=1.0, alpha=0.0), dict(n=2, p=3.0, alpha=math.nan)])
def test_params_validation(bad):
    with pytest.raises(ParameterDomainError):
        HardyParams(**bad)


def test_supersolution_constant_examples():
    P = HardyParams(2, 3.0, 0.0)
    assert supersolution_constant(P, 1 / 3) == pytest.approx(1 / 27, rel=1e-14)
    assert supersolution_constant(P, 0.2) == pytest.approx(0.024, rel=1e-14)
    assert supersolution_constant(P, 1e-8) < 1e-15
    for g in (0.0, gamma_upper(P), -0.1, 0.7):
        with pytest.raises(ParameterDomainError):
            supersolution_constant(P, g)


def test_optimal_gamma_examples():
    assert optimal_gamma(HardyParams(2, 3.0, 0.0)) == pytest.approx(1 / 3)
    assert optimal_gamma(HardyParams(2, 2.0, 1.0)) == 0.5


def test_epsilon_bound_examples():
    P = HardyParams(2, 3.0, 2.0)
    assert epsilon_bound(P, 0.5) == pytest.approx(min(2 ** (1 / 3) - 1, 0.25), rel=1e-15)
    assert epsilon_bound(P, 0.5) == 0.25
    P0 = HardyParams(2, 3.0, 0.0)
    c = hardy_constant(P0)
    assert epsilon_bound(P0, 0.3 * c) == pytest.approx((1 / 0.7) ** (1 / 3) - 1, rel=1e-14)
    assert epsilon_bound(P0, 1e-12) < 1e-9
    for d in (0.0, c, 2 * c):
        with pytest.raises(ParameterDomainError):
            epsilon_bound(P0, d)


def test_perturbed_level():
    P = HardyParams(2, 3.0, 2.0)
    assert perturbed_level(P, 0.5, 0.25) == pytest.approx(0.5 - 0.25 * 3 * 2 * 1 / 3)
    P0 = HardyParams(2, 3.0, 0.0)
    c = hardy_constant(P0)
    assert perturbed_level(P0, 0.5 * c, 0.1) == c - 0.5 * c


def test_derived_constants():
    dc = derived_constants(HardyParams(2, 3.0, 0.0))
    assert dc.c_p == pytest.approx(8 / 27)
    assert dc.c_p_n == pytest.approx(1 / 27)
    assert dc.k_alpha_p_n == pytest.approx(0.25)
    assert radial_solution_constant(HardyParams(2, 3.0, 2.0)) == pytest.approx(2.25)
    assert derived_constants(HardyParams(3, 2.0, 0.0)).c_alpha_p_n == 0.0


supercritical = st.tuples(
    st.integers(2, 4), st.floats(1.2, 6.0), st.floats(-1.0, 4.0)
).filter(lambda t: t[2] + t[1] - t[0] > 0.05)


@settings(max_examples=60, deadline=None)
@given(supercritical)
def test_supersolution_below_hardy_constant(t):
    P = HardyParams(*t)
    c = hardy_constant(P)
    gammas = np.linspace(0, gamma_upper(P), 2001)[1:-1]
    vals = np.array([supersolution_constant(P, g) for g in gammas])
    assert np.all(vals <= c * (1 + 1e-12))
    assert supersolution_constant(P, optimal_gamma(P)) == pytest.approx(c, rel=1e-12)


def test_hardy_constant_increasing_in_alpha():
    alphas = np.linspace(-0.9, 5, 200)
    vals = [hardy_constant(HardyParams(2, 3.0, a)) for a in alphas]
    assert np.all(np.diff(vals) > 0)


@settings(max_examples=60, deadline=None)
@given(supercritical, st.floats(0.001, 0.999))
def test_epsilon_bound_positive(t, frac):
    P = HardyParams(*t)
    assert epsilon_bound(P, frac * hardy_constant(P)) > 0
