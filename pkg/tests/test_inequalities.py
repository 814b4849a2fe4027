import numpy as np
import pytest

from hardybound.cli import random_bumps
from hardybound.constants import HardyParams
from hardybound.errors import ParameterDomainError, ZeroDenominatorError
from hardybound.geometry import Annulus, l_shape, random_star_polygon, unit_disk, unit_square
from hardybound.grid import GridField, build_grid, complete_hat_nodes, distance_power_field, field_from_function
from hardybound.inequalities import (
    default_slack,
    holder_chain_check,
    holder_link,
    l1_hardy_check,
    semiconcavity_check,
    semiconcavity_sweep,
)

P0 = HardyParams(2, 3.0, 0.0)


def bump(center, radius):
    def f(x):
        q = np.sum((x - np.asarray(center)) ** 2, axis=-1) / radius**2
        return np.where(q < 1, np.exp(-1.0 / np.maximum(1.0 - q, 1e-300)), 0.0)

    return f


@pytest.fixture(scope="module")
def square128():
    return build_grid(unit_square(), ((0, 0), (1, 1)), 128)


def test_default_slack(square128):
    assert default_slack(square128) == pytest.approx(0.05)
    assert default_slack(build_grid(unit_square(), ((0, 0), (1, 1)), 256)) == pytest.approx(0.025)


def test_semiconcavity_square_strictly_positive():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 32)
    for idx in np.argwhere(complete_hat_nodes(g))[::37]:
        psi = np.zeros(g.dims)
        psi[tuple(idx)] = 1.0
        rep = semiconcavity_check(unit_square(), g, GridField(g, psi))
        assert rep.passed and rep.lhs > 0


def test_semiconcavity_zero_field():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 16)
    rep = semiconcavity_check(unit_square(), g, GridField(g, np.zeros(g.dims)))
    assert rep.lhs == 0 and rep.passed


def test_semiconcavity_rejects_negative():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 16)
    psi = np.zeros(g.dims)
    psi[5, 5] = -1
    with pytest.raises(ParameterDomainError):
        semiconcavity_check(unit_square(), g, GridField(g, psi))


def test_sweep_agrees_with_single_checks():
    L = l_shape()
    g = build_grid(L, L.bounding_box(), 32)
    sweep = semiconcavity_sweep(L, g)
    nodes = np.argwhere(complete_hat_nodes(g))
    worst = None
    for idx in nodes:
        psi = np.zeros(g.dims)
        psi[tuple(idx)] = 1.0
        r = semiconcavity_check(L, g, GridField(g, psi))
        worst = r if worst is None or r.ratio < worst.ratio else worst
    assert sweep.ratio == pytest.approx(worst.ratio, rel=1e-12)


@pytest.mark.parametrize(
    "dom",
    [unit_square(), unit_disk(), l_shape(), Annulus((0.0, 0.0), 0.3, 1.0), random_star_polygon(np.random.default_rng(2))],
    ids=["square", "disk", "l-shape", "annulus", "star"],
)
def test_semiconcavity_full_basis(dom):
    g = build_grid(dom, dom.bounding_box(), 128)
    assert semiconcavity_sweep(dom, g).passed


def test_l1_distance_field(square128):
    rep = l1_hardy_check(unit_square(), square128, 3.0, distance_power_field(square128, 1.0), 0.05)
    assert rep.passed and rep.ratio >= 0.95


def test_l1_random_bumps(square128):
    rng = np.random.default_rng(0)
    for phi in random_bumps(unit_square(), square128, rng, 20):
        assert l1_hardy_check(unit_square(), square128, 3.0, phi, 0.05).passed


def test_l1_errors(square128):
    with pytest.raises(ZeroDenominatorError):
        l1_hardy_check(unit_square(), square128, 3.0, GridField(square128, np.zeros(square128.dims)))
    with pytest.raises(ParameterDomainError):
        l1_hardy_check(unit_square(), square128, 2.0, distance_power_field(square128, 1.0))


def test_l1_ratio_resolution_cauchy():
    f = bump((0.45, 0.55), 0.3)
    ratios = []
    for res in (128, 256):
        g = build_grid(unit_square(), ((0, 0), (1, 1)), res)
        ratios.append(l1_hardy_check(unit_square(), g, 3.0, field_from_function(g, f)).ratio)
    assert abs(ratios[0] - ratios[1]) <= 0.02 * ratios[1]


def test_holder_link_exact_for_random_fields():
    g = build_grid(unit_disk(), unit_disk().bounding_box(), 32)
    rng = np.random.default_rng(4)
    for alpha in (-0.5, 0.0, 2.0):
        params = HardyParams(2, 3.0, alpha)
        for _ in range(10):
            psi = GridField(g, np.where(g.mask, rng.uniform(size=g.dims) ** 3, 0.0))
            assert holder_link(g, params, psi).ratio >= 1 - 1e-12


def test_holder_chain_bump(square128):
    psi = field_from_function(square128, bump((0.5, 0.5), 0.4))
    rep = holder_chain_check(unit_square(), square128, P0, psi)
    assert rep.passed and rep.ratio >= 0.95
    assert set(rep.links) == {"l1", "holder", "hardy"}
    assert rep.links["holder"].ratio >= 1 - 1e-12


def test_holder_chain_near_extremal(square128):
    psi = distance_power_field(square128, P0.excess / P0.p)
    rep = holder_chain_check(unit_square(), square128, P0, psi)
    assert rep.passed and rep.ratio >= 1.0


def test_holder_chain_errors(square128):
    with pytest.raises(ZeroDenominatorError):
        holder_chain_check(unit_square(), square128, P0, GridField(square128, np.zeros(square128.dims)))
    with pytest.raises(ParameterDomainError):
        holder_chain_check(unit_square(), square128, HardyParams(3, 2.0, 0.0), distance_power_field(square128, 1.0))
