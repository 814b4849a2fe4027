import numpy as np
import pytest

from hardybound.constants import HardyParams, gamma_upper, hardy_constant, supersolution_constant
from hardybound.errors import ParameterDomainError
from hardybound.geometry import PuncturedSpace, unit_disk, unit_square, uncovered_samples
from hardybound.grid import GridField, build_grid, interior_hat_nodes
from hardybound.witness import (
    default_tolerance,
    distance_power,
    evaluate,
    evaluate_many,
    hat_residual_parts,
    min_family,
    min_family_comparison_check,
    nodes_away_from,
    power,
    radial_ground_state,
    radial_power,
    radial_solution,
    step1_witness,
    verify_supersolution,
    weak_residual,
)

P0 = HardyParams(2, 3.0, 0.0)
P2 = HardyParams(2, 3.0, 2.0)


def test_evaluate_examples():
    plane = PuncturedSpace((0.0, 0.0))
    v, g = evaluate(radial_solution(P0, (0.0, 0.0)), (2.0, 0.0), plane)
    assert v == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(g, [0.5 * 2**-0.5, 0.0])
    for P in (P0, P2, HardyParams(3, 2.5, 1.0)):
        y = np.zeros(P.n)
        x = np.eye(P.n)[0]
        assert evaluate(radial_ground_state(P, y), x, PuncturedSpace(tuple(y)))[0] == pytest.approx(1.0)


def test_min_family_of_one_member():
    dom = unit_square()
    u = radial_solution(P0, (0.0, 0.5))
    pts = np.random.default_rng(0).uniform(0.05, 0.95, size=(50, 2))
    a = evaluate_many(u, pts, dom)
    b = evaluate_many(min_family([u]), pts, dom)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_distance_power_gradient():
    v, g = evaluate(distance_power(P0, 0.5), (0.25, 0.5), unit_square())
    assert v == pytest.approx(0.5)
    np.testing.assert_allclose(g, [0.5 * 0.25**-0.5, 0.0])


def test_candidate_validation():
    with pytest.raises(ValueError):
        min_family([])
    with pytest.raises(ValueError):
        min_family([radial_power(P0, (0, 0), 0.5), radial_power(P0, (1, 0), 0.7)])
    with pytest.raises(ParameterDomainError):
        power(radial_solution(P0, (0, 0)), 0.0)
    m = power(min_family([radial_solution(P0, (0, 0))]), 2 / 3)
    assert m.members[0].exponent == pytest.approx(1 / 3)


def test_min_family_comparison():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 32)
    left, right = radial_solution(P0, (-0.5, 0.5)), radial_solution(P0, (1.5, 0.5))
    assert min_family_comparison_check([left, right], g)
    assert min_family_comparison_check([left], g)
    rng = np.random.default_rng(3)
    family = [radial_solution(P0, c) for c in rng.uniform(-1, 2, size=(6, 2))]
    family = [f for f in family if not unit_square().contains(np.array([f.center]))[0]]
    assert min_family_comparison_check(family, g)
    v, _ = evaluate_many(min_family([left, right]), np.array([[0.2, 0.5], [0.8, 0.5]]), unit_square())
    np.testing.assert_allclose(v, [0.7**0.5, 0.7**0.5])


def test_weak_residual_rejects_negative_test_function():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 16)
    psi = np.zeros(g.dims)
    psi[8, 8] = -1.0
    with pytest.raises(ParameterDomainError):
        weak_residual(distance_power(P0, 0.3), 0.0, g, GridField(g, psi))


def test_weak_residual_matches_all_hat_pairing():
    g = build_grid(unit_disk(), unit_disk().bounding_box(), 32)
    cand = distance_power(P2, 0.8)
    flux, mass = hat_residual_parts(cand, g)
    idx = tuple(np.argwhere(interior_hat_nodes(g))[17])
    psi = np.zeros(g.dims)
    psi[idx] = 1.0
    r = weak_residual(cand, 0.3, g, GridField(g, psi))
    assert r == pytest.approx(flux[idx] - 0.3 * mass[idx], rel=1e-12)


def test_residual_affine_in_mu():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 32)
    cand = distance_power(P0, 0.3)
    psi = np.zeros(g.dims)
    psi[10, 12] = 1.0
    psi[11, 12] = 0.5
    psi = GridField(g, psi)
    r = [weak_residual(cand, mu, g, psi) for mu in (0.0, 0.1, 0.2)]
    assert r[0] > r[1] > r[2]
    assert r[1] - r[0] == pytest.approx(r[2] - r[1], rel=1e-10)


def test_u_y_residual_decays():
    errs = []
    for res in (64, 128, 256):
        g = build_grid(PuncturedSpace((0.0, 0.0)), ((-1, -1), (1, 1)), res)
        flux, mass = hat_residual_parts(radial_solution(P0, (0.0, 0.0)), g)
        nodes = interior_hat_nodes(g) & nodes_away_from(g, (0.0, 0.0), 0.25)
        errs.append(np.max(np.abs(flux[nodes]) / mass[nodes]))
    assert errs[0] > errs[1] > errs[2]
    assert np.log2(errs[1] / errs[2]) >= 0.8


@pytest.mark.parametrize("dom", [unit_square(), unit_disk()], ids=["square", "disk"])
@pytest.mark.parametrize("frac", [0.25, 0.5, 0.75])
def test_distance_power_supersolution(dom, frac):
    g = build_grid(dom, dom.bounding_box(), 64)
    gamma = frac * gamma_upper(P2)
    rep = verify_supersolution(distance_power(P2, gamma), supersolution_constant(P2, gamma), g)
    assert rep.passed and rep.num_tests > 0


def test_distance_power_fails_above_convex_threshold():
    # On the square d is piecewise linear, so d^gamma is a supersolution exactly up to
    # gamma^(p-1) (alpha + (1 - gamma)(p - 1)), which exceeds 1.2 * supersolution_constant;
    # 20 % above the threshold it must fail.
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 256)
    gamma = 1 / 3
    threshold = gamma**2 * (0.0 + (1 - gamma) * 2)
    cand = distance_power(P0, gamma)
    assert verify_supersolution(cand, 1.2 * supersolution_constant(P0, gamma), g).passed
    rep = verify_supersolution(cand, 1.2 * threshold, g)
    assert not rep.passed and rep.worst_normalized < -0.05


def test_ground_state_bracket():
    plane = PuncturedSpace((0.0, 0.0))
    g = build_grid(plane, ((-1, -1), (1, 1)), 128)
    far = nodes_away_from(g, (0.0, 0.0), 0.25)
    v = radial_ground_state(P2, (0.0, 0.0))
    assert verify_supersolution(v, 0.9, g, test_nodes=far).passed
    assert not verify_supersolution(v, 1.1, g, test_nodes=far).passed
    v0 = radial_ground_state(P0, (0.0, 0.0))
    assert verify_supersolution(v0, hardy_constant(P0) + 0.05, g, tolerance=0.0).min_residual < 0


def test_verify_reports_and_tolerance():
    g = build_grid(unit_square(), ((0, 0), (1, 1)), 32)
    assert default_tolerance(g) == pytest.approx(5 / 32)
    rep = verify_supersolution(distance_power(P0, 1 / 3), 1 / 27, g)
    d = rep.to_dict()
    assert d["num_tests"] == interior_hat_nodes(g).sum()
    assert d["tolerance_used"] == pytest.approx(5 / 32)
    with pytest.raises(ParameterDomainError):
        verify_supersolution(distance_power(P0, 1 / 3), 1 / 27, g, tolerance=-1.0)


def test_step1_alpha_zero_and_errors():
    D = unit_disk()
    g = build_grid(D, D.bounding_box(), 48)
    c = hardy_constant(P0)
    w = step1_witness(D, P0, 0.5 * c, g)
    assert w.mu == pytest.approx(0.5 * c)
    assert len(uncovered_samples(D, w.centers, w.eps, w.samples)) == 0
    with pytest.raises(ParameterDomainError):
        step1_witness(D, P0, c, g)
    with pytest.raises(ParameterDomainError):
        step1_witness(PuncturedSpace((0.0, 0.0)), P0, 0.5 * c, g)
