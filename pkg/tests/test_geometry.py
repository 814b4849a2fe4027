import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardybound.errors import CoverageError, GeometryError, OutsideDomainError, ParameterDomainError
from hardybound.geometry import (
    Annulus,
    Ball,
    BallComplement,
    Box,
    BoxComplement,
    HalfSpace,
    Polygon,
    PuncturedSpace,
    build_covering,
    default_samples,
    distance,
    distance_gradient,
    distances,
    domain_from_config,
    in_covering_set,
    l_shape,
    project_to_boundary,
    projections,
    random_star_polygon,
    truncate,
    uncovered_samples,
    unit_disk,
    unit_square,
)

DOMAINS = [
    HalfSpace((0.0, 1.0), 0.0),
    Ball((0.0, 0.0), 1.0),
    BallComplement((0.0, 0.0), 1.0),
    Annulus((0.0, 0.0), 0.5, 1.5),
    unit_square(),
    BoxComplement((0.0, 0.0), (1.0, 1.0)),
    l_shape(),
    PuncturedSpace((0.2, -0.1)),
]


def test_distance_examples():
    assert distance(unit_disk(), (0, 0)) == 1.0
    assert distance(unit_square(), (0.3, 0.5)) == pytest.approx(0.3)
    assert distance(PuncturedSpace((1.0, 2.0)), (4.0, 6.0)) == pytest.approx(5.0)
    with pytest.raises(OutsideDomainError):
        distance(unit_square(), (1.5, 0.5))
    with pytest.raises(OutsideDomainError):
        distance(PuncturedSpace((0.0, 0.0)), (0.0, 0.0))


def test_projection_examples():
    np.testing.assert_allclose(project_to_boundary(unit_disk(), (0.5, 0.0)).location, (1.0, 0.0))
    np.testing.assert_allclose(project_to_boundary(unit_square(), (0.5, 0.5)).location, (0.0, 0.5))
    np.testing.assert_allclose(project_to_boundary(PuncturedSpace((1.0, 2.0)), (3.0, 3.0)).location, (1.0, 2.0))
    np.testing.assert_allclose(project_to_boundary(unit_disk(), (0.0, 0.0)).location, (-1.0, 0.0))


def test_l_shape_reentrant_corner():
    L = l_shape()
    x = (-0.1, -0.2)
    assert distance(L, x) == pytest.approx(np.hypot(0.1, 0.2))
    assert project_to_boundary(L, x).source.startswith("vertex")


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.kind)
def test_projection_consistent_and_lipschitz(dom):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-2, 2, size=(4000, 2))
    pts = pts[dom.contains(pts)][:800]
    d = distances(dom, pts)
    loc, _ = projections(dom, pts)
    np.testing.assert_allclose(np.linalg.norm(pts - loc, axis=1), d, rtol=0, atol=1e-12)
    i, j = rng.integers(0, len(pts), size=(2, 2000))
    assert np.all(np.abs(d[i] - d[j]) <= np.linalg.norm(pts[i] - pts[j], axis=1) + 1e-12)
    g = distance_gradient(dom, pts)
    np.testing.assert_allclose(np.linalg.norm(g, axis=1), 1.0, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_polygons_are_simple_and_consistent(seed):
    poly = random_star_polygon(np.random.default_rng(seed))
    rng = np.random.default_rng(seed + 1)
    pts = rng.uniform(-1, 1, size=(500, 2))
    pts = pts[poly.contains(pts)]
    if len(pts):
        loc, _ = projections(poly, pts)
        np.testing.assert_allclose(np.linalg.norm(pts - loc, axis=1), distances(poly, pts), atol=1e-12)


def test_polygon_validation():
    with pytest.raises(GeometryError):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # bow tie
    with pytest.raises(GeometryError):
        Ball((0.0, 0.0), -1.0)
    with pytest.raises(GeometryError):
        Annulus((0.0, 0.0), 2.0, 1.0)
    p = Polygon([0, 0, 1, 0, 1, 1, 0, 1])
    assert p.contains(np.array([[0.5, 0.5]]))[0]


def test_truncate():
    inner = truncate(unit_disk(), 0.5)
    assert inner((0.49, 0.0)) and not inner((0.51, 0.0))
    sq = truncate(unit_square(), 0.25)
    assert sq((0.5, 0.5)) and not sq((0.2, 0.5)) and not sq((0.5, 0.76))
    assert not truncate(unit_square(), 0.6)((0.5, 0.5))
    with pytest.raises(ParameterDomainError):
        truncate(unit_square(), 0.0)


def test_in_covering_set_examples():
    D = unit_disk()
    assert in_covering_set(D, (1.0, 0.0), 0.1, (0.5, 0.0))
    assert not in_covering_set(D, (-1.0, 0.0), 0.1, (0.5, 0.0))
    assert not in_covering_set(D, (1.0, 0.0), 0.1, (0.96, 0.0))


@pytest.mark.parametrize("dom", [unit_disk(), unit_square(), l_shape()], ids=lambda d: d.kind)
def test_build_covering_verified(dom):
    eps = 0.3
    samples = default_samples(dom, eps, spacing=0.02)
    centers = build_covering(dom, eps, 64, samples)
    assert len(uncovered_samples(dom, centers, eps, samples)) == 0
    if dom.kind == "box":
        assert len(centers) >= 4


def test_build_covering_errors():
    with pytest.raises(GeometryError):
        build_covering(HalfSpace((1.0, 0.0), 0.0), 0.3, 64)
    with pytest.raises(CoverageError) as info:
        build_covering(unit_disk(), 0.3, 2)
    assert len(info.value.uncovered) > 0


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: d.kind)
def test_config_round_trip(dom):
    again = domain_from_config(dom.to_config())
    assert again.to_config() == dom.to_config()
    with pytest.raises(GeometryError):
        domain_from_config({"shape": "disk"})


def test_higher_dimension_shapes():
    B = Ball((0.0, 0.0, 0.0), 2.0)
    assert distance(B, (0.5, 0.0, 0.0)) == pytest.approx(1.5)
    box = Box((0.0, 0.0, 0.0), (1.0, 2.0, 3.0))
    assert distance(box, (0.5, 1.0, 1.5)) == pytest.approx(0.5)
