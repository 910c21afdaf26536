import numpy as np
import pytest

from geobvp.errors import DomainError, PoleRegularityError
from geobvp.geometry import (
    GeneralRadialMetric,
    WarpedMetric,
    curvature_report,
    gauss_identity_residual,
    metric_from_config,
    volume_area,
)
from geobvp.grids import RadialGrid

from oracles import fd_scalar_curvature


def hemisphere(n=3, nodes=48):
    return WarpedMetric(n, 1, "sin", 0.0, np.pi / 2, nodes)


def unit_ball(n=3, nodes=48):
    return WarpedMetric(n, 1, "identity", 0.0, 1.0, nodes)


def flat_cylinder(n=3, nodes=48):
    return WarpedMetric(n, 0, ("const", 1.0), 0.5, 1.5, nodes)


def test_hemisphere_round():
    rep = curvature_report(hemisphere())
    assert np.max(np.abs(rep.scalar - 6.0)) < 1e-9
    assert abs(rep.H) < 1e-10  # equator is totally geodesic


def test_flat_cylinder_product():
    rep = curvature_report(flat_cylinder())
    assert np.max(np.abs(rep.scalar)) < 1e-12
    assert all(abs(b.H) < 1e-12 for b in rep.boundary)
    assert np.max(np.abs(rep.ric_rr)) < 1e-12
    assert np.max(np.abs(rep.ric_tan)) < 1e-12


def test_unit_ball_flat_with_round_boundary():
    rep = curvature_report(unit_ball())
    assert np.max(np.abs(rep.scalar)) < 1e-10
    assert abs(rep.H - 2.0) < 1e-11
    assert abs(rep.boundary[0].pi0 - 1.0) < 1e-11


def test_hyperbolic_ball_curvature():
    # geodesic ball in H^4 as the warped product over the unit 3-sphere,
    # validated against the finite-difference curvature of the
    # Minkowski-embedded hyperboloid metric
    g = WarpedMetric(4, 1, "sinh", 0.0, 1.0, 48)
    rep = curvature_report(g)
    assert np.max(np.abs(rep.scalar + 12.0)) < 1e-9
    assert abs(rep.H - 3.0 * np.cosh(1.0) / np.sinh(1.0)) < 1e-10
    oracle = fd_scalar_curvature(
        [0.6, 1.1, 1.2, 0.9],
        A_fun=lambda r: 1.0,
        B_fun=lambda r: np.sinh(r) ** 2,
        epsilon=1, n=4)
    assert abs(oracle + 12.0) < 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_random_metric_matches_fd_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    eps = int(rng.choice([-1, 0, 1]))
    r0 = float(rng.uniform(0.4, 0.8))
    r1 = r0 + float(rng.uniform(0.7, 1.3))
    grid = RadialGrid.annulus(r0, r1, 40)
    ca = rng.normal(size=3) * 0.15
    cb = rng.normal(size=3) * 0.15

    def A_fun(r):
        x = 2 * (r - r0) / (r1 - r0) - 1
        return 1.2 + ca[0] * x + ca[1] * x**2 + ca[2] * x**3

    def B_fun(r):
        x = 2 * (r - r0) / (r1 - r0) - 1
        return 1.5 + cb[0] * x + cb[1] * x**2 + cb[2] * x**3

    g = GeneralRadialMetric(n=n, epsilon=eps, grid=grid,
                            A=A_fun(grid.r), B=B_fun(grid.r))
    rep = curvature_report(g)
    base = np.array([0.0] + [1.1 + 0.1 * i for i in range(n - 1)])
    for rq in [r0 + 0.3 * (r1 - r0), r0 + 0.7 * (r1 - r0)]:
        point = base.copy()
        point[0] = rq
        oracle = fd_scalar_curvature(point, A_fun, B_fun, eps, n)
        mine = grid.interpolate(rep.scalar, rq)[0]
        assert abs(mine - oracle) / max(1.0, abs(oracle)) < 1e-6


def test_scaling_laws():
    rng = np.random.default_rng(7)
    g = hemisphere(4).general()
    rep = curvature_report(g)
    for _ in range(5):
        c = float(rng.uniform(0.5, 2.0))
        rep_c = curvature_report(g.rescaled(c * c))
        assert np.max(np.abs(rep_c.scalar - rep.scalar / c**2)) < 1e-12 * max(1, np.max(np.abs(rep.scalar)))
        assert abs(rep_c.H - rep.H / c) < 1e-12
        assert abs(rep_c.volume - rep.volume * c**4) < 1e-10 * rep.volume * c**4
        assert abs(rep_c.area - rep.area * c**3) < 1e-10 * rep.area * c**3


def test_umbilicity_is_structural():
    rep = curvature_report(WarpedMetric(5, 1, "sin", 0.0, 1.2, 40))
    b = rep.boundary[0]
    assert abs(b.H - (5 - 1) * b.pi0) < 1e-13


def test_gauss_identity_unit_ball_exact_values():
    rep = curvature_report(unit_ball())
    b = rep.boundary[0]
    assert abs(b.R_sigma - 2.0) < 1e-12
    assert gauss_identity_residual(unit_ball()) < 1e-11


def test_gauss_identity_hemisphere_and_hyperbolic_cap():
    assert gauss_identity_residual(hemisphere()) < 1e-10
    cap = WarpedMetric(3, 1, "sinh", 0.0, 1.0, 48)
    assert gauss_identity_residual(cap) < 1e-10


def test_volume_area_unit_ball():
    vol, area = volume_area(unit_ball())
    assert abs(vol - 4 * np.pi / 3) < 1e-12
    assert abs(area - 4 * np.pi) < 1e-12


def test_volume_area_hemisphere():
    vol, area = volume_area(hemisphere())
    assert abs(vol - np.pi**2) < 1e-12  # half the unit 3-sphere
    assert abs(area - 4 * np.pi) < 1e-12  # equatorial 2-sphere


def test_volume_area_flat_cylinder():
    vol, area = volume_area(flat_cylinder())
    assert abs(vol - 1.0) < 1e-14
    assert abs(area - 2.0) < 1e-14


def test_volume_even_dimension_cap():
    # n = 4 exercises the odd-parity quadrature path: int_0^1 r^3 dr
    vol, area = volume_area(unit_ball(4))
    omega3 = 2 * np.pi**2  # area of the unit 3-sphere
    assert abs(vol - omega3 / 4) < 1e-12
    assert abs(area - omega3) < 1e-12


def test_nonpositive_warp_rejected():
    with pytest.raises(DomainError):
        WarpedMetric(3, 1, "sin", 0.5, 4.0, 40)  # sin crosses zero at pi


def test_cap_regularity_enforced():
    with pytest.raises(PoleRegularityError):
        WarpedMetric(3, 1, ("cheb", [1.0, 0.5]), 0.0, 1.0, 40)


def test_metric_from_config_roundtrip():
    g = metric_from_config({
        "n": 3, "epsilon": 1, "warp": "sin",
        "domain": [0.0, np.pi / 2], "nodes": 40,
    })
    assert curvature_report(g).H == pytest.approx(0.0, abs=1e-10)
    named = metric_from_config("unit-ball")
    assert abs(curvature_report(named).H - 2.0) < 1e-10
    with pytest.raises(DomainError):
        metric_from_config({"n": 3})


def test_report_serialization():
    rep = curvature_report(unit_ball(nodes=12))
    text = rep.to_csv()
    assert text.splitlines()[0] == "r,scalar_curvature,ric_rr,ric_tan"
    assert len(text.splitlines()) == 13
    payload = rep.to_json()
    assert '"volume"' in payload
