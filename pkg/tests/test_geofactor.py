import math
import warnings

import numpy as np
import pytest

from patchnoise import geofactor
from patchnoise.geofactor import (
    EdgeSingularityError,
    LambdaResult,
    NoClosedForm,
    hole_radial_pp_finite_delta,
    lambda_closed,
    lambda_quadrature,
    lambda_spectral,
)
from patchnoise.geometry import (
    ConvergenceWarning,
    DomainError,
    HolePlane,
    InfinitePlane,
    OblateSpheroid,
    ProlateSpheroid,
    Sphere,
    disc,
    needle,
)
from patchnoise.patchmodel import PatchModel

from oracle_values import ORACLE

PI = math.pi


# closed forms ---------------------------------------------------------------

def test_plane_closed_values():
    assert lambda_closed(InfinitePlane(), "z", "PP", (0, 0, 1)).value == pytest.approx(3 / (16 * PI), rel=1e-15)
    assert lambda_closed(InfinitePlane(), "x", "PP", (0, 0, 2)).value == pytest.approx(3 / (32 * PI) / 16, rel=1e-15)
    assert 3 / (32 * PI) / 16 == pytest.approx(0.0018651, rel=1e-4)
    for k in ("z", "x"):
        assert lambda_closed(InfinitePlane(), k, "IP", (0, 0, 1.3)).value == 0.0


def test_hole_closed_values():
    g = HolePlane(2.0)
    assert lambda_closed(g, "z", "IP", (0, 0, 0)).value == pytest.approx(0.0625, rel=1e-15)
    g = HolePlane(1.0)
    v = lambda_closed(g, "s", "PP", (0, 0, 0), edge_delta=0.01).value
    assert v == pytest.approx((2 * math.log(50) - 3) / (4 * PI ** 3), rel=1e-14)
    assert v == pytest.approx(0.0389, abs=5e-5)
    with pytest.raises(EdgeSingularityError):
        lambda_closed(g, "s", "PP", (0, 0, 0))
    with pytest.raises(DomainError):
        lambda_closed(g, "z", "PP", (0, 0, 0.5))


def test_sphere_closed_values():
    g = Sphere()
    assert lambda_closed(g, "r", "PP", (0, 0, 2)).value == pytest.approx(51 / (324 * PI), rel=1e-15)
    assert lambda_closed(g, "theta", "PP", (0, 0, 2)).value == pytest.approx(15 / (324 * PI), rel=1e-15)
    assert lambda_closed(g, "r", "IP", (0, 0, 2)).value == pytest.approx(0.0625, rel=1e-15)
    assert lambda_closed(g, "theta", "IP", (0, 0, 2)).value == 0.0
    # off-axis points are fine by symmetry
    assert lambda_closed(g, "r", "PP", (2, 0, 0)).value == pytest.approx(51 / (324 * PI), rel=1e-15)


def test_sphere_scale_and_units():
    res = lambda_closed(Sphere(2.0), "r", "PP", (0, 0, 4))
    # doubling the radius at fixed r/a divides a^-4 quantities by 16
    assert res.value == pytest.approx(51 / (324 * PI) / 16, rel=1e-14)
    assert res.power == 4 and res.area_ratio == 1.0
    ip = lambda_closed(Sphere(2.0), "r", "IP", (0, 0, 4))
    assert ip.power == 2 and ip.area_ratio is None
    assert ip.value == pytest.approx(2.0 ** -4 / 4, rel=1e-14)


def test_no_closed_form():
    with pytest.raises(NoClosedForm):
        lambda_closed(ProlateSpheroid(1, 1.5), "xi", "PP", (0, 0, 2))
    with pytest.raises(NoClosedForm):
        lambda_closed(Sphere(), "r", PatchModel.parse("l0=3"), (0, 0, 2))


def test_spheroid_ip_closed_is_twice_physical():
    for g, z in [(ProlateSpheroid(1.0, 1.3), 2.0), (OblateSpheroid(1.0, 0.5), 1.0), (disc(), 0.7)]:
        c = lambda_closed(g, "xi", "IP", (0, 0, z)).value
        s = lambda_spectral(g, "xi", "IP", (0, 0, z), edge_delta=0.1).value
        assert c == pytest.approx(2 * s, rel=1e-13)
        assert lambda_closed(g, "eta", "IP", (0, 0, z)).value == 0.0


def test_area_ratio_scales_pp_only():
    pp = lambda_closed(InfinitePlane(), "z", PatchModel.point(0.25), (0, 0, 1)).value
    assert pp == pytest.approx(0.25 * 3 / (16 * PI), rel=1e-15)
    ip = lambda_closed(HolePlane(), "z", PatchModel("IP", area_ratio=0.25), (0, 0, 0)).value
    assert ip == 0.25


# quadrature -----------------------------------------------------------------

@pytest.mark.parametrize("d", [0.5, 1.0, 4.0])
def test_plane_quadrature(d):
    for k in ("z", "x"):
        q = lambda_quadrature(InfinitePlane(), k, "PP", (0, 0, d))
        assert q.value == pytest.approx(lambda_closed(InfinitePlane(), k, "PP", (0, 0, d)).value, rel=1e-10)
        assert q.converged and q.backend == "quadrature"
        assert abs(lambda_quadrature(InfinitePlane(), k, "IP", (0, 0, d)).value) < 1e-10 * d ** -2


def test_plane_mode_ratio_exact():
    for d in (0.3, 1.0, 7.0):
        z = lambda_closed(InfinitePlane(), "z", "PP", (0, 0, d)).value
        x = lambda_closed(InfinitePlane(), "x", "PP", (0, 0, d)).value
        assert z / x == 2.0


def test_hole_quadrature_z():
    g = HolePlane(1.0)
    assert lambda_quadrature(g, "z", "IP", (0, 0, 0)).value == pytest.approx(0.25, rel=1e-10)
    assert lambda_quadrature(g, "z", "PP", (0, 0, 0)).value == pytest.approx(1 / (32 * PI), rel=1e-10)


@pytest.mark.parametrize("delta", ["0.1", "0.01", "0.001"])
def test_hole_radial_pp_against_mpmath(delta):
    g = HolePlane(1.0)
    q = lambda_quadrature(g, "s", "PP", (0, 0, 0), edge_delta=float(delta)).value
    assert q == pytest.approx(ORACLE[f"HOLE_S_PP_{delta}"], rel=1e-9)
    assert hole_radial_pp_finite_delta(float(delta)) == pytest.approx(ORACLE[f"HOLE_S_PP_{delta}"], rel=1e-12)


def test_hole_radial_needs_delta():
    with pytest.raises(EdgeSingularityError):
        lambda_quadrature(HolePlane(1.0), "s", "PP", (0, 0, 0))


def test_hole_radial_log_slope():
    # d Lambda / d ln(1/delta) -> 1 / (2 pi^3) as delta -> 0
    g = HolePlane(1.0)
    a = lambda_quadrature(g, "s", "PP", (0, 0, 0), edge_delta=1e-3).value
    b = lambda_quadrature(g, "s", "PP", (0, 0, 0), edge_delta=1e-4).value
    assert (b - a) / math.log(10) == pytest.approx(1 / (2 * PI ** 3), rel=1e-2)


@pytest.mark.parametrize("r", [1.5, 2.0, 3.0, 5.0])
def test_sphere_triple_agreement(r):
    g = Sphere()
    pt = (0, 0, r)
    for k in ("r", "theta"):
        for reg in ("IP", "PP"):
            c = lambda_closed(g, k, reg, pt).value
            s = lambda_spectral(g, k, reg, pt).value
            q = lambda_quadrature(g, k, reg, pt).value
            if c == 0.0:
                assert abs(s) < 1e-14 and abs(q) < 1e-12
            else:
                assert s == pytest.approx(c, rel=1e-10)
                assert q == pytest.approx(c, rel=1e-9)
    assert lambda_quadrature(g, "r", "IP", (0, 0, 3)).value == pytest.approx(3.0 ** -4, rel=1e-7)


# spectral -------------------------------------------------------------------

def test_sphere_truncation_converges_to_pp():
    g = Sphere()
    target = 51 / (324 * PI)
    assert lambda_spectral(g, "r", PatchModel.truncated(l0=60), (0, 0, 2)).value == pytest.approx(target, rel=1e-8)
    vals = [lambda_spectral(g, "r", PatchModel.truncated(l0=l0), (0, 0, 1.5)).value for l0 in (1, 2, 5, 10, 40)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < lambda_closed(g, "r", "PP", (0, 0, 1.5)).value


def test_sphere_distance_limit():
    g = Sphere()
    for r in (30.0, 100.0, 1000.0):
        v = lambda_closed(g, "r", "PP", (0, 0, r)).value * (r * r - 1) ** 4
        assert v / (r ** 4 / (4 * PI)) == pytest.approx(1.0, abs=10 / r ** 2)


def test_sphere_pp_series_warns_when_short():
    with pytest.warns(ConvergenceWarning):
        res = lambda_spectral(Sphere(), "r", "PP", (0, 0, 1.01), lmax=50)
    assert not res.converged


@pytest.mark.parametrize("mode", ["xi", "eta"])
def test_prolate_pp_against_mpmath(mode):
    g = ProlateSpheroid(1.0, 1.5)
    pt = (0, 0, 2.5)
    ref = ORACLE[f"PROLATE_PP_{mode}_1.5_2.5"]
    s = lambda_spectral(g, mode, "PP", pt)
    assert s.value == pytest.approx(ref, rel=1e-10)
    assert s.converged and s.lmax >= 1
    q = lambda_quadrature(g, mode, "PP", pt)
    assert q.value == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("xi0,d", [(1.01, 0.05), (1.2, 0.3), (3.0, 1.0)])
def test_prolate_spectral_vs_quadrature(xi0, d):
    g = ProlateSpheroid(1.0, xi0)
    pt = (0, 0, xi0 + d)
    for mode in ("xi", "eta"):
        s = lambda_spectral(g, mode, "PP", pt).value
        q = lambda_quadrature(g, mode, "PP", pt).value
        assert s == pytest.approx(q, rel=1e-8)
    s = lambda_spectral(g, "xi", "IP", pt).value
    q = lambda_quadrature(g, "xi", "IP", pt).value
    assert s == pytest.approx(q, rel=1e-8)


@pytest.mark.parametrize("g,z,delta", [(OblateSpheroid(1.0, 0.3), 0.8, None), (disc(), 0.5, 0.1), (disc(), 2.0, 0.05)])
def test_oblate_spectral_vs_quadrature(g, z, delta):
    for mode in ("xi", "eta"):
        s = lambda_spectral(g, mode, "PP", (0, 0, z), edge_delta=delta).value
        q = lambda_quadrature(g, mode, "PP", (0, 0, z), edge_delta=delta).value
        assert s == pytest.approx(q, rel=1e-8)


def test_disc_needs_edge_delta():
    with pytest.raises(EdgeSingularityError):
        lambda_spectral(disc(), "xi", "PP", (0, 0, 1.0))


@pytest.mark.parametrize("mode,smode", [("xi", "r"), ("eta", "theta")])
def test_near_sphere_prolate_matches_sphere(mode, smode):
    xi0 = 1e3
    g = ProlateSpheroid(1.0, xi0)
    s = Sphere(xi0)
    for z in (1.2e3, 2e3, 1e4):
        v = lambda_spectral(g, mode, "PP", (0, 0, z)).value
        ref = lambda_spectral(s, smode, "PP", (0, 0, z)).value
        assert v == pytest.approx(ref, rel=1e-4)


def test_truncated_spheroid_selection_and_monotonicity():
    g = needle()
    pt = (0, 0, g.xi0 + 0.05)
    vals = [lambda_spectral(g, "xi", PatchModel.truncated(l0=l0), pt).value for l0 in (0, 2, 5, 20, 80)]
    assert all(v > 0 for v in vals)
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= lambda_spectral(g, "xi", "PP", pt).value * (1 + 1e-10)
    # the eta mode starts at l0 = 1
    assert lambda_spectral(g, "eta", PatchModel.truncated(l0=0), pt).value == 0.0
    assert lambda_spectral(g, "eta", PatchModel.truncated(l0=1), pt).value > 0


def test_spheroid_off_axis_rejected():
    with pytest.raises(DomainError):
        lambda_spectral(ProlateSpheroid(1.0, 1.5), "xi", "PP", (0.1, 0, 2))


def test_spectral_rejects_planes():
    with pytest.raises(NoClosedForm):
        lambda_spectral(InfinitePlane(), "z", "PP", (0, 0, 1))


def test_nonnegative_everywhere():
    cases = [(InfinitePlane(), "x", (0, 0, 0.4)), (Sphere(), "theta", (0, 0, 1.3)),
             (ProlateSpheroid(1, 1.1), "eta", (0, 0, 1.3)), (disc(), "eta", (0, 0, 0.3))]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        for g, k, pt in cases:
            for reg in ("IP", "PP"):
                assert lambda_quadrature(g, k, reg, pt, edge_delta=0.1).value >= 0


# results --------------------------------------------------------------------

def test_lambda_result_resolve():
    res = lambda_closed(InfinitePlane(), "z", PatchModel.point(2.0), (0, 0, 1.0))
    assert res.units == "A/N*length^-4"
    si = res.resolve(1e-4)
    assert si.value == pytest.approx(res.value * 1e16, rel=1e-15)
    assert si.units == "A/N*m^-4"
    with pytest.raises(ValueError):
        si.resolve(1.0)
    with pytest.raises(ValueError):
        res.resolve(0.0)
    assert isinstance(si, LambdaResult)


def test_validate_constant_is_live():
    # the closed-form constants are read at call time so that validation is sensitive to them
    old = geofactor.PLANE_PP_Z
    try:
        geofactor.PLANE_PP_Z = old * 1.01
        assert lambda_closed(InfinitePlane(), "z", "PP", (0, 0, 1)).value == pytest.approx(old * 1.01)
    finally:
        geofactor.PLANE_PP_Z = old
    assert np.isclose(lambda_closed(InfinitePlane(), "z", "PP", (0, 0, 1)).value, 3 / (16 * PI))


@pytest.mark.parametrize("g,k,D", [(Sphere(), "r", 10.0), (Sphere(), "theta", 10.0), (ProlateSpheroid(1.0, 1.5), "xi", 10.0),
                                   (disc(), "xi", 10.0), (disc(), "eta", 10.0), (needle(), "xi", 1000.0),
                                   (needle(), "eta", 1000.0)])
def test_truncation_increments_shrink_far_away(g, k, D):
    from patchnoise.scaling import reference_setup

    gg, pt = reference_setup(g, D)
    vals = [lambda_spectral(gg, k, PatchModel.truncated(l0=l0), pt, edge_delta=0.1).value for l0 in range(1, 30)]
    inc = np.abs(np.diff(vals))
    inc = inc[inc > 1e-13 * vals[-1]]
    assert len(inc) >= 3
    assert np.all(np.diff(inc) < 0)
