import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patchnoise.geometry import HolePlane, InfinitePlane, Sphere, needle, disc
from patchnoise.patchmodel import PatchModel
from patchnoise.scaling import (
    AlphaCurve,
    LogOfZeroError,
    alpha_at,
    alpha_from_function,
    default_threads,
    distance_scale,
    lambda_at,
    reference_setup,
    sweep_alpha,
)


@given(p=st.floats(0.5, 8.0), D=st.floats(1e-3, 1e3), lev=st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_power_law_exact(p, D, lev):
    assert alpha_from_function(lambda x: 3.0 * x ** -p, D, richardson=lev) == pytest.approx(p, rel=1e-9)


def test_step_validation():
    with pytest.raises(ValueError):
        alpha_from_function(lambda x: x, 1.0, h=0.0)
    with pytest.raises(ValueError):
        alpha_from_function(lambda x: x, 1.0, h=0.5)


def test_log_of_zero():
    with pytest.raises(LogOfZeroError, match="log of zero"):
        alpha_at(InfinitePlane(), "z", "IP", 1.0)


def test_reference_setup():
    assert reference_setup(Sphere(2.0), 0.5)[1] == (0.0, 0.0, 3.0)
    g, pt = reference_setup(HolePlane(), 3.0)
    assert g.d_hole == 3.0 and pt == (0.0, 0.0, 0.0)
    n = needle()
    assert reference_setup(n, 1.0)[1][2] == pytest.approx(n.a * n.xi0 + distance_scale(n))
    assert distance_scale(disc()) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        reference_setup(Sphere(), 0.0)


def test_plane_and_hole_exponents():
    assert alpha_at(InfinitePlane(), "z", "PP", 0.7) == pytest.approx(4.0, abs=1e-9)
    assert alpha_at(HolePlane(), "z", "IP", 2.0) == pytest.approx(2.0, abs=1e-9)
    assert alpha_at(HolePlane(), "z", "PP", 2.0) == pytest.approx(4.0, abs=1e-9)


@pytest.mark.parametrize("D", [1e-3, 0.1, 1.0, 10.0, 1e3])
def test_sphere_ip_identity(D):
    a = alpha_at(Sphere(), "r", "IP", D, richardson=3)
    assert a == pytest.approx(4 * D / (1 + D), abs=1e-8)


def test_sphere_limits():
    assert alpha_at(Sphere(), "r", "PP", 100.0) == pytest.approx(4.0, abs=0.05)
    # with r = 1 + D the transverse exponent approaches 6 only as 6 D / (1 + D)
    r = 101.0
    exact = 100.0 * (8 * r / (r * r - 1) - 2 * r / (1 + r * r))
    assert alpha_at(Sphere(), "theta", "PP", 100.0, richardson=3) == pytest.approx(exact, abs=1e-8)
    assert alpha_at(Sphere(), "theta", "PP", 1e4) == pytest.approx(6.0, abs=1e-3)
    assert alpha_at(Sphere(), "r", "IP", 1e-3) < 0.2
    # near the surface the sphere looks like a plane
    assert alpha_at(Sphere(), "r", "PP", 1e-4) == pytest.approx(4.0, abs=1e-2)


@pytest.mark.parametrize("h", [0.01, 0.02, 0.05, 0.1])
def test_step_robustness(h):
    ref = alpha_at(Sphere(), "r", "PP", 0.7, richardson=3)
    assert alpha_at(Sphere(), "r", "PP", 0.7, h=h, richardson=2) == pytest.approx(ref, abs=1e-7)


def test_backends_agree_on_alpha():
    a = alpha_at(Sphere(), "theta", "PP", 1.0, backend="closed")
    b = alpha_at(Sphere(), "theta", "PP", 1.0, backend="spectral")
    c = alpha_at(Sphere(), "theta", "PP", 1.0, backend="quadrature")
    assert b == pytest.approx(a, abs=1e-8)
    assert c == pytest.approx(a, abs=1e-6)


def test_lambda_at_backend_choice():
    assert lambda_at(Sphere(), "r", "PP", 1.0).backend == "closed"
    assert lambda_at(needle(), "xi", "PP", 1.0).backend == "spectral"
    assert lambda_at(InfinitePlane(), "x", "PP", 1.0, backend="quadrature").backend == "quadrature"
    with pytest.raises(ValueError):
        lambda_at(Sphere(), "r", "PP", 1.0, backend="fast")


def test_sweep_order_and_threads():
    grid = np.geomspace(0.01, 10, 7)
    patches = ["IP", "PP", "theta=0.1"]
    one = sweep_alpha(Sphere(), "r", patches, grid, threads=1)
    many = sweep_alpha(Sphere(), "r", patches, grid, threads=4)
    assert [c.patch for c in one] == patches
    for a, b in zip(one, many):
        assert np.array_equal(a.alpha, b.alpha)
        assert np.array_equal(a.lam, b.lam)
    for D, al in one[0].samples:
        assert al == pytest.approx(4 * D / (1 + D), abs=1e-3)


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        sweep_alpha(Sphere(), "r", ["PP"], [1.0, 0.5])
    with pytest.raises(ValueError):
        AlphaCurve(D=np.array([1.0, 1.0]), alpha=np.zeros(2), lam=np.zeros(2), geometry="s", mode="r",
                   patch="PP", backend="closed", h=0.05)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("PATCHNOISE_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("PATCHNOISE_THREADS", "x")
    with pytest.raises(ValueError):
        default_threads()
    monkeypatch.delenv("PATCHNOISE_THREADS")
    assert 1 <= default_threads() <= 8


def test_truncated_between_limits():
    for D in (1e-3, 0.05, 1.0, 30.0):
        ip = alpha_at(Sphere(), "r", "IP", D)
        pp = alpha_at(Sphere(), "r", "PP", D)
        tr = alpha_at(Sphere(), "r", PatchModel.truncated(theta_zeta=0.1), D)
        assert min(ip, pp) - 1e-9 <= tr <= max(ip, pp) + 1e-9
