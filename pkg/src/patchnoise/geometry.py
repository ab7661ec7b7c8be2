"""Electrode geometries, field/source points and surface Green's functions.

The surface Green's function ``G_sigma(r, r')`` maps a potential prescribed
at ``r'`` on the electrode to the potential at ``r``.  Closed forms are used
for the infinite plane, the plane with a circular hole and the sphere; the
prolate and oblate spheroids use their separable eigenfunction series.

Gradients are physical components in an orthonormal frame at the field point.
On the symmetry axis the transverse labels (``x``, ``s``, ``theta``, ``eta``)
all refer to the cartesian ``x`` direction, so their squares, and hence every
geometric factor, agree across coordinate systems.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import specfun

__all__ = [
    "DomainError",
    "ProximityError",
    "ConvergenceWarning",
    "FieldMode",
    "field_mode",
    "Geometry",
    "InfinitePlane",
    "HolePlane",
    "Sphere",
    "ProlateSpheroid",
    "OblateSpheroid",
    "needle",
    "disc",
    "FieldPoint",
    "SourcePoint",
    "SeriesInfo",
    "to_cartesian",
    "from_cartesian",
    "axis_point",
    "surface_green",
    "grad_surface_green",
    "hole_green",
    "PROXIMITY_FLOOR",
    "DEFAULT_LMAX",
    "DEFAULT_RTOL",
]

# Relative (to the geometry scale) distance below which G_sigma is refused.
PROXIMITY_FLOOR = 1e-9
DEFAULT_LMAX = 256
DEFAULT_RTOL = 1e-8

_COMPLEX_STEP = 1e-30


class DomainError(ValueError):
    """Point outside the region where a function is defined."""


class ProximityError(DomainError):
    """Field and source points closer than the proximity floor."""


class ConvergenceWarning(RuntimeWarning):
    """A truncated series or quadrature missed its tolerance."""


# ---------------------------------------------------------------------------
# Modes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldMode:
    """Field component probed by the ion motion."""

    label: str
    classification: str  # "normal" or "transverse"

    def __str__(self):
        return self.label


_MODES = {
    "z": FieldMode("z", "normal"),
    "x": FieldMode("x", "transverse"),
    "s": FieldMode("s", "transverse"),
    "r": FieldMode("r", "normal"),
    "theta": FieldMode("theta", "transverse"),
    "xi": FieldMode("xi", "normal"),
    "eta": FieldMode("eta", "transverse"),
}
_ALIASES = {"θ": "theta", "ξ": "xi", "η": "eta", "y": "x"}


def field_mode(label) -> FieldMode:
    """Parse a mode label, accepting Greek letters for theta/xi/eta."""
    if isinstance(label, FieldMode):
        return label
    key = _ALIASES.get(str(label), str(label)).lower()
    try:
        return _MODES[key]
    except KeyError:
        raise ValueError(f"unknown field mode {label!r}") from None


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldPoint:
    """Evaluation point in a named coordinate system.

    ``system`` is ``"cartesian"`` (x, y, z), ``"spherical"`` (r, theta, phi)
    or ``"spheroidal"`` (xi, eta, phi); spheroidal coordinates are read with
    the prolate or oblate convention of the geometry they are used with.
    """

    system: str
    coords: Tuple[float, float, float]

    @classmethod
    def cartesian(cls, x, y, z):
        return cls("cartesian", (float(x), float(y), float(z)))

    @classmethod
    def spherical(cls, r, theta, phi=0.0):
        return cls("spherical", (float(r), float(theta), float(phi)))

    @classmethod
    def spheroidal(cls, xi, eta, phi=0.0):
        return cls("spheroidal", (float(xi), float(eta), float(phi)))


@dataclass(frozen=True)
class SourcePoint:
    """Point on the electrode surface with an optional area weight."""

    system: str
    coords: Tuple[float, float, float]
    weight: float = 1.0

    @classmethod
    def cartesian(cls, x, y, z=0.0, weight=1.0):
        return cls("cartesian", (float(x), float(y), float(z)), weight)

    @classmethod
    def spherical(cls, r, theta, phi=0.0, weight=1.0):
        return cls("spherical", (float(r), float(theta), float(phi)), weight)

    @classmethod
    def spheroidal(cls, xi, eta, phi=0.0, weight=1.0):
        return cls("spheroidal", (float(xi), float(eta), float(phi)), weight)


@dataclass(frozen=True)
class SeriesInfo:
    """Convergence report of a truncated eigenfunction series."""

    lmax: int
    residual: float
    converged: bool


# ---------------------------------------------------------------------------
# Geometries
# ---------------------------------------------------------------------------

class Geometry:
    """Common interface; concrete geometries are frozen dataclasses."""

    kind = "abstract"
    modes: Tuple[str, ...] = ()
    series = False

    @property
    def scale(self) -> float:
        return 1.0

    def check_mode(self, k) -> FieldMode:
        k = field_mode(k)
        if k.label not in self.modes:
            raise ValueError(f"mode {k.label!r} is not defined for {self.kind}; use one of {self.modes}")
        return k

    # natural surface parametrization ``(u, v)`` and its area element
    def surface_element(self, u, v):
        raise NotImplementedError

    def source_uv(self, rp: SourcePoint):
        raise NotImplementedError

    def check_exterior(self, xyz):
        raise NotImplementedError


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite length, got {value!r}")


@dataclass(frozen=True)
class InfinitePlane(Geometry):
    """Grounded plane ``z = 0``; the field region is ``z > 0``."""

    kind = "plane"
    modes = ("z", "x")

    def surface_element(self, u, v):
        return np.ones(np.broadcast(u, v).shape)

    def source_uv(self, rp):
        x, y, z = _as_cartesian(self, rp)
        if z != 0.0:
            raise DomainError("plane source must lie on z = 0")
        return x, y

    def check_exterior(self, xyz):
        if not xyz[2] > 0:
            raise DomainError("plane field point must have z > 0")


@dataclass(frozen=True)
class HolePlane(Geometry):
    """Thin sheet ``z = 0`` with a circular hole of radius ``d_hole``.

    Only the upper face carries the source potential and field points are
    restricted to the upper side (``z > 0``) or the open aperture
    (``z = 0, s < d_hole``).
    """

    d_hole: float = 1.0
    kind = "hole"
    modes = ("z", "s")

    def __post_init__(self):
        _positive("d_hole", self.d_hole)

    @property
    def scale(self):
        return self.d_hole

    def surface_element(self, u, v):
        return np.ones(np.broadcast(u, v).shape)

    def source_uv(self, rp):
        x, y, z = _as_cartesian(self, rp)
        if z != 0.0 or math.hypot(x, y) < self.d_hole:
            raise DomainError("hole-plane source must lie on the sheet (z = 0, s >= d_hole)")
        return x, y

    def check_exterior(self, xyz):
        x, y, z = xyz
        if z < 0 or (z == 0 and math.hypot(x, y) >= self.d_hole):
            raise DomainError("hole-plane field point must be above the sheet or inside the aperture")


@dataclass(frozen=True)
class Sphere(Geometry):
    """Grounded sphere of radius ``a`` centred at the origin."""

    a: float = 1.0
    kind = "sphere"
    modes = ("r", "theta")

    def __post_init__(self):
        _positive("a", self.a)

    @property
    def scale(self):
        return self.a

    def surface_element(self, theta, phi):
        return self.a ** 2 * np.sin(theta) * np.ones(np.broadcast(theta, phi).shape)

    def source_uv(self, rp):
        if rp.system == "spherical":
            r, th, ph = rp.coords
        else:
            r, th, ph = _cart_to_spherical(*_as_cartesian(self, rp))
        if abs(r - self.a) > 1e-12 * self.a:
            raise DomainError("sphere source must lie on r = a")
        return th, ph

    def check_exterior(self, xyz):
        if not math.sqrt(sum(c * c for c in xyz)) > self.a:
            raise DomainError("sphere field point must satisfy r > a")


@dataclass(frozen=True)
class _Spheroid(Geometry):
    a: float = 1.0
    xi0: float = 2.0
    modes = ("xi", "eta")
    series = True
    _imag = False

    @property
    def scale(self):
        return self.a

    @property
    def equatorial_radius(self):
        return self.a * math.sqrt(_w2(self.xi0, self._imag))

    def surface_element(self, eta, phi):
        """``dS / (d eta d phi)`` on ``xi = xi0``."""
        s = -1.0 if self._imag else 1.0
        return self.a ** 2 * np.sqrt((self.xi0 ** 2 - s * eta ** 2) * _w2(self.xi0, self._imag)) * np.ones(
            np.broadcast(eta, phi).shape
        )

    def source_uv(self, rp):
        if rp.system == "spheroidal":
            xi, eta, ph = rp.coords
        else:
            xi, eta, ph = _cart_to_spheroidal(self, *_as_cartesian(self, rp))
        if abs(xi - self.xi0) > 1e-12 * max(1.0, self.xi0):
            raise DomainError("spheroid source must lie on xi = xi0")
        if abs(eta) > 1.0:
            raise DomainError("eta must lie in [-1, 1]")
        return eta, ph

    def check_exterior(self, xyz):
        xi, _, _ = _cart_to_spheroidal(self, *xyz)
        if not xi > self.xi0:
            raise DomainError(f"{self.kind} field point must satisfy xi > xi0")


@dataclass(frozen=True)
class ProlateSpheroid(_Spheroid):
    """Prolate spheroid ``xi = xi0 > 1`` with focal half-distance ``a``."""

    kind = "prolate"

    def __post_init__(self):
        _positive("a", self.a)
        if not self.xi0 > 1.0 + specfun.ENDPOINT_GUARD:
            raise ValueError("prolate spheroid requires xi0 > 1")


@dataclass(frozen=True)
class OblateSpheroid(_Spheroid):
    """Oblate spheroid ``xi = xi0 >= 0``; ``xi0 = 0`` is the disc of radius ``a``."""

    kind = "oblate"
    _imag = True

    def __post_init__(self):
        _positive("a", self.a)
        if not (self.xi0 >= 0.0 and math.isfinite(self.xi0)):
            raise ValueError("oblate spheroid requires xi0 >= 0")


NEEDLE_XI0 = 100.0 / (3.0 * math.sqrt(1111.0))


def needle(a=1.0):
    """Prolate needle of aspect ratio 100 (half-length / radius)."""
    return ProlateSpheroid(a=a, xi0=NEEDLE_XI0)


def disc(a=1.0):
    """Zero-thickness disc of radius ``a``."""
    return OblateSpheroid(a=a, xi0=0.0)


# ---------------------------------------------------------------------------
# Coordinate maps
# ---------------------------------------------------------------------------

def _w2(xi, imag):
    return xi * xi + 1.0 if imag else (xi - 1.0) * (xi + 1.0)


def _cart_to_spherical(x, y, z):
    r = math.sqrt(x * x + y * y + z * z)
    theta = math.atan2(math.hypot(x, y), z)
    return r, theta, math.atan2(y, x)


def _spheroidal_to_cart(g, xi, eta, phi):
    rho = g.a * math.sqrt(_w2(xi, g._imag) * (1.0 - eta) * (1.0 + eta))
    return rho * math.cos(phi), rho * math.sin(phi), g.a * xi * eta


def _cart_to_spheroidal(g, x, y, z):
    a = g.a
    rho = math.hypot(x, y) / a
    zz = z / a
    phi = math.atan2(y, x)
    if not g._imag:
        rp = math.hypot(rho, zz - 1.0)
        rm = math.hypot(rho, zz + 1.0)
        xi = max(0.5 * (rm + rp), 1.0)
        eta = min(max(0.5 * (rm - rp), -1.0), 1.0)
        return xi, eta, phi
    # oblate: xi^2 solves t^2 - A t - zz^2 = 0 with A = rho^2 + zz^2 - 1
    big_a = rho * rho + zz * zz - 1.0
    root = math.hypot(big_a, 2.0 * zz)
    if big_a >= 0:
        xi2 = 0.5 * (big_a + root)
    else:
        xi2 = 2.0 * zz * zz / (root - big_a)
    xi = math.sqrt(xi2)
    if xi > 0:
        eta = zz / xi
    else:
        eta = math.sqrt(max(0.0, 1.0 - rho * rho))
    return xi, min(max(eta, -1.0), 1.0), phi


def _as_cartesian(g, p):
    if p.system == "cartesian":
        return p.coords
    if p.system == "spherical":
        r, th, ph = p.coords
        st = math.sin(th)
        return r * st * math.cos(ph), r * st * math.sin(ph), r * math.cos(th)
    if p.system == "spheroidal":
        if not isinstance(g, _Spheroid):
            raise ValueError("spheroidal coordinates need a prolate or oblate geometry")
        xi, eta, ph = p.coords
        if abs(eta) > 1.0 or xi < (1.0 if not g._imag else 0.0):
            raise DomainError("spheroidal coordinates out of range")
        return _spheroidal_to_cart(g, xi, eta, ph)
    raise ValueError(f"unknown coordinate system {p.system!r}")


def to_cartesian(g: Geometry, p) -> Tuple[float, float, float]:
    """Cartesian triple of a field or source point."""
    return tuple(float(c) for c in _as_cartesian(g, p))


def from_cartesian(g: Geometry, xyz) -> FieldPoint:
    """Inverse of :func:`to_cartesian` in the natural system of ``g``."""
    x, y, z = (float(c) for c in xyz)
    if isinstance(g, Sphere):
        return FieldPoint("spherical", _cart_to_spherical(x, y, z))
    if isinstance(g, _Spheroid):
        return FieldPoint("spheroidal", _cart_to_spheroidal(g, x, y, z))
    return FieldPoint.cartesian(x, y, z)


def axis_point(g: Geometry, d: float) -> FieldPoint:
    """Point at height ``d`` above the reference surface point on the z axis.

    Plane and disc: above the origin.  Sphere and spheroids: above the top of
    the electrode.  Hole: ``d`` is ignored and the aperture centre is returned,
    since the hole radius is the scaling variable there.
    """
    if isinstance(g, HolePlane):
        return FieldPoint.cartesian(0.0, 0.0, 0.0)
    if isinstance(g, Sphere):
        return FieldPoint.cartesian(0.0, 0.0, g.a + d)
    if isinstance(g, _Spheroid):
        return FieldPoint.cartesian(0.0, 0.0, g.a * g.xi0 + d)
    return FieldPoint.cartesian(0.0, 0.0, d)


def _check_proximity(g, r, rp):
    dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(r, rp)))
    if dist < PROXIMITY_FLOOR * g.scale:
        raise ProximityError(
            f"field and source points are {dist:.3g} apart, below the floor {PROXIMITY_FLOOR:g}*scale"
        )


# ---------------------------------------------------------------------------
# Closed-form kernels (vectorized over source points)
# ---------------------------------------------------------------------------

def _plane_kernel(xyz, xs, ys):
    x, y, z = xyz
    dx, dy = x - xs, y - ys
    r2 = dx * dx + dy * dy + z * z
    return z / (2.0 * np.pi * r2 ** 1.5)


def _plane_grad(label, xyz, xs, ys):
    x, y, z = xyz
    dx, dy = x - xs, y - ys
    rho2 = dx * dx + dy * dy
    r5 = (rho2 + z * z) ** 2.5
    if label == "z":
        return (rho2 - 2.0 * z * z) / (2.0 * np.pi * r5)
    return -3.0 * z * dx / (2.0 * np.pi * r5)


def _hole_kernel(xyz, xs, ys, d):
    """G_sigma for sources on the upper face of the hole sheet.

    Obtained from the closed-form Green's function by differentiating with
    respect to the source height at ``z' = 0+``; written in cartesian field
    coordinates so it is analytic in them (complex-step friendly).  The
    product ``z / Psi`` is evaluated without cancellation, which keeps the
    aperture plane ``z = 0, s < d`` finite.
    """
    x, y, z = xyz
    s2 = x * x + y * y
    z2 = z * z
    gam2 = (x - xs) ** 2 + (y - ys) ** 2 + z2
    gam = np.sqrt(gam2)
    big_x = s2 + z2 - d * d
    w = np.sqrt((s2 + z2 + d * d) ** 2 - 4.0 * s2 * d * d)
    sp2 = xs * xs + ys * ys - d * d
    above = np.real(big_x) >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        # X >= 0: Psi from the closed form; X < 0: Psi / z = sqrt(2 s'^2 / (W - X))
        psi_a = np.sqrt(sp2 * (big_x + w) / 2.0) / d
        z_over_psi_a = z / psi_a
        psi_over_z_b = np.sqrt(2.0 * sp2 / (w - big_x))
        psi_b = z * psi_over_z_b
        z_over_psi_b = 1.0 / psi_over_z_b
    psi = np.where(above, psi_a, psi_b)
    z_over_psi = np.where(above, z_over_psi_a, z_over_psi_b)
    first = z * (1.0 + (2.0 / np.pi) * np.arctan(psi / gam)) / (gam2 * gam)
    second = (2.0 / np.pi) * z_over_psi / gam2
    return (first + second) / (4.0 * np.pi)


def _hole_grad(label, xyz, xs, ys, d):
    x, y, z = xyz
    if label == "z":
        e = (0.0, 0.0, 1.0)
    else:
        s = math.hypot(x, y)
        e = (x / s, y / s, 0.0) if s > 0 else (1.0, 0.0, 0.0)
    h = _COMPLEX_STEP
    pt = tuple(c + 1j * h * ec for c, ec in zip(xyz, e))
    return np.imag(_hole_kernel(pt, xs, ys, d)) / h


def hole_green(r, rp, d_hole=1.0):
    """Dirichlet Green's function of a thin sheet with a circular hole.

    Both points are cartesian triples on the same side of the sheet.  This is
    the full two-point function; :func:`surface_green` uses its normal
    derivative at the upper face.
    """
    x, y, z = (float(c) for c in r)
    xp, yp, zp = (float(c) for c in rp)
    if z * zp < 0:
        raise DomainError("hole Green's function needs both points on the same side of the sheet")
    d = float(d_hole)
    s2, sp2 = x * x + y * y, xp * xp + yp * yp
    rho2 = (x - xp) ** 2 + (y - yp) ** 2
    gm = math.sqrt(rho2 + (z - zp) ** 2)
    gp = math.sqrt(rho2 + (z + zp) ** 2)
    bx = s2 + z * z - d * d
    bxp = sp2 + zp * zp - d * d
    s, sp = math.sqrt(s2), math.sqrt(sp2)
    root = math.sqrt((z * z + (s - d) ** 2) * (z * z + (s + d) ** 2)) * math.sqrt(
        (zp * zp + (sp - d) ** 2) * (zp * zp + (sp + d) ** 2)
    )
    psi_m = math.sqrt(max(bx * bxp + 4.0 * d * d * z * zp + root, 0.0)) / (math.sqrt(2.0) * d)
    psi_p = math.sqrt(max(bx * bxp - 4.0 * d * d * z * zp + root, 0.0)) / (math.sqrt(2.0) * d)
    eps = math.copysign(1.0, z * bxp + zp * bx) if (z * bxp + zp * bx) != 0 else 0.0
    term_m = (1.0 + (2.0 / math.pi) * math.atan(psi_m / gm)) / gm
    term_p = (1.0 + eps * (2.0 / math.pi) * math.atan(psi_p / gp)) / gp
    return (term_m - term_p) / (8.0 * math.pi)


def _sphere_kernel(xyz, xs, ys, zs, a):
    x, y, z = xyz
    r2 = x * x + y * y + z * z
    dist2 = (x - xs) ** 2 + (y - ys) ** 2 + (z - zs) ** 2
    return (r2 - a * a) / (4.0 * np.pi * a * dist2 ** 1.5)


def _sphere_grad(label, xyz, xs, ys, zs, a):
    x, y, z = xyz
    r = math.sqrt(x * x + y * y + z * z)
    rho = math.hypot(x, y)
    if label == "r":
        e = (x / r, y / r, z / r)
    else:
        if rho > 0:
            e = (x * z / (r * rho), y * z / (r * rho), -rho / r)
        else:
            e = (math.copysign(1.0, z), 0.0, 0.0)  # theta-hat at the pole, phi = 0
    dx, dy, dz = x - xs, y - ys, z - zs
    dist2 = dx * dx + dy * dy + dz * dz
    num = x * x + y * y + z * z - a * a
    gx = 2.0 * x / dist2 ** 1.5 - 3.0 * num * dx / dist2 ** 2.5
    gy = 2.0 * y / dist2 ** 1.5 - 3.0 * num * dy / dist2 ** 2.5
    gz = 2.0 * z / dist2 ** 1.5 - 3.0 * num * dz / dist2 ** 2.5
    return (e[0] * gx + e[1] * gy + e[2] * gz) / (4.0 * np.pi * a)


def _sphere_series(xyz, theta_s, phi_s, a, lmax, rtol):
    r, th, ph = _cart_to_spherical(*xyz)
    cosg = math.cos(th) * math.cos(theta_s) + math.sin(th) * math.sin(theta_s) * math.cos(ph - phi_s)
    cosg = min(max(cosg, -1.0), 1.0)
    p = specfun.legendre_p_table(lmax, 0, cosg)
    ls = np.arange(lmax + 1)
    terms = (a / r) ** (ls + 1) * np.sqrt(2.0 * (2 * ls + 1)) * p / (4.0 * np.pi * a * a)
    return _series_sum(terms, rtol)


def _series_sum(terms, rtol, tail=4):
    total = float(np.sum(terms))
    lmax = len(terms) - 1
    resid = float(np.sum(np.abs(terms[-tail:]))) / max(abs(total), 1e-300)
    return total, SeriesInfo(lmax, resid, resid <= rtol)


# ---------------------------------------------------------------------------
# Spheroid series
# ---------------------------------------------------------------------------

def _q_log(g, lmax, m, xi):
    return specfun.q_sequence(lmax, m, xi, imag=g._imag)


def _spheroid_series(g, xyz, eta_s, phi_s, lmax, rtol):
    xi, eta, ph = _cart_to_spheroidal(g, *xyz)
    xi0 = g.xi0
    norm = 2.0 * np.pi * g.a ** 2 * math.sqrt(_w2(xi0, g._imag) * (xi0 ** 2 - (-1.0 if g._imag else 1.0) * eta_s ** 2))
    per_l = np.zeros(lmax + 1)
    for m in range(lmax + 1):
        qa = _q_log(g, lmax, m, xi)
        qb = _q_log(g, lmax, m, xi0)
        ratio = np.exp(qa.log_q - qb.log_q)
        pf = specfun.legendre_p_table(lmax, m, eta)[m:]
        ps = specfun.legendre_p_table(lmax, m, eta_s)[m:]
        w = 1.0 if m == 0 else 2.0 * math.cos(m * (ph - phi_s))
        per_l[m:] += w * ratio * pf * ps
    return _series_sum(per_l / norm, rtol)


def _spheroid_axis_grad(g, label, xyz, eta_s, phi_s, lmax):
    """Physical gradient on the upper axis as a series in the degree."""
    x, y, z = xyz
    if x != 0.0 or y != 0.0 or z <= 0:
        raise DomainError("spheroid gradients are evaluated on the +z axis only (eta = 1)")
    xi = z / g.a
    xi0 = g.xi0
    s = -1.0 if g._imag else 1.0
    norm = 2.0 * np.pi * g.a ** 2 * math.sqrt(_w2(xi0, g._imag)) * np.sqrt(xi0 ** 2 - s * np.asarray(eta_s) ** 2)
    m = 0 if label == "xi" else 1
    qa = _q_log(g, lmax, m, xi)
    qb = _q_log(g, lmax, m, xi0)
    ls = np.arange(m, lmax + 1)
    ratio = np.exp(qa.log_q - qb.log_q)
    ps = specfun.legendre_p_table(lmax, m, eta_s)[m:]
    if m == 0:
        coef = ratio * qa.dlog * np.sqrt((2 * ls + 1) / 2.0) / g.a
        terms = coef[:, None] * ps.reshape(len(ls), -1)
        val = terms.sum(axis=0).reshape(np.shape(eta_s))
    else:
        cl = np.sqrt(ls * (ls + 1) * (2 * ls + 1) / 8.0)
        coef = -2.0 * cl * ratio / (g.a * math.sqrt(_w2(xi, g._imag)))
        terms = coef[:, None] * ps.reshape(len(ls), -1)
        val = (terms.sum(axis=0) * np.cos(np.asarray(phi_s)).reshape(-1)).reshape(np.shape(eta_s))
    tail = np.abs(terms[-4:]).sum(axis=0) if terms.size else 0.0
    return val / norm, tail


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _prepare(g, r, rp):
    xyz = to_cartesian(g, r)
    g.check_exterior(xyz)
    uv = g.source_uv(rp)
    sxyz = to_cartesian(g, rp) if rp.system != "spheroidal" else _spheroidal_to_cart(g, g.xi0, *uv)
    _check_proximity(g, xyz, sxyz)
    return xyz, uv, sxyz


def surface_green(g: Geometry, r: FieldPoint, rp: SourcePoint, lmax=None, rtol=DEFAULT_RTOL,
                  method=None, full_output=False):
    """Surface Green's function ``G_sigma(r, r')``.

    Parameters
    ----------
    g : Geometry
    r : FieldPoint
        Exterior evaluation point.
    rp : SourcePoint
        Point on the electrode surface.
    lmax : int, optional
        Maximum degree for series evaluation (default 256).
    rtol : float
        Relative tolerance used to judge series convergence.
    method : {"closed", "series"}, optional
        The sphere supports both; spheroids are always series.
    full_output : bool
        Also return a :class:`SeriesInfo` (``None`` for closed forms).

    Notes
    -----
    A series that misses ``rtol`` within ``lmax`` emits a
    :class:`ConvergenceWarning` unless ``full_output`` is requested.
    """
    xyz, uv, sxyz = _prepare(g, r, rp)
    lmax = DEFAULT_LMAX if lmax is None else int(lmax)
    info = None
    if isinstance(g, InfinitePlane):
        val = float(_plane_kernel(xyz, *uv))
    elif isinstance(g, HolePlane):
        val = float(_hole_kernel(xyz, np.float64(uv[0]), np.float64(uv[1]), g.d_hole))
    elif isinstance(g, Sphere):
        if method == "series":
            val, info = _sphere_series(xyz, uv[0], uv[1], g.a, lmax, rtol)
        else:
            val = float(_sphere_kernel(xyz, *sxyz, g.a))
    elif isinstance(g, _Spheroid):
        val, info = _spheroid_series(g, xyz, uv[0], uv[1], lmax, rtol)
    else:
        raise TypeError(f"unsupported geometry {g!r}")
    if full_output:
        return val, info
    if info is not None and not info.converged:
        warnings.warn(f"series residual {info.residual:.3g} above rtol {rtol:g} at lmax={lmax}",
                      ConvergenceWarning, stacklevel=2)
    return val


def grad_surface_green(g: Geometry, k, r: FieldPoint, rp: SourcePoint, lmax=None):
    """Physical ``k`` component of ``grad_r G_sigma(r, r')``."""
    k = g.check_mode(k)
    xyz, uv, sxyz = _prepare(g, r, rp)
    if isinstance(g, InfinitePlane):
        return float(_plane_grad(k.label, xyz, *uv))
    if isinstance(g, HolePlane):
        return float(_hole_grad(k.label, xyz, np.float64(uv[0]), np.float64(uv[1]), g.d_hole))
    if isinstance(g, Sphere):
        return float(_sphere_grad(k.label, xyz, *sxyz, g.a))
    if isinstance(g, _Spheroid):
        lmax = DEFAULT_LMAX if lmax is None else int(lmax)
        val, _ = _spheroid_axis_grad(g, k.label, xyz, np.float64(uv[0]), np.float64(uv[1]), lmax)
        return float(val)
    raise TypeError(f"unsupported geometry {g!r}")
