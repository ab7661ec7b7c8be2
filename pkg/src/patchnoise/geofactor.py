"""The geometric factor Lambda_k(r) by three independent routes.

``lambda_closed``
    Analytic closed forms (plane, hole, sphere, spheroid IP).
``lambda_spectral``
    Eigenfunction sums (sphere, prolate, oblate) with truncation for finite
    patches.
``lambda_quadrature``
    Direct surface integration of the IP / PP limits, the oracle for the
    other two.

Values are expressed in the length unit of the geometry: a result carries
``length^-power`` (``power = 2`` for IP, ``4`` for PP and truncated) and, for
PP and truncated regimes, the factor A/N.

Notes
-----
The closed-form spheroid IP expression ``2 |grad Q_00(xi) / Q_00(xi0)|^2``
is twice the squared field of a spheroid held at unit potential;
``lambda_closed`` reproduces it as written while the spectral and
quadrature backends return the physical ``|grad Q_00(xi) / Q_00(xi0)|^2``.
The factor cancels in the scaling exponent.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from . import specfun
from .geometry import (
    ConvergenceWarning,
    DomainError,
    FieldPoint,
    Geometry,
    HolePlane,
    InfinitePlane,
    OblateSpheroid,
    ProlateSpheroid,
    Sphere,
    _hole_grad,
    _plane_grad,
    _Spheroid,
    _spheroid_axis_grad,
    _sphere_grad,
    _w2,
    to_cartesian,
)
from .patchmodel import CorrelationSpec, PatchModel, coeff_sphere, coefficient_table, correlation

__all__ = [
    "LambdaResult",
    "NoClosedForm",
    "EdgeSingularityError",
    "QuadratureSpec",
    "lambda_closed",
    "lambda_spectral",
    "lambda_quadrature",
    "hole_radial_pp_finite_delta",
    "PLANE_PP_Z",
    "PLANE_PP_X",
    "HOLE_IP_Z",
    "HOLE_PP_Z",
]

# closed-form constants (module level so that checks can perturb them)
PLANE_PP_Z = 3.0 / (16.0 * math.pi)
PLANE_PP_X = 3.0 / (32.0 * math.pi)
HOLE_IP_Z = 0.25
HOLE_PP_Z = 1.0 / (32.0 * math.pi)

# series lengths tried in turn for spheroid PP when no lmax is given
LMAX_LADDER = (256, 512, 1024, 2048)


class NoClosedForm(LookupError):
    """No closed form for this geometry / mode / regime."""


class EdgeSingularityError(ValueError):
    """A radial mode at a sharp edge was requested without an edge cutoff."""


@dataclass(frozen=True)
class LambdaResult:
    """Geometric factor with provenance.

    ``value`` is in ``length^-power`` of the geometry's length unit and
    includes A/N when ``area_ratio`` is not ``None``.  After
    :meth:`resolve` it is in SI (``m^-power``) and ``length_scale_m`` records
    the metres per geometry length unit.
    """

    value: float
    power: int
    area_ratio: Optional[float]
    backend: str
    geometry: str
    mode: str
    patch: str
    point: Tuple[float, float, float]
    lmax: Optional[int] = None
    residual: Optional[float] = None
    converged: bool = True
    length_scale_m: Optional[float] = None

    @property
    def units(self) -> str:
        unit = "m" if self.length_scale_m is not None else "length"
        head = "A/N*" if self.area_ratio is not None else ""
        return f"{head}{unit}^-{self.power}"

    def resolve(self, length_scale_m: float) -> "LambdaResult":
        """Convert to SI given the size of one geometry length unit in metres."""
        if not length_scale_m > 0:
            raise ValueError("length scale must be positive")
        if self.length_scale_m is not None:
            raise ValueError("result already resolved")
        return replace(self, value=self.value * length_scale_m ** (-self.power), length_scale_m=float(length_scale_m))


def _as_patch(patch) -> PatchModel:
    if isinstance(patch, PatchModel):
        return patch
    return PatchModel.parse(patch)


def _result(value, patch, g, k, xyz, backend, **kw):
    power = 2 if patch.regime == "IP" else 4
    ratio = patch.area_ratio if patch.uses_area_ratio else None
    return LambdaResult(float(value), power, ratio, backend, g.kind, k.label, patch.label, tuple(xyz), **kw)


def _axis_xi(g: _Spheroid, xyz):
    x, y, z = xyz
    if x != 0.0 or y != 0.0 or not z > 0.0:
        raise DomainError("spheroid geometric factors are evaluated on the +z axis (eta = 1)")
    xi = z / g.a
    if not xi > g.xi0:
        raise DomainError("field point must lie outside the spheroid")
    return xi


def _hole_center(g: HolePlane, xyz):
    if any(abs(c) > 0.0 for c in xyz):
        raise DomainError("hole-trap geometric factors are evaluated at the aperture centre")


def _check_point(g, point):
    if not isinstance(point, FieldPoint):
        point = FieldPoint.cartesian(*point)
    xyz = to_cartesian(g, point)
    g.check_exterior(xyz)
    return xyz


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def hole_radial_pp_finite_delta(delta):
    """Exact finite-cutoff PP integral of the radial mode at the hole centre.

    ``(1/(2 pi^3)) [ln(U/(U-1)) - 1/U - 1/(2U^2)]`` with ``U = (1+delta)^2``
    for unit hole radius; it tends to the leading-order closed form
    ``(2 ln(1/(2 delta)) - 3) / (4 pi^3)`` as ``delta -> 0``.
    """
    u = (1.0 + delta) ** 2
    return (math.log(u / (u - 1.0)) - 1.0 / u - 0.5 / u ** 2) / (2.0 * math.pi ** 3)


def lambda_closed(g: Geometry, k, patch, point, edge_delta=None) -> LambdaResult:
    """Evaluate a closed form.

    Parameters
    ----------
    g : Geometry
    k : mode label or FieldMode
    patch : PatchModel or {"IP", "PP"}
    point : FieldPoint or cartesian triple
        Plane: ``(0, 0, d)``.  Hole: the aperture centre.  Sphere: any
        exterior point.  Spheroids: on the +z axis.
    edge_delta : float, optional
        Radial cutoff for the hole ``s`` mode as a fraction of the hole
        radius (integration over ``s' > d (1 + delta)``).

    Raises
    ------
    NoClosedForm
        Truncated regimes, spheroid PP and other combinations without one.
    """
    k = g.check_mode(k)
    patch = _as_patch(patch)
    if patch.regime == "truncated":
        raise NoClosedForm("finite patches have no closed form; use lambda_spectral")
    xyz = _check_point(g, point)
    ip = patch.regime == "IP"
    an = patch.area_ratio
    if isinstance(g, InfinitePlane):
        d = xyz[2]
        val = 0.0 if ip else an * (PLANE_PP_Z if k.label == "z" else PLANE_PP_X) * d ** -4
    elif isinstance(g, HolePlane):
        _hole_center(g, xyz)
        d = g.d_hole
        if k.label == "z":
            val = HOLE_IP_Z * d ** -2 if ip else an * HOLE_PP_Z * d ** -4
        elif ip:
            val = 0.0
        else:
            if edge_delta is None or not edge_delta > 0:
                raise EdgeSingularityError("the hole s mode needs edge_delta > 0 (log divergence at the rim)")
            val = an * (2.0 * math.log(1.0 / (2.0 * edge_delta)) - 3.0) / (4.0 * math.pi ** 3) * d ** -4
    elif isinstance(g, Sphere):
        r = math.sqrt(sum(c * c for c in xyz)) / g.a
        if k.label == "r":
            val = r ** -4 / g.a ** 2 if ip else an * (3.0 + 8.0 * r * r + r ** 4) / (4.0 * math.pi * (r * r - 1.0) ** 4) / g.a ** 4
        else:
            val = 0.0 if ip else an * 3.0 * (1.0 + r * r) / (4.0 * math.pi * (r * r - 1.0) ** 4) / g.a ** 4
    elif isinstance(g, _Spheroid):
        if not ip:
            raise NoClosedForm("spheroid PP has no closed form; use lambda_spectral")
        xi = _axis_xi(g, xyz)
        if k.label == "eta":
            val = 0.0
        elif isinstance(g, ProlateSpheroid):
            q00 = 0.5 * math.log1p(2.0 / (g.xi0 - 1.0))
            val = 2.0 * (1.0 / (_w2(xi, False) * q00 * g.a)) ** 2
        else:
            q00 = math.atan2(1.0, g.xi0)
            val = 2.0 * (1.0 / ((1.0 + xi * xi) * q00 * g.a)) ** 2
    else:
        raise NoClosedForm(f"no closed form for {g!r}")
    return _result(val, patch, g, k, xyz, "closed")


# ---------------------------------------------------------------------------
# Spectral sums
# ---------------------------------------------------------------------------

def _sphere_weights(label, ls):
    if label == "r":
        return (ls + 1.0) ** 2 * (2 * ls + 1.0) / (4.0 * math.pi)
    return (2 * ls + 1.0) * ls * (ls + 1.0) / (8.0 * math.pi)


def _axis_factors(g: _Spheroid, label, xi, lmax):
    """``grad_k f_lm`` on the axis for the single contributing order."""
    m = 0 if label == "xi" else 1
    qa = specfun.q_sequence(lmax, m, xi, imag=g._imag)
    qb = specfun.q_sequence(lmax, m, g.xi0, imag=g._imag)
    ls = np.arange(m, lmax + 1)
    ratio = np.exp(qa.log_q - qb.log_q)
    if m == 0:
        f = ratio * qa.dlog * np.sqrt((2 * ls + 1) / 2.0) / math.sqrt(2.0 * math.pi)
    else:
        cl = np.sqrt(ls * (ls + 1) * (2 * ls + 1) / 8.0)
        f = ratio * cl / (math.sqrt(2.0 * math.pi) * math.sqrt(_w2(xi, g._imag)))
    return m, ls, f / g.a


def lambda_spectral(g: Geometry, k, patch, point, lmax=None, rtol=1e-8, edge_delta=None) -> LambdaResult:
    """Eigenfunction-expansion geometric factor.

    Sphere: ``sum_l c_l |grad_k (Y_lm / r^{l+1})|^2`` (diagonal), truncated at
    ``l <= l0``.  Spheroids on the +z axis: only ``m = 0`` (``xi`` mode) or
    ``|m| = 1`` (``eta`` mode) survive, and::

        Lambda = (1 / sqrt(xi0^2 -+ 1)) sum_{l,l'} c_{ll'm} grad f_lm grad f_l'm

    truncated at ``l + l' <= 2 l0``.  IP keeps only the monopole.

    Parameters
    ----------
    lmax : int, optional
        Series length for PP.  Sphere default 256; spheroids try
        ``LMAX_LADDER`` in turn until the tail meets ``rtol``.  Truncated
        regimes use their own ``l0``.
    rtol : float
        Convergence target for PP; the achieved residual is reported.
    edge_delta : float, optional
        Disc rim cutoff in eta (oblate ``xi0 = 0`` only).
    """
    k = g.check_mode(k)
    patch = _as_patch(patch)
    xyz = _check_point(g, point)
    if isinstance(g, Sphere):
        return _spectral_sphere(g, k, patch, xyz, lmax, rtol)
    if isinstance(g, _Spheroid):
        return _spectral_spheroid(g, k, patch, xyz, lmax, rtol, edge_delta)
    raise NoClosedForm(f"no eigenfunction expansion implemented for {g.kind}")


def _spectral_sphere(g, k, patch, xyz, lmax, rtol):
    r = math.sqrt(sum(c * c for c in xyz)) / g.a
    if patch.regime == "IP":
        c00 = coeff_sphere("IP", (0, 0), (0, 0))
        # |d/dr (Y00 / r)|^2 = 1 / (4 pi r^4); no theta component
        val = c00 / (4.0 * math.pi * r ** 4) if k.label == "r" else 0.0
        return _result(val / g.a ** 2, patch, g, k, xyz, "spectral", lmax=0, residual=0.0)
    top = patch.l0 if patch.regime == "truncated" else (256 if lmax is None else int(lmax))
    ls = np.arange(top + 1, dtype=float)
    terms = _sphere_weights(k.label, ls) * np.exp(-(2 * ls + 4) * math.log(r))
    terms = terms * patch.weight(ls) ** 2 * coeff_sphere("PP", (0, 0), (0, 0), patch.area_ratio)
    val = float(np.sum(terms))
    if patch.regime == "PP":
        x = r ** -2
        resid = float(terms[-1]) * x / (1.0 - x) / max(val, 1e-300)
        ok = resid <= rtol
        if not ok:
            warnings.warn(f"sphere PP series residual {resid:.3g} at lmax={top}", ConvergenceWarning, stacklevel=3)
    else:
        resid, ok = 0.0, True
    return _result(val / g.a ** 4, patch, g, k, xyz, "spectral", lmax=top, residual=resid, converged=ok)


def _spectral_spheroid(g, k, patch, xyz, lmax, rtol, edge_delta):
    xi = _axis_xi(g, xyz)
    if patch.regime == "IP":
        if k.label == "eta":
            val = 0.0
        else:
            _, _, f = _axis_factors(g, "xi", xi, 0)
            val = 4.0 * math.pi * f[0] ** 2
        return _result(val, patch, g, k, xyz, "spectral", lmax=0, residual=0.0)
    delta = _edge_delta_for(g, edge_delta)
    if patch.regime == "truncated":
        top = max(2 * patch.l0, 1)
        val, _ = _spheroid_sum(g, k, patch, xi, top, delta)
        return _result(val, patch, g, k, xyz, "spectral", lmax=top, residual=0.0)
    ladder = (int(lmax),) if lmax is not None else LMAX_LADDER
    for top in ladder:
        val, resid = _spheroid_sum(g, k, patch, xi, top, delta)
        if resid <= rtol:
            break
    ok = resid <= rtol
    if not ok:
        warnings.warn(f"{g.kind} PP series residual {resid:.3g} at lmax={top}", ConvergenceWarning, stacklevel=3)
    return _result(val, patch, g, k, xyz, "spectral", lmax=top, residual=resid, converged=ok)


def _spheroid_sum(g, k, patch, xi, top, delta):
    """Quadratic form over the coefficient table; returns value and tail ratio."""
    m, ls, f = _axis_factors(g, k.label, xi, top)
    tab = coefficient_table(g.kind, m, g.xi0, top, delta)
    c = tab.values[m : top + 1, m : top + 1]
    fw = f * patch.weight(ls)
    contrib = c * np.outer(fw, fw)
    if patch.regime == "truncated":
        contrib = np.where((ls[:, None] + ls[None, :]) <= 2 * patch.l0, contrib, 0.0)
    pref = (2.0 if m == 1 else 1.0) * patch.area_ratio / math.sqrt(_w2(g.xi0, g._imag))
    total = float(contrib.sum())
    band = min(8, contrib.shape[0])
    tail = float(np.abs(contrib[-band:, :]).sum() + np.abs(contrib[:-band, -band:]).sum())
    return pref * total / g.a ** 2, tail / max(abs(total), 1e-300)


def _edge_delta_for(g, edge_delta):
    if isinstance(g, OblateSpheroid) and g.xi0 == 0.0:
        if edge_delta is None or not edge_delta > 0:
            raise EdgeSingularityError("the disc needs an edge cutoff edge_delta > 0 in eta")
        return float(edge_delta)
    return 0.0


# ---------------------------------------------------------------------------
# Direct quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre nodes per panel, azimuthal trapezoid points, doubling."""

    n: int = 48
    n_phi: int = 16
    rtol: float = 1e-10
    max_doublings: int = 4


def _panels(edges, n):
    t, w = specfun._gauss_legendre(n)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (b - a) * (t + 1.0) + a)
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


def _phi_nodes(n_phi):
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return phi, np.full(n_phi, 2.0 * np.pi / n_phi)


def _reduce(spec: CorrelationSpec, grads, weights):
    """Apply the IP or PP reduction of the double surface integral."""
    if spec.regime == "IP":
        return float(np.sum(weights * grads)) ** 2, float(np.sum(weights * np.abs(grads)))
    delta = correlation(spec)
    return delta.reduce(grads, weights), 0.0


def _adaptive(build, spec: QuadratureSpec):
    """Double the node count until successive values agree."""
    n = spec.n
    prev = build(n)
    for _ in range(spec.max_doublings):
        n *= 2
        cur = build(n)
        diff = abs(cur[0] - prev[0])
        scale = max(abs(cur[0]), cur[1] ** 2, 1e-300)
        if diff <= spec.rtol * scale:
            return cur[0], diff / scale, True
        prev = cur
    return cur[0], diff / scale, False


def _plane_builder(g, k, cspec, xyz, qs):
    z = xyz[2]

    def build(n):
        u, wu = _panels(np.linspace(0.0, 0.5 * np.pi, 5), n)
        rho = z * np.tan(u)
        wr = wu * z / np.cos(u) ** 2 * rho
        phi, wp = _phi_nodes(qs.n_phi)
        R, P = np.meshgrid(rho, phi, indexing="ij")
        xs = xyz[0] + R * np.cos(P)
        ys = xyz[1] + R * np.sin(P)
        grads = _plane_grad(k.label, xyz, xs, ys)
        return _reduce(cspec, grads, np.outer(wr, wp))

    return build


def _hole_builder(g, k, cspec, xyz, qs, edge_delta):
    d = g.d_hole
    x, y, z = xyz
    if x != 0.0 or y != 0.0:
        raise DomainError("hole quadrature is implemented on the symmetry axis")
    delta = 0.0 if edge_delta is None else float(edge_delta)
    if k.label == "s" and not delta > 0:
        raise EdgeSingularityError("radial (s) mode at the hole rim diverges; pass edge_delta > 0")

    def build(n):
        if delta > 0:
            # s' = d (1 + e^v), v in [ln delta, 0]
            lo = math.log(delta)
            v, wv = _panels(np.linspace(lo, 0.0, max(2, int(math.ceil(-lo))) + 1), n)
            s_in = d * (1.0 + np.exp(v))
            w_in = wv * d * np.exp(v)
        else:
            # s' = d (1 + v^2) removes the inverse square-root rim behaviour
            v, wv = _panels(np.linspace(0.0, 1.0, 4), n)
            s_in = d * (1.0 + v * v)
            w_in = wv * 2.0 * d * v
        # s' = 2 d / t, t in (0, 1]
        t, wt = _panels(np.array([0.0, 0.05, 0.2, 0.5, 1.0]), n)
        s_out = 2.0 * d / t
        w_out = wt * 2.0 * d / t ** 2
        s = np.concatenate([s_in, s_out])
        ws = np.concatenate([w_in, w_out]) * s
        phi, wp = _phi_nodes(qs.n_phi)
        S, P = np.meshgrid(s, phi, indexing="ij")
        grads = _hole_grad(k.label, xyz, S * np.cos(P), S * np.sin(P), d)
        return _reduce(cspec, grads, np.outer(ws, wp))

    return build


def _sphere_builder(g, k, cspec, xyz, qs):
    a = g.a
    r = math.sqrt(sum(c * c for c in xyz))
    ax = (0.0, 0.0, r)  # by symmetry only |r| matters
    width = (r - a) ** 2 / (r * a)

    def build(n):
        # t = 1 - cos(theta'), graded panels towards the sub-ion point t = 0
        lo = max(width * 1e-4, 1e-14)
        edges = np.concatenate([[0.0], np.geomspace(lo, 2.0, max(4, int(math.log(2.0 / lo) / 1.2) + 2))])
        t, wt = _panels(edges, n)
        phi, wp = _phi_nodes(qs.n_phi)
        T, P = np.meshgrid(t, phi, indexing="ij")
        ST = np.sqrt(np.clip(T * (2.0 - T), 0.0, None))
        xs = a * ST * np.cos(P)
        ys = a * ST * np.sin(P)
        zs = a * (1.0 - T)
        grads = _sphere_grad(k.label, ax, xs, ys, zs, a)
        return _reduce(cspec, grads, np.outer(wt * a * a, wp))

    return build


def _spheroid_builder(g, k, cspec, xyz, qs, lmax, edge_delta):
    from .patchmodel import _substitution_nodes

    xi0 = g.xi0
    sgn = -1.0 if g._imag else 1.0
    delta = _edge_delta_for(g, edge_delta)

    def build(n):
        eta, w = _substitution_nodes(g.kind, xi0, delta, n)
        # substitution weights integrate f / sqrt(xi0^2 -+ eta^2); restore dS
        dS = w * g.a ** 2 * math.sqrt(_w2(xi0, g._imag)) * (xi0 * xi0 - sgn * eta * eta)
        if k.label == "eta":
            phi, wp = _phi_nodes(qs.n_phi)
        else:
            phi, wp = np.zeros(1), np.array([2.0 * np.pi])
        E, P = np.meshgrid(eta, phi, indexing="ij")
        grads, _ = _spheroid_axis_grad(g, k.label, xyz, E.ravel(), P.ravel(), lmax)
        grads = grads.reshape(E.shape)
        return _reduce(cspec, grads, np.outer(dS, wp))

    return build


def lambda_quadrature(g: Geometry, k, patch, point, spec: QuadratureSpec = QuadratureSpec(), lmax=None,
                      edge_delta=None) -> LambdaResult:
    """Direct surface integration of the IP or PP geometric factor.

    IP: ``|int grad_k G_sigma dS|^2``.  PP: ``(A/N) int |grad_k G_sigma|^2 dS``.

    Schemes: plane ``s' = z tan u``; hole ``s' = d(1 + e^v)`` near the rim
    (``s' > d(1 + delta)``) and ``s' = 2d/t`` outside; sphere graded panels
    in ``1 - cos(theta')``; spheroids the coefficient substitutions over
    ``eta'`` with the series gradient (``lmax`` terms).  Azimuth uses the
    periodic trapezoid rule.  Node counts are doubled until the relative
    change drops below ``spec.rtol``.
    """
    k = g.check_mode(k)
    patch = _as_patch(patch)
    if patch.regime == "truncated":
        raise ValueError("quadrature covers the closed IP and PP regimes only")
    cspec = CorrelationSpec.of(patch)
    xyz = _check_point(g, point)
    if isinstance(g, InfinitePlane):
        build = _plane_builder(g, k, cspec, xyz, spec)
    elif isinstance(g, HolePlane):
        build = _hole_builder(g, k, cspec, xyz, spec, edge_delta)
    elif isinstance(g, Sphere):
        build = _sphere_builder(g, k, cspec, xyz, spec)
    elif isinstance(g, _Spheroid):
        _axis_xi(g, xyz)
        build = _spheroid_builder(g, k, cspec, xyz, spec, 256 if lmax is None else int(lmax), edge_delta)
    else:
        raise TypeError(f"unsupported geometry {g!r}")
    val, resid, ok = _adaptive(build, spec)
    if not ok:
        warnings.warn(f"quadrature residual {resid:.3g} above {spec.rtol:g}", ConvergenceWarning, stacklevel=2)
    return _result(max(val, 0.0) if patch.regime == "PP" else val, patch, g, k, xyz, "quadrature",
                   residual=resid, converged=ok, lmax=lmax if isinstance(g, _Spheroid) else None)
