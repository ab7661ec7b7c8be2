"""Associated Legendre functions and spherical harmonics.

First-kind functions are normalized on [-1, 1]::

    int_{-1}^{1} P_lm(x) P_l'm(x) dx = delta_ll'

and carry the Condon-Shortley phase.  Second-kind functions use the Hobson
convention off the cut, ``Q_l^m(z) = (z^2 - 1)^{m/2} d^m Q_l / dz^m``.

Only ratios ``Q_lm(xi) / Q_lm(xi0)`` ever enter the geometric factor, so the
second-kind machinery works with a real, positive, unnormalized copy of the
minimal solution of the degree recurrence and exposes ratios of it.  The
sequence is anchored at ``l = m`` by::

    real axis:      (xi^2 - 1)^{m/2} int_0^{acoth xi} sinh^{2m}(u) du
    imaginary axis: (xi^2 + 1)^{m/2} int_0^{acot xi}  sin^{2m}(u) du

which equal ``Q_m^m`` up to the constants ``(-2)^m m!`` (real) and a fixed
phase (imaginary).  Higher degrees come from backward recurrence started deep
in the tail (Miller/Gautschi), or from forward recurrence when the ratio of
dominant to minimal solution stays harmless over the requested range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DegreeOrder",
    "legendre_p_norm",
    "legendre_p_table",
    "d_deta_legendre_p",
    "legendre_p_axis_limit",
    "sph_harm",
    "legendre_q",
    "legendre_q_ratio",
    "legendre_q_ratio_imag",
    "d_dxi_legendre_q",
    "QSequence",
    "q_sequence",
]

# Arguments closer than this to a singular endpoint are rejected.
ENDPOINT_GUARD = 1e-12

# Backward recurrence needs about 18 / mu extra terms; beyond this depth the
# argument is so close to the branch point that forward recurrence is both
# cheaper and harmless (growth e^{2 mu l} stays near 1).
_MAX_TAIL = 50000


@dataclass(frozen=True)
class DegreeOrder:
    """Degree ``l >= 0`` and order ``|m| <= l``."""

    l: int
    m: int = 0

    def __post_init__(self):
        if int(self.l) != self.l or int(self.m) != self.m:
            raise ValueError(f"degree and order must be integers, got {self}")
        if self.l < 0 or abs(self.m) > self.l:
            raise ValueError(f"invalid degree/order l={self.l}, m={self.m}")


def _check_lm(l, m):
    DegreeOrder(l, m)
    return int(l), int(m)


# ---------------------------------------------------------------------------
# First kind
# ---------------------------------------------------------------------------

def legendre_p_table(lmax, m, x):
    """Normalized ``P_lm(x)`` for ``l = 0..lmax`` at fixed ``m >= 0``.

    Returns an array of shape ``(lmax + 1,) + x.shape``; rows with ``l < m``
    are zero.  Uses the standard stable three-term recurrence for fully
    normalized functions.
    """
    x = np.asarray(x, dtype=float)
    if m < 0 or lmax < 0:
        raise ValueError("table requires m >= 0 and lmax >= 0")
    if np.any(np.abs(x) > 1.0):
        raise ValueError("legendre_p domain is [-1, 1]")
    out = np.zeros((lmax + 1,) + x.shape)
    if m > lmax:
        return out
    sx = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pmm = np.full(x.shape, 1.0 / math.sqrt(2.0))
    for k in range(1, m + 1):
        pmm = -math.sqrt((2 * k + 1) / (2.0 * k)) * sx * pmm
    out[m] = pmm
    if m + 1 <= lmax:
        out[m + 1] = math.sqrt(2 * m + 3) * x * pmm
    for l in range(m + 2, lmax + 1):
        a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        out[l] = a * (x * out[l - 1] - b * out[l - 2])
    return out


def legendre_p_norm(l, m, x):
    """Normalized associated Legendre function of the first kind.

    Negative orders follow ``P_{l,-m} = (-1)^m P_{lm}``.
    """
    l, m = _check_lm(l, m)
    x = np.asarray(x, dtype=float)
    val = legendre_p_table(l, abs(m), x)[l]
    if m < 0 and m % 2:
        val = -val
    return val if val.ndim else float(val)


def d_deta_legendre_p(l, m, eta):
    """Derivative ``dP_lm/deta`` from the degree-lowering identity.

    ``(1 - x^2) P'_lm = -l x P_lm + sqrt((2l+1)(l^2-m^2)/(2l-1)) P_{l-1,m}``.
    At ``eta = +-1`` only ``m = 0`` is accepted (closed-form endpoint value).
    """
    l, m = _check_lm(l, m)
    am = abs(m)
    eta = np.asarray(eta, dtype=float)
    if np.any(np.abs(eta) > 1.0):
        raise ValueError("legendre_p domain is [-1, 1]")
    near = np.abs(np.abs(eta) - 1.0) < ENDPOINT_GUARD
    if am and np.any(near):
        raise ValueError("derivative with m != 0 is singular at eta = +-1")
    tab = legendre_p_table(l, am, eta)
    num = -l * eta * tab[l]
    if l > am:
        num = num + math.sqrt((2 * l + 1) * (l * l - am * am) / (2 * l - 1.0)) * tab[l - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / (1.0 - eta * eta)
    if np.any(near):
        end = math.sqrt((2 * l + 1) / 2.0) * l * (l + 1) / 2.0
        val = np.where(near, end * np.sign(eta) ** (l + 1), val)
    if m < 0 and am % 2:
        val = -val
    return val if val.ndim else float(val)


def legendre_p_axis_limit(l, m):
    """``lim_{x -> 1-} P_lm(x) / (1 - x^2)^{|m|/2}`` for the normalized function."""
    l, m = _check_lm(l, m)
    am = abs(m)
    # d^m P_l / dx^m at x = 1 is (l+m)! / (2^m m! (l-m)!)
    logd = math.lgamma(l + am + 1) - am * math.log(2.0) - math.lgamma(am + 1) - math.lgamma(l - am + 1)
    lognorm = 0.5 * (math.log(2.0 / (2 * l + 1)) + math.lgamma(l + am + 1) - math.lgamma(l - am + 1))
    val = (-1.0) ** am * math.exp(logd - lognorm)
    if m < 0 and am % 2:
        val = -val
    return val


def sph_harm(l, m, theta, phi):
    """Orthonormal complex spherical harmonic ``Y_lm(theta, phi)``."""
    l, m = _check_lm(l, m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p = legendre_p_table(l, abs(m), np.cos(theta))[l]
    if m < 0 and m % 2:
        p = -p
    val = p * np.exp(1j * m * phi) / math.sqrt(2.0 * math.pi)
    return val if val.ndim else complex(val)


# ---------------------------------------------------------------------------
# Second kind
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _w2(xi, imag):
    # factored form keeps full relative accuracy near xi = 1
    return xi * xi + 1.0 if imag else (xi - 1.0) * (xi + 1.0)


def _anchor(m, xi, imag):
    """Log of the positive anchor ``q_m`` and ``w2^{-m/2} / q_m``.

    With ``U = acoth xi`` (real) or ``acot xi`` (imaginary) and
    ``J = int_0^U (f(u) / f(U))^{2m} du``, ``f = sinh`` or ``sin``, the anchor
    is ``q_m = w2^{-m/2} J``.  The normalized integrand is bounded by one and,
    by concavity of ``log f``, negligible (< e^-40) outside a window of width
    ``tau`` below ``U``; Gauss-Legendre on that window is accurate for any m.
    """
    w2 = _w2(xi, imag)  # xi^2 - 1 (real) or xi^2 + 1 (imaginary)
    upper = math.atan2(1.0, xi) if imag else 0.5 * math.log1p(2.0 / (xi - 1.0))
    if m == 0:
        j = upper
    else:
        # cot U = coth U = xi; sin has curvature <= -1 in log, which bounds
        # the window near xi = 0 where the slope bound degenerates
        if imag:
            tau = -xi + math.sqrt(xi * xi + 40.0 / m)
        else:
            tau = 20.0 / (m * xi)
        lo = max(0.0, upper - tau)
        t, w = _gauss_legendre(96)
        u = lo + 0.5 * (upper - lo) * (t + 1.0)
        f = np.sin(u) if imag else np.sinh(u)
        f = f * math.sqrt(w2)  # f(U) = w2^{-1/2}
        j = 0.5 * (upper - lo) * float(np.dot(w, f ** (2 * m)))
    log_q = math.log(j) - 0.5 * m * math.log(w2)
    return log_q, 1.0 / j


@dataclass(frozen=True)
class QSequence:
    """Unnormalized second-kind sequence ``q_l``, ``l = m..lmax``, at one argument.

    ``log_q[k]`` is ``log q_{m+k}``; ``dlog[k]`` is ``q'_{m+k} / q_{m+k}``
    (derivative with respect to the real coordinate xi).
    """

    m: int
    lmax: int
    xi: float
    imag: bool
    log_q: np.ndarray
    dlog: np.ndarray
    method: str

    def log_at(self, l):
        return self.log_q[l - self.m]


def _mu(xi, imag):
    return math.asinh(xi) if imag else math.acosh(xi)


@lru_cache(maxsize=4096)
def _q_sequence_cached(lmax, m, xi, imag):
    return _q_sequence(lmax, m, xi, imag)


def q_sequence(lmax, m, xi, imag=False):
    """Second-kind sequence for fixed order on the real (xi > 1) or imaginary axis.

    The real case satisfies
    ``(l-m+1) q_{l+1} = (2l+1) xi q_l - (l+m) q_{l-1}``; on the imaginary
    axis ``q_l(xi)`` is ``Q_l^m(i xi)`` stripped of its constant phase and obeys
    ``(l-m+1) q_{l+1} = (l+m) q_{l-1} - (2l+1) xi q_l``.  In both cases
    ``q'_l = (l xi q_l - (l+m) q_{l-1}) / (xi^2 -+ 1)``.
    """
    return _q_sequence_cached(int(lmax), int(m), float(xi), bool(imag))


def _q_sequence(lmax, m, xi, imag):
    if m < 0 or lmax < m:
        raise ValueError("q_sequence requires 0 <= m <= lmax")
    xi = float(xi)
    if imag:
        if xi < 0:
            raise ValueError("imaginary-axis argument must be >= 0")
    elif not xi > 1.0 + ENDPOINT_GUARD:
        raise ValueError("second-kind Legendre functions require xi > 1 (logarithmic singularity at 1)")
    w2 = _w2(xi, imag)
    log_q0, inv_j = _anchor(m, xi, imag)
    n = lmax - m + 1
    # r[k] = q_{m+k} / q_{m+k-1}, k = 1..n-1
    r = np.empty(n)
    mu = _mu(xi, imag)
    depth = int(math.ceil(18.0 / mu)) + 10 if mu > 0 else _MAX_TAIL + 1
    if depth > _MAX_TAIL:
        method = "forward"
        # ratios only; the seed follows from q'_m = (m xi q_m - w2^{-m/2}) / w2
        # together with the derivative identity at l = m + 1
        if n > 1:
            r[1] = (inv_j - (2 * m + 1) * xi) if imag else ((2 * m + 1) * xi - inv_j)
        for k in range(2, n):
            l = m + k - 1
            if imag:
                r[k] = ((l + m) / r[k - 1] - (2 * l + 1) * xi) / (l - m + 1)
            else:
                r[k] = ((2 * l + 1) * xi - (l + m) / r[k - 1]) / (l - m + 1)
    else:
        method = "backward"
        top = lmax + depth
        t = (math.sqrt(xi * xi + 1.0) - xi) if imag else (xi - math.sqrt(_w2(xi, False)))
        rr = t
        for l in range(top, m, -1):
            if imag:
                rr = (l + m) / ((2 * l + 1) * xi + (l - m + 1) * rr)
            else:
                rr = (l + m) / ((2 * l + 1) * xi - (l - m + 1) * rr)
            if l <= lmax:
                r[l - m] = rr
    log_q = np.empty(n)
    log_q[0] = log_q0
    if n > 1:
        log_q[1:] = log_q[0] + np.cumsum(np.log(r[1:]))
    dlog = np.empty(n)
    dlog[0] = (m * xi - inv_j) / w2
    if n > 1:
        ls = np.arange(m + 1, lmax + 1, dtype=float)
        dlog[1:] = (ls * xi - (ls + m) / r[1:]) / w2
    for arr in (log_q, dlog):
        arr.setflags(write=False)
    return QSequence(m, lmax, xi, imag, log_q, dlog, method)


def legendre_q(l, m, xi):
    """Hobson ``Q_l^m(xi)`` for real ``xi > 1``.

    Values decay like ``xi^{-(l+1)}`` and underflow to zero for very large
    degree/argument; use :func:`legendre_q_ratio` when only ratios matter.
    """
    l, m = _check_lm(l, m)
    am = abs(m)
    seq = q_sequence(l, am, xi)
    const = (-2.0) ** am * math.factorial(am)
    val = const * math.exp(seq.log_at(l))
    if m < 0:
        # Q_l^{-m} = (l-m)!/(l+m)! Q_l^m off the cut (Hobson)
        val *= math.exp(math.lgamma(l - am + 1) - math.lgamma(l + am + 1))
    return val


def d_dxi_legendre_q(l, m, xi):
    """``d Q_l^m / d xi`` on the real axis via the derivative identity."""
    l, m = _check_lm(l, m)
    am = abs(m)
    seq = q_sequence(l, am, xi)
    return legendre_q(l, m, xi) * seq.dlog[l - am]


def legendre_q_ratio(l, m, xi, xi0):
    """``Q_lm(xi) / Q_lm(xi0)`` for real ``xi, xi0 > 1`` (convention-free)."""
    l, m = _check_lm(l, m)
    am = abs(m)
    a = q_sequence(l, am, xi)
    b = q_sequence(l, am, xi0)
    return math.exp(a.log_at(l) - b.log_at(l))


def legendre_q_ratio_imag(l, m, xi, xi0):
    """``Q_lm(i xi) / Q_lm(i xi0)`` for ``xi, xi0 >= 0``; always real."""
    l, m = _check_lm(l, m)
    if xi < 0 or xi0 < 0:
        raise ValueError("imaginary-axis arguments must be >= 0")
    am = abs(m)
    a = q_sequence(l, am, xi, imag=True)
    b = q_sequence(l, am, xi0, imag=True)
    return math.exp(a.log_at(l) - b.log_at(l))
