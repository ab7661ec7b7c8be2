"""Patch correlation models and eigenfunction expansion coefficients.

Two closed correlation regimes bracket all patch sizes: the infinite patch
(IP, the whole surface fluctuates as one) and the point patch (PP,
uncorrelated points).  Finite patches of angular radius ``theta_zeta`` are
modelled by truncating the PP eigenfunction expansion at ``l0 = 2/theta_zeta``
(``l <= l0`` on the sphere, ``l + l' <= 2 l0`` on spheroids).

Spheroid coefficients::

    c_{ll'm} = A/N int P_lm(eta) P_l'm(eta) / sqrt(xi0^2 -+ eta^2) d eta

(minus: prolate, plus: oblate) are evaluated with a substitution that
removes the weight: ``eta = xi0 sin t`` (prolate), ``eta = xi0 sinh t``
(oblate) and ``eta = +-e^t`` on ``delta < |eta| < 1`` for the disc.
"""

from __future__ import annotations

import csv
import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import specfun
from .geometry import ConvergenceWarning

__all__ = [
    "PatchModel",
    "CorrelationSpec",
    "PointPatchDelta",
    "PointwiseDeltaError",
    "correlation",
    "coeff_sphere",
    "coeff_spheroid",
    "CoefficientTable",
    "coefficient_table",
    "DecayFit",
    "coeff_decay_check",
    "DEFAULT_EDGE_DELTA",
]

DEFAULT_EDGE_DELTA = 0.1
_COEFF_TOL = 1e-10


def l0_from_theta(theta_zeta: float) -> int:
    """Truncation degree ``l0 = 2 / theta_zeta`` rounded to the nearest integer."""
    if not theta_zeta > 0:
        raise ValueError("theta_zeta must be positive")
    return max(1, int(round(2.0 / theta_zeta)))


@dataclass(frozen=True)
class PatchModel:
    """Correlation regime used for a geometric factor.

    Parameters
    ----------
    regime : {"IP", "PP", "truncated"}
    l0 : int, optional
        Truncation degree (``truncated`` only).  Derived from ``theta_zeta``
        when omitted.
    theta_zeta : float, optional
        Angular patch radius.
    area_ratio : float
        The factor A/N multiplying PP and truncated results.
    attenuation : callable, optional
        Spectral weight ``a(l)``; the ``(l, l')`` term of an expansion is
        multiplied by ``a(l) a(l')`` on top of the sharp cutoff.
    """

    regime: str
    l0: Optional[int] = None
    theta_zeta: Optional[float] = None
    area_ratio: float = 1.0
    attenuation: Optional[Callable[[int], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.regime not in ("IP", "PP", "truncated"):
            raise ValueError(f"unknown patch regime {self.regime!r}")
        if not self.area_ratio > 0:
            raise ValueError("A/N must be positive")
        if self.regime == "truncated":
            if self.l0 is None:
                if self.theta_zeta is None:
                    raise ValueError("truncated patch model needs l0 or theta_zeta")
                object.__setattr__(self, "l0", l0_from_theta(self.theta_zeta))
            if int(self.l0) != self.l0 or self.l0 < 0:
                raise ValueError("l0 must be a non-negative integer")
            object.__setattr__(self, "l0", int(self.l0))

    @classmethod
    def infinite(cls):
        return cls("IP")

    @classmethod
    def point(cls, area_ratio=1.0):
        return cls("PP", area_ratio=area_ratio)

    @classmethod
    def truncated(cls, l0=None, theta_zeta=None, area_ratio=1.0, attenuation=None):
        return cls("truncated", l0=l0, theta_zeta=theta_zeta, area_ratio=area_ratio, attenuation=attenuation)

    @classmethod
    def parse(cls, text, area_ratio=1.0):
        """Build from ``"IP"``, ``"PP"``, ``"theta=0.1"`` or ``"l0=20"``."""
        t = str(text).strip()
        if t.upper() in ("IP", "PP"):
            return cls(t.upper(), area_ratio=area_ratio)
        key, _, val = t.partition("=")
        key = key.strip().lower()
        if key in ("theta", "theta_zeta", "thetazeta"):
            return cls.truncated(theta_zeta=float(val), area_ratio=area_ratio)
        if key == "l0":
            return cls.truncated(l0=int(val), area_ratio=area_ratio)
        raise ValueError(f"cannot parse patch model {text!r}")

    @property
    def label(self) -> str:
        if self.regime != "truncated":
            return self.regime
        if self.theta_zeta is not None:
            return f"theta={self.theta_zeta:g}"
        return f"l0={self.l0}"

    @property
    def uses_area_ratio(self) -> bool:
        return self.regime != "IP"

    def weight(self, l):
        if self.attenuation is None:
            return np.ones(np.shape(l))
        return np.array([float(self.attenuation(int(v))) for v in np.ravel(l)]).reshape(np.shape(l))


# ---------------------------------------------------------------------------
# Correlation functions
# ---------------------------------------------------------------------------

class PointwiseDeltaError(RuntimeError):
    """A point-patch delta function was evaluated outside an integral."""


@dataclass(frozen=True)
class PointPatchDelta:
    """Symbolic ``(A/N) delta^2(r1 - r2)`` restricted to the surface.

    It only has meaning under a double surface integral, which it collapses
    to a single one: ``int int C F(r1) F(r2) = (A/N) int F^2``.
    """

    area_ratio: float = 1.0

    def reduce(self, values, weights):
        values = np.asarray(values)
        return self.area_ratio * float(np.sum(np.asarray(weights) * np.abs(values) ** 2))

    def __float__(self):
        raise PointwiseDeltaError("the point-patch correlation has no pointwise value; use reduce()")

    def __array__(self, *args, **kwargs):
        raise PointwiseDeltaError("the point-patch correlation has no pointwise value; use reduce()")


@dataclass(frozen=True)
class CorrelationSpec:
    """One of the closed regimes with its normalization constant."""

    regime: str
    area_ratio: float = 1.0

    def __post_init__(self):
        if self.regime not in ("IP", "PP"):
            raise ValueError("closed correlation regimes are 'IP' and 'PP'")
        if not self.area_ratio > 0:
            raise ValueError("A/N must be positive")

    def normalization(self, area):
        """``int int C = A^2 / N``; for IP the whole surface is one patch."""
        if self.regime == "IP":
            return float(area) ** 2
        return float(area) * self.area_ratio

    @classmethod
    def of(cls, patch: PatchModel):
        if patch.regime == "truncated":
            raise ValueError("a truncated expansion has no closed correlation function")
        return cls(patch.regime, patch.area_ratio)


def correlation(spec: CorrelationSpec, r1=None, r2=None):
    """``C(r1, r2)``: 1 for IP; a :class:`PointPatchDelta` for PP."""
    if spec.regime == "IP":
        return 1.0
    return PointPatchDelta(spec.area_ratio)


def coeff_sphere(regime, lo, lo2, area_ratio=1.0):
    """Expansion coefficient ``c_ij`` on the unit sphere.

    With exterior eigenfunctions ``Y_lm / r^{l+1}`` the surface projections
    are ``int Y_lm d Omega = sqrt(4 pi) delta_{l0}`` and
    ``int Y_i Y_j^* d Omega = delta_ij``.
    """
    i = lo if isinstance(lo, specfun.DegreeOrder) else specfun.DegreeOrder(*lo)
    j = lo2 if isinstance(lo2, specfun.DegreeOrder) else specfun.DegreeOrder(*lo2)
    regime = regime.regime if isinstance(regime, PatchModel) else str(regime)
    if regime == "IP":
        return 4.0 * math.pi if (i.l == 0 and j.l == 0) else 0.0
    if regime in ("PP", "truncated"):
        return float(area_ratio) if (i.l, i.m) == (j.l, j.m) else 0.0
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Spheroid coefficient tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientTable:
    """``c_{ll'm}`` for ``m <= l, l' <= lmax`` (A/N = 1), read-only."""

    kind: str
    m: int
    xi0: float
    edge_delta: float
    lmax: int
    values: np.ndarray  # (lmax+1, lmax+1); rows/cols below m are zero
    residual: np.ndarray
    nodes: int

    def __getitem__(self, key):
        l, lp = key
        if not (self.m <= l <= self.lmax and self.m <= lp <= self.lmax):
            raise IndexError(f"({l}, {lp}) outside table range [{self.m}, {self.lmax}]")
        return float(self.values[l, lp])

    @property
    def max_residual(self) -> float:
        return float(self.residual.max()) if self.residual.size else 0.0

    def to_csv(self, path):
        """Write ``l, l', m, value, residual`` rows (upper triangle included)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["l", "l'", "m", "value", "residual"])
            for l in range(self.m, self.lmax + 1):
                for lp in range(self.m, self.lmax + 1):
                    w.writerow([l, lp, self.m, f"{self.values[l, lp]:.17g}", f"{self.residual[l, lp]:.3g}"])


def _substitution_nodes(kind, xi0, edge_delta, n):
    """Nodes ``eta`` and weights for ``int f(eta) / sqrt(xi0^2 -+ eta^2) d eta``."""
    t, w = specfun._gauss_legendre(n)
    if kind == "prolate":
        top = math.asin(1.0 / xi0)
        th = top * t
        return xi0 * np.sin(th), top * w
    if kind != "oblate":
        raise ValueError("kind must be 'prolate' or 'oblate'")
    if xi0 > 0:
        top = math.asinh(1.0 / xi0)
        u = top * t
        return xi0 * np.sinh(u), top * w
    if not edge_delta > 0:
        raise ValueError("the disc (xi0 = 0) needs edge_delta > 0: the rim weight 1/|eta| is not integrable")
    # eta = +-exp(u), u in [ln delta, 0], panels of unit width in u
    lo = math.log(edge_delta)
    npan = max(1, int(math.ceil(-lo)))
    edges = np.linspace(lo, 0.0, npan + 1)
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        us.append(0.5 * (b - a) * (t + 1.0) + a)
        ws.append(0.5 * (b - a) * w)
    u = np.concatenate(us)
    wu = np.concatenate(ws)
    eta = np.exp(u)
    return np.concatenate([-eta[::-1], eta]), np.concatenate([wu[::-1], wu])


def _table_values(kind, m, xi0, edge_delta, lmax, n):
    eta, w = _substitution_nodes(kind, xi0, edge_delta, n)
    p = specfun.legendre_p_table(lmax, m, eta)
    return (p * w) @ p.T


_TABLES = {}
_TABLE_LOCK = threading.Lock()


def _bucket(lmax):
    return max(32, 32 * int(math.ceil(lmax / 32.0)))


def _nodes_for(kind, xi0, lmax):
    n = 2 * lmax + 64
    if kind == "oblate" and xi0 > 0:
        # the sinh map stretches the interval by asinh(1/xi0)
        n = int(n * max(1.0, math.asinh(1.0 / xi0) / 2.0))
    return n


def coefficient_table(kind, m, xi0, lmax, edge_delta=0.0) -> CoefficientTable:
    """Cached coefficient table covering degrees up to ``lmax``.

    Tables are built at ``lmax`` rounded up to a multiple of 32 so that any
    request returns bit-identical values regardless of call order.  The
    residual is the change under doubling of the quadrature order.
    """
    m = int(m)
    if m < 0:
        raise ValueError("order must be non-negative")
    xi0 = float(xi0)
    if kind == "prolate" and not xi0 > 1.0:
        raise ValueError("prolate coefficients need xi0 > 1")
    if kind == "oblate" and xi0 < 0:
        raise ValueError("oblate coefficients need xi0 >= 0")
    delta = float(edge_delta) if (kind == "oblate" and xi0 == 0.0) else 0.0
    if kind == "oblate" and xi0 == 0.0 and not 0.0 < delta < 0.5:
        raise ValueError("disc coefficients need 0 < edge_delta < 0.5")
    lb = _bucket(max(int(lmax), m))
    key = (kind, m, xi0, delta, lb)
    with _TABLE_LOCK:
        tab = _TABLES.get(key)
    if tab is not None:
        return tab
    n = _nodes_for(kind, xi0, lb)
    v1 = _table_values(kind, m, xi0, delta, lb, n)
    v2 = _table_values(kind, m, xi0, delta, lb, 2 * n)
    v2 = 0.5 * (v2 + v2.T)  # symmetric by construction; remove rounding asymmetry
    resid = np.abs(v2 - v1)
    for arr in (v2, resid):
        arr.setflags(write=False)
    tab = CoefficientTable(kind, m, xi0, delta, lb, v2, resid, 2 * n)
    with _TABLE_LOCK:
        tab = _TABLES.setdefault(key, tab)
    return tab


def coeff_spheroid(kind, l, lp, m, xi0, edge_delta=0.0, area_ratio=1.0, full_output=False):
    """Single spheroid coefficient ``c_{ll'm}`` (see module docstring).

    ``edge_delta`` restricts the disc (oblate, ``xi0 = 0``) integral to
    ``delta < |eta| < 1`` and is ignored otherwise.  With ``full_output``
    the quadrature residual is returned as well.
    """
    specfun.DegreeOrder(l, m)
    specfun.DegreeOrder(lp, m)
    am = abs(int(m))
    tab = coefficient_table(kind, am, xi0, max(l, lp), edge_delta)
    val = area_ratio * tab[l, lp]
    res = float(tab.residual[l, lp])
    if res > _COEFF_TOL:
        warnings.warn(f"coefficient quadrature residual {res:.3g}", ConvergenceWarning, stacklevel=2)
    if full_output:
        return val, res
    return val


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit ``log|c| = const - rate |l - l'|`` at fixed ``l + l'``."""

    rate: float
    target: float
    l_sum: int
    separations: np.ndarray
    log_abs: np.ndarray

    @property
    def relative_error(self):
        return abs(self.rate - self.target) / self.target


def coeff_decay_check(kind, m, xi0, l_range=20, l_sum=None) -> DecayFit:
    """Fit the decay of ``|c_{ll'm}|`` with ``|l - l'|`` at fixed ``l + l'``.

    Parameters
    ----------
    kind : {"prolate"}
    m : int
    xi0 : float
    l_range : int
        Largest separation ``|l - l'|`` included.
    l_sum : int, optional
        The fixed ``l + l'``; defaults to ``4 * l_range`` (rounded to the
        parity that gives non-zero coefficients).

    Returns
    -------
    DecayFit
        ``target`` is ``sqrt(xi0^2 - 1) / xi0``.
    """
    if kind != "prolate":
        raise ValueError("the decay law is stated for prolate spheroids")
    l_range = int(l_range)
    if l_sum is None:
        l_sum = 4 * l_range
    l_sum = int(l_sum)
    if (l_sum - 2 * m) < l_range:
        raise ValueError("l_sum too small for the requested separations")
    seps, vals = [], []
    tab = coefficient_table(kind, m, xi0, (l_sum + l_range) // 2 + 1)
    for sep in range(0, l_range + 1):
        if (l_sum + sep) % 2:
            continue
        l = (l_sum + sep) // 2
        lp = l_sum - l
        if lp < m:
            continue
        c = tab[l, lp]
        if c != 0.0 and abs(c) > tab.residual[l, lp]:
            seps.append(sep)
            vals.append(math.log(abs(c)))
    if len(seps) < 3:
        raise ValueError("insufficient nonzero coefficients for a decay fit")
    seps = np.array(seps, dtype=float)
    vals = np.array(vals)
    slope = np.polyfit(seps, vals, 1)[0]
    target = math.sqrt((xi0 - 1.0) * (xi0 + 1.0)) / xi0
    return DecayFit(-float(slope), target, l_sum, seps, vals)
