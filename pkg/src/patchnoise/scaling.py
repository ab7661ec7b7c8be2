"""Scaling exponent ``alpha = -d ln(Lambda) / d ln(d)`` and distance sweeps.

The dimensionless distance ``D`` is measured from a fixed reference point
along a fixed direction, per geometry:

=============  ==========================  ================================
geometry       field point                 normalization of ``D``
=============  ==========================  ================================
plane          ``z = D``                   unit length
hole           aperture centre             hole radius ``d_hole = D``
sphere         ``r = a (1 + D)`` on axis   sphere radius ``a``
prolate        ``z = a xi0 + D rho_eq``    equatorial radius ``a sqrt(xi0^2 - 1)``
oblate/disc    ``z = a xi0 + D rho_eq``    equatorial radius ``a sqrt(xi0^2 + 1)``
=============  ==========================  ================================
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .geometry import Geometry, HolePlane, InfinitePlane, Sphere, _Spheroid
from .geofactor import (
    LambdaResult,
    NoClosedForm,
    QuadratureSpec,
    lambda_closed,
    lambda_quadrature,
    lambda_spectral,
)
from .patchmodel import PatchModel

__all__ = [
    "LogOfZeroError",
    "AlphaCurve",
    "distance_scale",
    "reference_setup",
    "lambda_at",
    "alpha_at",
    "alpha_from_function",
    "sweep_alpha",
    "default_threads",
]

DEFAULT_H = 0.05
BACKENDS = ("auto", "closed", "spectral", "quadrature")


class LogOfZeroError(ArithmeticError):
    """Lambda vanished (or went negative) at a stencil point."""


def distance_scale(g: Geometry) -> float:
    """Length that makes the distance dimensionless."""
    if isinstance(g, _Spheroid):
        return g.equatorial_radius
    if isinstance(g, Sphere):
        return g.a
    return 1.0


def reference_setup(g: Geometry, D: float) -> Tuple[Geometry, Tuple[float, float, float]]:
    """Geometry and Cartesian field point for the dimensionless distance ``D``."""
    if not D > 0:
        raise ValueError("D must be positive")
    if isinstance(g, HolePlane):
        return HolePlane(d_hole=float(D)), (0.0, 0.0, 0.0)
    if isinstance(g, InfinitePlane):
        return g, (0.0, 0.0, float(D))
    if isinstance(g, Sphere):
        return g, (0.0, 0.0, g.a * (1.0 + D))
    if isinstance(g, _Spheroid):
        return g, (0.0, 0.0, g.a * g.xi0 + D * g.equatorial_radius)
    raise TypeError(f"unsupported geometry {g!r}")


def lambda_at(g: Geometry, k, patch, D: float, backend: str = "auto", lmax: Optional[int] = None,
              edge_delta: Optional[float] = None, quadrature: QuadratureSpec = QuadratureSpec(),
              rtol: float = 1e-8) -> LambdaResult:
    """Lambda at dimensionless distance ``D`` with the selected backend.

    ``backend="auto"`` takes the closed form when one exists, else the
    spectral sum, else quadrature.
    """
    patch = patch if isinstance(patch, PatchModel) else PatchModel.parse(patch)
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    gg, pt = reference_setup(g, D)
    if backend in ("auto", "closed"):
        try:
            return lambda_closed(gg, k, patch, pt, edge_delta=edge_delta)
        except NoClosedForm:
            if backend == "closed":
                raise
    if backend in ("auto", "spectral"):
        try:
            return lambda_spectral(gg, k, patch, pt, lmax=lmax, rtol=rtol, edge_delta=edge_delta)
        except NoClosedForm:
            if backend == "spectral":
                raise
    return lambda_quadrature(gg, k, patch, pt, spec=quadrature, lmax=lmax, edge_delta=edge_delta)


def alpha_from_function(fun, D: float, h: float = DEFAULT_H, richardson: int = 0) -> float:
    """``-d ln f / d ln D`` by central differences in ``ln D``.

    Parameters
    ----------
    fun : callable
        ``D -> Lambda`` (positive).
    h : float
        Log step in ``(0, 0.2]``.
    richardson : int
        Number of Richardson levels; each halves ``h`` and removes the
        next even power of the step.  Exact for pure power laws at any level.
    """
    if not 0 < h <= 0.2:
        raise ValueError("h must lie in (0, 0.2]")

    def logf(x):
        v = float(fun(x))
        if not v > 0 or not math.isfinite(v):
            raise LogOfZeroError(f"log of zero: Lambda = {v!r} at D = {x:.6g}")
        return math.log(v)

    def cd(step):
        return -(logf(D * math.exp(step)) - logf(D * math.exp(-step))) / (2.0 * step)

    table = [cd(h / 2 ** j) for j in range(richardson + 1)]
    for lev in range(1, richardson + 1):
        f = 4.0 ** lev
        table = [(f * table[j + 1] - table[j]) / (f - 1.0) for j in range(len(table) - 1)]
    return table[0]


def alpha_at(g: Geometry, k, patch, D: float, h: float = DEFAULT_H, richardson: int = 0, backend: str = "auto",
             lmax: Optional[int] = None, edge_delta: Optional[float] = None,
             quadrature: QuadratureSpec = QuadratureSpec(), rtol: float = 1e-8) -> float:
    """Scaling exponent of Lambda at dimensionless distance ``D``.

    Raises
    ------
    LogOfZeroError
        If Lambda is not strictly positive at a stencil point (e.g. any IP
        mode of an infinite plane).
    """
    patch = patch if isinstance(patch, PatchModel) else PatchModel.parse(patch)

    def fun(x):
        return lambda_at(g, k, patch, x, backend, lmax, edge_delta, quadrature, rtol).value

    return alpha_from_function(fun, D, h, richardson)


@dataclass(frozen=True)
class AlphaCurve:
    """``alpha`` (and ``Lambda``) sampled on an increasing grid of ``D``."""

    D: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray
    geometry: str
    mode: str
    patch: str
    backend: str
    h: float
    normalization: float = 1.0
    reference: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    direction: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    converged: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.D)
        if d.ndim != 1 or np.any(np.diff(d) <= 0):
            raise ValueError("D must be strictly increasing")

    @property
    def samples(self):
        return list(zip(self.D.tolist(), self.alpha.tolist()))


def default_threads() -> int:
    env = os.environ.get("PATCHNOISE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError("PATCHNOISE_THREADS must be an integer") from None
        return max(1, n)
    return min(8, os.cpu_count() or 1)


def _reference(g):
    if isinstance(g, _Spheroid):
        return (0.0, 0.0, g.a * g.xi0)
    if isinstance(g, Sphere):
        return (0.0, 0.0, g.a)
    return (0.0, 0.0, 0.0)


def sweep_alpha(g: Geometry, k, patches: Sequence, grid, h: float = DEFAULT_H, richardson: int = 0,
                backend: str = "auto", lmax: Optional[int] = None, edge_delta: Optional[float] = None,
                threads: Optional[int] = None, quadrature: QuadratureSpec = QuadratureSpec(), rtol: float = 1e-8):
    """One :class:`AlphaCurve` per patch model over the grid of ``D``.

    Grid points are evaluated concurrently (``threads``, default from
    ``PATCHNOISE_THREADS``); results are assembled in grid order so output
    does not depend on the degree of parallelism.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise ValueError("grid must be a strictly increasing positive sequence of at least two points")
    patches = [p if isinstance(p, PatchModel) else PatchModel.parse(p) for p in patches]
    k_label = g.check_mode(k).label
    threads = default_threads() if threads is None else max(1, int(threads))
    jobs = [(p, D) for p in patches for D in grid]

    def work(job):
        p, D = job
        res = lambda_at(g, k, p, D, backend, lmax, edge_delta, quadrature, rtol)
        a = alpha_at(g, k, p, D, h, richardson, backend, lmax, edge_delta, quadrature, rtol)
        return res, a

    if threads == 1:
        out = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(work, jobs))
    curves = []
    n = grid.size
    for i, p in enumerate(patches):
        chunk = out[i * n : (i + 1) * n]
        curves.append(AlphaCurve(
            D=grid.copy(),
            alpha=np.array([a for _, a in chunk]),
            lam=np.array([r.value for r, _ in chunk]),
            geometry=g.kind,
            mode=k_label,
            patch=p.label,
            backend=chunk[0][0].backend,
            h=h,
            normalization=distance_scale(g),
            reference=_reference(g),
            converged=np.array([r.converged for r, _ in chunk]),
            meta={"richardson": richardson, "lmax": lmax, "edge_delta": edge_delta},
        ))
    return curves
