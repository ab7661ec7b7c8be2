"""Patch-potential electric-field noise near electrodes of finite geometry.

Geometric factors ``Lambda_k`` for planes, hole traps, spheres and
spheroids (needles, discs), their distance-scaling exponents, and the
conversion to field-noise spectra and ion heating rates.
"""

from .geometry import (
    ConvergenceWarning,
    DomainError,
    FieldMode,
    FieldPoint,
    HolePlane,
    InfinitePlane,
    OblateSpheroid,
    ProlateSpheroid,
    ProximityError,
    SourcePoint,
    Sphere,
    axis_point,
    disc,
    field_mode,
    grad_surface_green,
    needle,
    surface_green,
)
from .patchmodel import (
    CorrelationSpec,
    PatchModel,
    coeff_decay_check,
    coeff_sphere,
    coeff_spheroid,
    coefficient_table,
    correlation,
)
from .geofactor import (
    EdgeSingularityError,
    LambdaResult,
    NoClosedForm,
    QuadratureSpec,
    lambda_closed,
    lambda_quadrature,
    lambda_spectral,
)
from .scaling import AlphaCurve, LogOfZeroError, alpha_at, lambda_at, sweep_alpha
from .noise import IonParams, NoiseSpectrumModel, heating_rate, spectral_density, validity_check_rf

__version__ = "0.1.0"
