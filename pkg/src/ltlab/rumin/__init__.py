"""Momentum-decomposition functional: evaluation, optimization and bounds."""
from ltlab.rumin.functional import (
    QuadratureSpec,
    RuminResult,
    RuminTrial,
    defect,
    inner_mean,
    kinetic_bound_ratio,
    normalize_f,
    rescaled_phi,
    rumin_functional,
)
from ltlab.rumin.profiles import (
    ExponentialProfile,
    IndicatorProfile,
    PowerDecayProfile,
    PowerWindowProfile,
    Profile,
    ScaledProfile,
    TabulatedProfile,
    WindowProfile,
)
from ltlab.semiclassics import bessel_window_constant
