"""Numerical toolkit for k-plane transforms in R^n, fractional integrals
with meromorphic continuation to negative orders, and the pointwise
inversion formulas they satisfy on Hoelder-continuous decaying functions.
"""

from .alphaline import (
    ContinuationConfig,
    LimitResult,
    SplitValue,
    r_alpha,
    required_taylor_order,
    split_bracket,
    xplus,
    xplus_at_negative_integer,
    xplus_direct,
    xplus_right_limit,
)
from .errors import (
    ClassViolationError,
    ConfigError,
    DegenerateSampleError,
    DivergenceError,
    KplaneError,
    MissingCoefficientError,
    NegativeIntegerOrderError,
    PoleError,
    StripViolationError,
    TaylorFailureError,
)
from .fields import (
    CatalogEntry,
    ScalarField,
    Smoothness,
    catalog_entries,
    estimate_decay_exponent,
    estimate_hoelder_index,
    gaussian,
    get_field,
    hoelder_cap,
    log_modulus,
    power_decay,
    scale,
    translate,
)
from .inversion import (
    GridSpec,
    InversionReport,
    default_limit_orders,
    dual_laplacian_at,
    invert_hoelder,
    invert_laplacian,
    invert_limit,
    laplacian_commutation_defect,
    laplacian_field,
)
from .radon import (
    KPlane,
    PlaneIntegralOracle,
    backprojection_field,
    dual_composite,
    dual_riesz_defect,
    dual_sampled,
    forward,
    forward_oracle,
    random_frames,
    sinogram_table,
)
from .riesz import (
    RieszRequest,
    beta_identity_check,
    potential_field,
    riesz,
    riesz_many,
    riesz_right_limit,
    riesz_value,
    semigroup_defect,
)
from .specfun import (
    Dimension,
    gamma,
    h_n,
    h_n_reciprocal,
    h_n_residue,
    inversion_constant,
    omega,
    reciprocal_gamma,
)
from .spherical import RadialProfile, SphereRule, combine_profiles, mean_value, profile_of, sphere_rule

__version__ = "0.1.0"
