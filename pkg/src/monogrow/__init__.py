"""Numerics toolkit for 2-dimensional canonical systems.

Computes monodromy matrices of systems y' = zJH(t)y on compact intervals,
upper and lower bounds for log||W(z)||, exponential-order fits, eigenvalue
counts, and the standard example families (chirps, polygon angles,
sharpness constructions, Cantor-type diagonal systems).
"""

from monogrow.mat2 import (
    SYMPLECTIC_J,
    ScaledMat2,
    frame_norms,
    rotation_distortion,
    spectral_norm,
    unit_direction,
)
from monogrow.hamiltonian import (
    AngleProfile,
    ChirpFn,
    ConstFn,
    ConstantMatrixSpec,
    DiagonalSpec,
    HamburgerSpec,
    PolylineFn,
    PowerFn,
    StepFn,
    cut,
    diagonal_to_profile,
    dump_spec,
    hamburger_from_diagonal,
    load_spec,
    reparameterize,
    total_trace_mass,
)
from monogrow.monodromy import (
    MatrixPolynomial,
    PropagationError,
    max_modulus,
    monodromy_at,
    segment_polynomials,
    transfer_polynomial,
)
from monogrow.upper_bounds import (
    BoundData,
    BoundValue,
    check_order_conditions,
    evaluate_bound,
    modulus_recipe,
    optimize_bound,
)
from monogrow.lower_bounds import (
    LogSeries,
    jump_series,
    liminf_coefficient_bound,
    lower_bound_at,
    lower_rate_report,
)
from monogrow.regvar import (
    PowerLaw,
    PowerLogLaw,
    PowerModulus,
    TableModulus,
    asymptotic_inverse,
    estimate_modulus,
    geometric_mean_ratio,
    growth_envelope,
)
from monogrow.spectrum import (
    OrderFit,
    ZeroIsolationError,
    ZeroSet,
    counting_function,
    cut_zero_count_report,
    eigenvalue_density,
    fit_order,
    zeros_w22,
)
from monogrow.families import (
    PolygonParams,
    SharpnessParams,
    cantor_diagonal,
    chirp_profile,
    polygon_profile,
    sharpness_family,
)
from monogrow.curves import GrowthCurve, RadiusGrid, run_curves

__version__ = "0.1.0"
