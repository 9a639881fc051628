"""Local harmonic analysis on Gaussian measure spaces, at desk scale.

Admissible-ball geometry, grid quadrature, local Muckenhoupt-type weight
constants, local maximal operators and fractional integrals (plain,
shifted multilinear, and rough-kernel), and a verification layer that
checks the pointwise inequalities exactly and the weighted norm bounds
empirically.
"""

from .errors import (
    BallOutsideDomain,
    ConfigError,
    ExponentMismatch,
    GaussLocalError,
    NoEpsilonFound,
    NonPositiveWeight,
    NumericalFailure,
    PointOutsideBall,
    TestingConditionFailed,
)
from .geometry import (
    AdmissibleBall,
    GaussianSpace,
    RadialMeasureProfile,
    admissibility_m,
    ball_measure_mc,
    check_halo,
    doubling_band,
    doubling_ratio,
    gaussian_ball_measure,
    halo_bounds,
    radial_profile,
)
from .gridfn import (
    GridFunction,
    LambdaGrid,
    integrate_gaussian,
    load_grid_function,
    save_grid_function,
    weak_quasinorm,
    weighted_norm,
)
from .operators import (
    ShiftVector,
    SphereKernel,
    fractional_integral_equivalence_band,
    fractional_integral_gaussian,
    fractional_integral_radial,
    fractional_maximal,
    local_maximal,
    maximal_field,
    measure_maximal,
    multilinear_fractional_integral,
    multilinear_maximal,
    order_s_maximal,
    rough_fractional_integral,
    rough_fractional_maximal,
    rough_maximal_chain_constant,
    sphere_norm,
    unit_kernel,
)
from .verify import (
    InequalityReport,
    NormExperiment,
    check_multilinear_maximal_domination,
    check_rough_integral_interpolation,
    check_shift_family_holder,
    check_testing_condition,
    rough_norm_experiment,
    shift_family_norm_experiment,
    strong_type_experiment,
    weak_type_experiment,
)
from .weights import (
    FractionalParams,
    Weight,
    WeightVector,
    apa_constant,
    apqa_constant,
    ball_sampler,
    epsilon_finder,
    five_condition_ratio,
    multi_apa_constant,
    power_weight,
    reverse_holder_check,
    theorem_crosscheck,
)

__version__ = "0.1.0"
