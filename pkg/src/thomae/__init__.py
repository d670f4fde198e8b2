"""Hyperelliptic curves with real branch points: period matrices, theta
constants with characteristics, exact derivative theta constants, and a
verification suite for the branch-point identities that tie them together.
"""

from .characteristics import (
    Characteristic,
    Partition,
    branch_point_characteristic,
    enumerate_partitions,
    half_period,
    make_partition,
    parity,
    partition_characteristic,
    riemann_constant_characteristic,
)
from .curve import (
    Curve,
    eval_f,
    first_kind_integrand,
    make_curve,
    second_kind_integrand,
)
from .errors import (
    AtBranchPoint,
    BadKSize,
    DegenerateCurve,
    EvenCount,
    KNotInJ,
    LegendreCheckFailed,
    MultiplicityOutOfRange,
    PathThroughBranchPoint,
    QuadratureNotConverged,
    RepeatedSupport,
    SmallDenominator,
    SpecialDivisor,
    TauNotSiegel,
    ThomaeError,
    WrongMultiplicity,
)
from .formulas import (
    bolza_symmetric,
    curve_constant,
    elementary_symmetric,
    first_thomae_rhs,
    general_thomae_rhs,
    s_matrix,
    s_tensor,
    second_thomae_rhs,
    theta_product_rhs,
    vandermonde,
)
from .homology import HomologyBasis, PathSegment, build_homology
from .periods import (
    PeriodMatrices,
    abel_jacobian,
    abel_map,
    load_period_cache,
    period_matrices,
    save_period_cache,
    segment_integrals,
)
from .samples import named_branch_points, named_curve
from .theta import (
    DerivativeTensor,
    ThetaContext,
    derivative_theta_constants,
    kernel_backend,
    sigma_at_halfperiod,
    theta,
    theta_char,
    theta_derivative,
    to_u_basis,
)
from .verify import SuiteConfig, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
