"""Numerical verification of Jensen-type operator inequalities for convex,
not necessarily operator convex, functions."""
from .constants import (
    CorrectionConstants,
    OptOptions,
    SphereOptResult,
    brute_force_quartic_dim2,
    compute_beta,
    compute_choi_delta,
    compute_delta,
    compute_zeta,
    maximize_quartic_form,
)
from .errors import (
    DimensionError,
    DomainError,
    NumericalError,
    OpJensenError,
    PositivityError,
    ValidationError,
)
from .instances import GeneratorSpec, generate_instance, load_instance, save_instance
from .matcore import (
    Interval,
    SpectralInterval,
    apply_function,
    hermitian,
    inv_sqrt,
    loewner_leq,
    spectral_decompose,
)
from .posmaps import (
    PositiveLinearMap,
    PositiveMapFamily,
    check_unitality,
    family_apply_sum,
    normalize_family,
)
from .scalarfun import ConvexScalarFunction, builtin, parse_function, subgradient_operator
from .theorems import (
    InequalityInstance,
    VerificationReport,
    find_cdj_counterexample,
    parallel_sum,
    verify_beta_reverse,
    verify_cdj_naive,
    verify_choi_forward,
    verify_choi_reverse,
    verify_forward_jensen,
    verify_parallel_sum_forward,
    verify_parallel_sum_reverse,
    verify_reverse_jensen,
)

__version__ = "0.1.0"
