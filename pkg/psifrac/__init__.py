import logging

from .catalog import (
    CatalogPreset,
    Kind,
    apply,
    list_presets,
    resolve,
)
from .error import (
    CosineZeroError,
    DomainError,
    ExtrapolationError,
    GammaOverflowError,
    InnerSingularityError,
    InvalidConfigError,
    InvalidDomainError,
    InvalidParameterError,
    MissingParameterError,
    NonConvergenceError,
    NonDifferentiableError,
    NonfiniteSampleError,
    OutOfRangeError,
    ParseError,
    PoleError,
    PsiFracError,
    StepUnderflowError,
    UnknownIdentifierError,
    UnknownNameError,
)
from .expr import (
    ExprNode,
    differentiate,
    evaluate,
    parse,
    to_text,
)
from .operand import (
    Operand,
    PowerTerm,
    Side,
    coerce,
)
from .operators import (
    HilferMode,
    OrderSpec,
    caputo_derivative,
    caputo_image,
    derivative_image,
    evaluate_grid,
    frac_integral,
    hilfer_derivative,
    hilfer_image,
    integral_image,
    inversion_residual,
    norm_c_gamma,
    norm_cn_gamma,
    psi_derivative_op,
    remark_h1_form,
    rl_derivative,
    rl_image,
)
from .oracles import (
    OracleCase,
    bound_constant,
    builtin_cases,
    eigen_deviation,
    ml_eigen,
    power_derivative,
    power_integral,
    rl_power,
)
from .psi import (
    PsiKind,
    PsiSpec,
    from_selector,
    invert,
    make_custom,
    make_preset,
    validate,
)
from .quad import (
    EvalResult,
    QuadConfig,
    weakly_singular_integral,
)
from .specialfn import (
    MLParams,
    gamma,
    lgamma,
    mittag_leffler,
    mittag_leffler_with_error,
    prabhakar_kernel,
    rgamma,
)
from .verify import (
    CaseOutcome,
    format_report,
    run_suite,
)


logging.getLogger(__name__).addHandler(logging.NullHandler())
