"""Jackson q-calculus, q-Prabhakar functions and Prabhakar fractional q-operators."""

from .errors import (
    ConvergenceDomainError,
    DivisionByZero,
    DomainError,
    NotConverged,
    QCalcError,
    RhsDomainError,
)
from .qcalc import (
    QFunction,
    QLattice,
    q_derivative,
    q_derivative_n,
    q_integral,
    q_integral_0,
    q_integral_n,
    q_norm,
)
from .qcore import (
    QContext,
    SeriesValue,
    check_pochhammer_convolution,
    check_vandermonde,
    q_binomial,
    q_factorial,
    q_gamma,
    q_number,
    q_pochhammer,
    q_power_frac,
    q_power_int,
    q_shifted_factorial,
    q_shifted_factorial_inf,
)
from .qfrac import (
    FracOperatorSpec,
    OperatorKind,
    check_inverse_composition,
    check_left_inverse_with_initial,
    check_semigroup,
    kernel_action_residual,
    lambda_shift,
    lattice_limit,
    omega_prime,
    prabhakar_bound_constant,
    prabhakar_q_derivative,
    prabhakar_q_integral,
    rl_bound_constant,
    rl_q_derivative,
    rl_q_integral,
)
from .qsolve import (
    CauchyProblem,
    SolverConfig,
    SolverReport,
    contraction_constant,
    differential_residual,
    initial_condition_value,
    initial_iterate,
    picard_step,
    solve,
    volterra_residual,
)
from .qspecial import (
    GeneralizedArgs,
    PrabhakarParams,
    kernel_g,
    q_mittag_leffler,
    q_prabhakar,
    q_prabhakar_generalized,
)

__version__ = "0.1.0"
