"""Twisted prolongations of vector fields and symmetry reduction of ODEs/PDEs."""

from .expr import (
    FUNCTIONS,
    ONE,
    ZERO,
    Expr,
    UndeclaredSymbolError,
    add,
    as_expr,
    canon,
    const,
    cos,
    diff,
    div,
    exp,
    expand,
    log,
    mul,
    neg,
    power,
    sin,
    sqrt,
    sub,
    substitute,
    sym,
    tan,
    to_text,
)
from .fields import (
    InvolutionError,
    InvolutionSystem,
    ProlongedField,
    ReconstructionError,
    VectorField,
    check_involution,
    commutator,
    evolutionary_rep,
    fields_equal,
    involution_system,
    reconstruct_liepoint,
    tables_equal,
    verify_prolong_commutator,
)
from .gauge import (
    GaugeError,
    beta_from_lambda_quadrature,
    lambda_from_beta,
    mu_from_A,
    rescaled_lambda,
    sigma_from_Gamma,
    verify_chi_diagram,
    verify_gauge_lambda,
    verify_gauge_mu,
    verify_gauge_sigma,
)
from .jet import JetContext, JetError, OdeSystem, SolvedSystem, TruncationError
from .matrix import MatrixExpr, ShapeError
from .numeric import (
    DEFAULT,
    EqualityConfig,
    SingularOnBox,
    Verdict,
    equal_numeric,
    eval_numeric,
    is_zero,
)
from .parser import ParseDiagnostic, parse_expression, try_parse
from .problem import Problem, load_problem, parse_problem, run_problem
from .prolong import (
    Chi,
    CompatibilityError,
    Lambda,
    Mu,
    NotApplicable,
    Sigma,
    Standard,
    check_maurer_cartan,
    commutator_identity_report,
    mu_difference,
    prolong,
    prolong_chi,
    prolong_lambda,
    prolong_mu,
    prolong_sigma,
    sigma_involution_condition,
)
from .reduction import (
    IBDPError,
    InvariantChain,
    ReductionError,
    check_strong_symmetry,
    check_symmetry,
    find_first_invariants,
    ibdp_next,
    invariant_solution_check,
    reduce_adapted,
    reduce_by_invariants,
)

__version__ = "0.1.0"
