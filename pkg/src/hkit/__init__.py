"""hkit: exact Hironaka division and relation-module calculus for truncated power series."""

from .core import (
    Exponent,
    MonomialOrder,
    Ordering,
    Polynomial,
    TruncatedSeriesVector,
    drop_constant,
    jet_compose,
    leading_term,
    monomial_multiply,
    order_compare,
    taylor_expand_at,
)
from .division import (
    Diagram,
    DivisionResult,
    artin_rees_lambda,
    check_chevalley_estimate,
    compare_diagrams,
    complement_basis,
    compute_diagram,
    hironaka_divide,
    membership_test,
    standard_basis,
)
from .errors import (
    DimensionMismatch,
    FibreMismatch,
    HkitError,
    InsufficientTruncation,
    NonzeroConstantTerm,
    NoStabilization,
    SchemaError,
    TruncationMismatch,
    ZeroDivisor,
    ZeroSeries,
)
from .relations import (
    Chart,
    EquationData,
    FibrePoint,
    assemble_relation_system,
    chevalley_function,
    diagram_scan,
    formal_solve_at_point,
    project_relations,
    rank_rho0,
    rank_rho1,
    relation_basis,
)
from .whitney import AffineStratum, JetField, borel_check, field_of_function

__version__ = "0.1.0"
