"""Least-element and sparsest solutions of Z-tensor complementarity problems.

The package solves ``A x^{m-1} = b`` over the nonnegative orthant by a
monotone fixed-point iteration, classifies the structure (Z / partially-Z /
M / strong-M / permuted-Z) that makes the least element of the feasible set
a sparsest complementarity solution, and certifies results against a
brute-force support-enumeration oracle at desk scale.
"""

from .errors import GenerationError, NotApplicableError, ParseError, ZtcpError
from .tensor import (
    DENSIFY_LIMIT,
    Tensor,
    apply,
    componentwise_power,
    contract,
    gradient,
    identity_tensor,
    matrix_product,
    ones_tensor,
    principal_subtensor,
    rank_one,
)
from .classify import (
    Classification,
    SpectralBracket,
    classify_tensor,
    find_z_permutation,
    is_partially_z_tensor,
    is_strong_m_tensor,
    is_z_tensor,
    m_split,
    positivity_certificate,
    spectral_radius,
)
from .solvers import (
    Scheme,
    SolveReport,
    SolveStatus,
    SolverConfig,
    TcpInstance,
    check_system_equivalence,
    feasible_point_sampler,
    fixed_point_map,
    solve_multilinear,
    tcp_residual,
)
from .sparsity import (
    ORACLE_DIM_LIMIT,
    OracleCertificate,
    SparsestResult,
    oracle_min_support,
    sparsest_solve,
    sparsest_solve_permuted,
    support,
)
from .io import (
    generate_instance,
    parse_tensor,
    parse_vector,
    serialize_tensor,
    serialize_vector,
    strong_m_from,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ZtcpError",
    "ParseError",
    "NotApplicableError",
    "GenerationError",
    "DENSIFY_LIMIT",
    "Tensor",
    "identity_tensor",
    "ones_tensor",
    "apply",
    "contract",
    "gradient",
    "matrix_product",
    "rank_one",
    "componentwise_power",
    "principal_subtensor",
    "Classification",
    "SpectralBracket",
    "is_z_tensor",
    "is_partially_z_tensor",
    "m_split",
    "spectral_radius",
    "is_strong_m_tensor",
    "positivity_certificate",
    "find_z_permutation",
    "classify_tensor",
    "Scheme",
    "SolveStatus",
    "TcpInstance",
    "SolverConfig",
    "SolveReport",
    "fixed_point_map",
    "solve_multilinear",
    "tcp_residual",
    "check_system_equivalence",
    "feasible_point_sampler",
    "ORACLE_DIM_LIMIT",
    "OracleCertificate",
    "SparsestResult",
    "support",
    "sparsest_solve",
    "sparsest_solve_permuted",
    "oracle_min_support",
    "serialize_tensor",
    "parse_tensor",
    "serialize_vector",
    "parse_vector",
    "strong_m_from",
    "generate_instance",
]
