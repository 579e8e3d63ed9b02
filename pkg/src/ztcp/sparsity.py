"""Sparsest solutions of Z-tensor complementarity problems.

The least element of ``{x >= 0 : A x^{m-1} = b}`` is a sparsest
complementarity solution when ``A`` is a Z-tensor and ``b >= 0``, so the
monotone solver doubles as an l0 minimizer.  A brute-force support
enumeration certifies the claim at desk scale.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .classify import find_z_permutation, is_z_tensor
from .errors import NotApplicableError
from .solvers import (
    Scheme,
    SolveReport,
    SolveStatus,
    SolverConfig,
    TcpInstance,
    solve_multilinear,
)
from .tensor import apply, matrix_product, principal_subtensor

__all__ = [
    "ORACLE_DIM_LIMIT",
    "OracleCertificate",
    "SparsestResult",
    "support",
    "sparsest_solve",
    "sparsest_solve_permuted",
    "oracle_min_support",
]

logger = logging.getLogger(__name__)

# Support enumeration is exponential in the dimension; refuse beyond this.
ORACLE_DIM_LIMIT = 12


@dataclass(frozen=True)
class OracleCertificate:
    """Exhaustive-enumeration witness for the minimum support size."""

    min_support_size: int
    witness: np.ndarray
    enumerated_supports: int

    def __post_init__(self):
        witness = np.asarray(self.witness, dtype=float).copy()
        witness.setflags(write=False)
        object.__setattr__(self, "witness", witness)


@dataclass(frozen=True)
class SparsestResult:
    """Least-element solution reported as a sparsest complementarity solution."""

    x_star: np.ndarray
    support: tuple[int, ...]
    l0: int
    objective: float
    relaxation_valid: bool
    report: SolveReport
    oracle: OracleCertificate | None = None

    def __post_init__(self):
        x = np.asarray(self.x_star, dtype=float).copy()
        x.setflags(write=False)
        object.__setattr__(self, "x_star", x)


def support(x, zero_threshold: float = 1e-8) -> tuple[int, ...]:
    """Indices with ``|x_i| > zero_threshold``, sorted ascending (0-based)."""
    if zero_threshold < 0:
        raise ValueError("zero_threshold must be >= 0")
    x = np.asarray(x, dtype=float)
    return tuple(int(i) for i in np.nonzero(np.abs(x) > zero_threshold)[0])


def sparsest_solve(
    inst: TcpInstance,
    cfg: SolverConfig | None = None,
    zero_threshold: float = 1e-8,
    run_oracle: bool = False,
) -> SparsestResult:
    """Compute the least element of the multilinear system and its l0 count.

    Preconditions (Z-tensor, ``b >= 0``) failing yields a result whose report
    status is ``not_applicable``; solver non-convergence is forwarded with
    ``relaxation_valid=False``.  With ``run_oracle=True`` the support
    enumeration of :func:`oracle_min_support` is attached for cross-checking.
    """
    cfg = cfg or SolverConfig()
    report = solve_multilinear(inst, cfg)
    supp = support(report.x, zero_threshold)
    oracle = None
    if run_oracle and report.status is not SolveStatus.NOT_APPLICABLE:
        oracle = oracle_min_support(inst, tol=cfg.tol, cfg=cfg, zero_threshold=zero_threshold)
    return SparsestResult(
        x_star=report.x,
        support=supp,
        l0=len(supp),
        objective=float(np.sum(report.x)),
        relaxation_valid=report.status is SolveStatus.CONVERGED,
        report=report,
        oracle=oracle,
    )


def sparsest_solve_permuted(
    inst: TcpInstance,
    cfg: SolverConfig | None = None,
    zero_threshold: float = 1e-8,
    run_oracle: bool = False,
) -> SparsestResult:
    """Like :func:`sparsest_solve` after permuting the equations to Z form.

    Permuting rows of the system does not change its solution set, so the
    result is already in the original coordinates.  Without a permutation
    certificate (or if the permuted right-hand side went negative) the report
    status is ``not_applicable``.
    """
    P = find_z_permutation(inst.tensor)
    if P is None:
        return _not_applicable_result(inst, "no permutation makes the tensor a Z-tensor")
    permuted_rhs = P @ inst.rhs
    if np.any(permuted_rhs < 0):
        return _not_applicable_result(inst, "permuted right-hand side has negative components")
    permuted = TcpInstance(matrix_product(P, inst.tensor), permuted_rhs)
    return sparsest_solve(permuted, cfg, zero_threshold, run_oracle)


def _not_applicable_result(inst: TcpInstance, detail: str) -> SparsestResult:
    x = np.zeros(inst.dim)
    report = SolveReport(
        x=x,
        residual_inf=float(np.max(np.abs(apply(inst.tensor, x) - inst.rhs))),
        iterations=0,
        status=SolveStatus.NOT_APPLICABLE,
        monotone=True,
        detail=detail,
    )
    return SparsestResult(x, (), 0, 0.0, False, report)


def oracle_min_support(
    inst: TcpInstance,
    tol: float = 1e-10,
    cfg: SolverConfig | None = None,
    zero_threshold: float = 1e-8,
) -> OracleCertificate | None:
    """Brute-force minimum support size over complementarity solutions.

    Enumerates supports by increasing cardinality (lexicographic within a
    cardinality, so ties resolve deterministically).  For each support ``S``
    the principal-subtensor system ``A[S] y^{m-1} = b[S]`` is solved by the
    monotone solver (principal subtensors of Z-tensors are Z) and the
    candidate is accepted if the full vector satisfies
    ``A x^{m-1} >= b - tol`` on every row.  The first acceptance is minimal.

    Supports whose subproblem does not converge are skipped with a logged
    warning; ``None`` is returned when no support certifies a witness.
    """
    A, b = inst.tensor, inst.rhs
    n = inst.dim
    if n > ORACLE_DIM_LIMIT:
        raise ValueError(f"support enumeration refuses n={n} > {ORACLE_DIM_LIMIT}")
    if not is_z_tensor(A):
        raise NotApplicableError("support enumeration requires a Z-tensor")
    if np.any(b < 0):
        raise NotApplicableError("support enumeration requires a nonnegative right-hand side")
    subcfg = SolverConfig(
        tol=tol,
        max_iter=cfg.max_iter if cfg else SolverConfig().max_iter,
        scheme=Scheme.JACOBI,
        divergence_bound=cfg.divergence_bound if cfg else SolverConfig().divergence_bound,
    )
    enumerated = 0
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            enumerated += 1
            witness = _try_support(A, b, subset, tol, subcfg)
            if witness is not None:
                found = len(support(witness, zero_threshold))
                if found != size:
                    logger.warning(
                        "support %s certified a witness with l0=%d; an earlier "
                        "subproblem was likely skipped", subset, found,
                    )
                return OracleCertificate(min(size, found), witness, enumerated)
    return None


def _try_support(A, b, subset, tol, subcfg) -> np.ndarray | None:
    n = A.dim
    x = np.zeros(n)
    if subset:
        sub = principal_subtensor(A, subset)
        sub_report = solve_multilinear(TcpInstance(sub, b[list(subset)]), subcfg)
        if sub_report.status is not SolveStatus.CONVERGED:
            logger.warning("subproblem on support %s did not converge (%s); skipped",
                           subset, sub_report.status.value)
            return None
        x[list(subset)] = sub_report.x
    if np.any(apply(A, x) < b - tol):
        return None
    return x
