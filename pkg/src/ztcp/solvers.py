"""Monotone fixed-point solvers for ``A x^{m-1} = b`` with ``x >= 0``.

For a Z-tensor ``A = s I - B`` (``B >= 0``) and ``b >= 0`` the map

    ``T(x) = ((B x^{m-1} + b) / s)^{[1/(m-1)]}``

is monotone on the nonnegative orthant and its iteration from 0 produces a
componentwise nondecreasing sequence.  When the system has a nonnegative
solution (in particular for strong M-tensors) the sequence converges to the
least one, which is also the least element of the feasible set
``{x >= 0 : A x^{m-1} - b >= 0}`` and a solution of the complementarity
problem.  Both the simultaneous (Jacobi) and the immediate-update
(Gauss-Seidel) sweeps are provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .classify import is_partially_z_tensor, is_z_tensor, m_split, positivity_certificate
from .errors import NotApplicableError
from .tensor import Tensor, apply, componentwise_power

__all__ = [
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
]


class Scheme(str, Enum):
    JACOBI = "jacobi"
    GAUSS_SEIDEL = "gauss_seidel"


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    DIVERGED = "diverged"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class TcpInstance:
    """A tensor ``A`` and right-hand vector ``b`` defining ``TCP(A, b)``."""

    tensor: Tensor
    rhs: np.ndarray

    def __post_init__(self):
        rhs = np.asarray(self.rhs, dtype=float)
        if rhs.ndim != 1 or rhs.shape[0] != self.tensor.dim:
            raise ValueError(
                f"right-hand side must be a vector of length {self.tensor.dim}, got shape {rhs.shape}"
            )
        rhs = rhs.copy()
        rhs.setflags(write=False)
        object.__setattr__(self, "rhs", rhs)

    @property
    def dim(self) -> int:
        return self.tensor.dim


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls shared by both sweep schemes."""

    tol: float = 1e-10
    max_iter: int = 100_000
    scheme: Scheme = Scheme.JACOBI
    divergence_bound: float = 1e12

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.divergence_bound <= 0:
            raise ValueError("divergence_bound must be positive")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one solve: final iterate, residual, and a monotonicity audit."""

    x: np.ndarray
    residual_inf: float
    iterations: int
    status: SolveStatus
    monotone: bool
    detail: str = ""

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).copy()
        x.setflags(write=False)
        object.__setattr__(self, "x", x)


def fixed_point_map(s: float, B: Tensor, b, x) -> np.ndarray:
    """One application of ``T(x) = ((B x^{m-1} + b) / s)^{[1/(m-1)]}``.

    Preconditions (not re-validated): ``s > 0``, ``B >= 0``, ``b >= 0``,
    ``x >= 0``.  Under them the argument of the fractional power is
    nonnegative, and ``x <= y`` implies ``T(x) <= T(y)``.
    """
    if s <= 0:
        raise ValueError("fixed-point map needs s > 0")
    if B.order < 2:
        raise ValueError("fixed-point map needs a tensor of order >= 2")
    b = np.asarray(b, dtype=float)
    x = np.asarray(x, dtype=float)
    return componentwise_power((apply(B, x) + b) / s, 1.0 / (B.order - 1))


def _residual_inf(A: Tensor, x: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(apply(A, x) - b)))


def _row_slices(B: Tensor) -> list[tuple[np.ndarray, np.ndarray]]:
    # Per-row (tail indices, values) so Gauss-Seidel can evaluate single
    # components of B x^{m-1} against a partially updated iterate.
    rows = []
    for i in range(B.dim):
        mask = B.indices[:, 0] == i if B.nnz else np.zeros(0, dtype=bool)
        rows.append((B.indices[mask, 1:], B.values[mask]))
    return rows


def _row_value(row: tuple[np.ndarray, np.ndarray], x: np.ndarray) -> float:
    cols, vals = row
    if vals.shape[0] == 0:
        return 0.0
    return float(np.sum(vals * np.prod(x[cols], axis=1)))


def solve_multilinear(
    inst: TcpInstance,
    cfg: SolverConfig | None = None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> SolveReport:
    """Iterate the fixed-point map from 0 until the residual drops below tol.

    Parameters
    ----------
    inst:
        Instance with a Z-tensor and nonnegative right-hand side; anything
        else returns a ``not_applicable`` report.
    cfg:
        Tolerances, iteration budget, and sweep scheme (default Jacobi).
    callback:
        Optional observer invoked as ``callback(iteration, x)`` with the
        start iterate (0) and after every sweep.

    The residual is ``||A x^{m-1} - b||_inf``.  Divergence is declared when
    the iterate max-norm exceeds ``cfg.divergence_bound`` (possible when A is
    Z but not strong M and the system is inconsistent).  The report's
    ``monotone`` flag records whether the sweeps were componentwise
    nondecreasing, which the theory predicts for the start at 0.
    """
    cfg = cfg or SolverConfig()
    A, b = inst.tensor, inst.rhs
    n = inst.dim
    x = np.zeros(n)
    if callback is not None:
        callback(0, x.copy())
    if not is_z_tensor(A):
        return SolveReport(x, _residual_inf(A, x, b), 0, SolveStatus.NOT_APPLICABLE, True,
                           "tensor is not a Z-tensor")
    if np.any(b < 0):
        return SolveReport(x, _residual_inf(A, x, b), 0, SolveStatus.NOT_APPLICABLE, True,
                           "right-hand side has negative components")
    residual = _residual_inf(A, x, b)
    if residual <= cfg.tol:
        return SolveReport(x, residual, 0, SolveStatus.CONVERGED, True)
    s, B = m_split(A)
    if s <= 0:
        # all diagonal entries <= 0: the fixed-point map is undefined and the
        # system has no nonnegative solution for this b
        return SolveReport(x, residual, 0, SolveStatus.NOT_APPLICABLE, True,
                           "diagonal split has no positive shift")
    exponent = 1.0 / (A.order - 1)
    rows = _row_slices(B) if cfg.scheme is Scheme.GAUSS_SEIDEL else None
    monotone = True
    for iteration in range(1, cfg.max_iter + 1):
        if cfg.scheme is Scheme.JACOBI:
            new = componentwise_power((apply(B, x) + b) / s, exponent)
        else:
            new = x.copy()
            for i in range(n):
                new[i] = ((_row_value(rows[i], new) + b[i]) / s) ** exponent
        if np.any(new < x):
            monotone = False
        stalled = np.array_equal(new, x)
        x = new
        if callback is not None:
            callback(iteration, x.copy())
        if np.max(x) > cfg.divergence_bound:
            return SolveReport(x, _residual_inf(A, x, b), iteration, SolveStatus.DIVERGED,
                               monotone, "iterate norm exceeded divergence bound")
        residual = _residual_inf(A, x, b)
        if residual <= cfg.tol:
            return SolveReport(x, residual, iteration, SolveStatus.CONVERGED, monotone)
        if stalled:
            return SolveReport(x, residual, iteration, SolveStatus.MAX_ITER, monotone,
                               "iterate reached a floating-point fixed point above tol")
    return SolveReport(x, residual, cfg.max_iter, SolveStatus.MAX_ITER, monotone,
                       "iteration budget exhausted")


def tcp_residual(inst: TcpInstance, x) -> tuple[float, float, float]:
    """Violations of the three complementarity conditions at ``x``.

    Returns ``(primal, dual, gap)``: the max-norm of the negative parts of
    ``x`` and of ``A x^{m-1} - b``, and ``|<x, A x^{m-1} - b>|``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.dim,):
        raise ValueError(f"expected a vector of length {inst.dim}")
    w = apply(inst.tensor, x) - inst.rhs
    primal = float(np.max(np.maximum(-x, 0.0)))
    dual = float(np.max(np.maximum(-w, 0.0)))
    gap = float(abs(np.dot(x, w)))
    return primal, dual, gap


def check_system_equivalence(
    inst: TcpInstance, x, tol: float, amplification: float = 10.0
) -> bool:
    """Verify that a complementarity solution also solves the equation.

    For a partially-Z tensor with ``b >= 0`` the two systems have the same
    solutions, so whenever all components of :func:`tcp_residual` are within
    ``tol`` the equation residual must be within ``tol * amplification``
    (the default amplification 10 absorbs conditioning).  Points that are
    not complementarity solutions at ``tol`` satisfy the implication
    vacuously and return ``True``.
    """
    A, b = inst.tensor, inst.rhs
    if not is_partially_z_tensor(A):
        raise NotApplicableError("system equivalence requires a partially Z-tensor")
    if np.any(b < 0):
        raise NotApplicableError("system equivalence requires a nonnegative right-hand side")
    primal, dual, gap = tcp_residual(inst, x)
    if max(primal, dual, gap) > tol:
        return True
    return _residual_inf(A, np.asarray(x, dtype=float), b) <= tol * amplification


def feasible_point_sampler(
    inst: TcpInstance, z, count: int, rng_seed: int
) -> list[np.ndarray]:
    """Sample feasible points of ``{y >= 0 : A y^{m-1} - b >= 0}`` by scaling.

    Perturbs the certified positive point ``z`` multiplicatively and scales
    each perturbation by ``t = max_i (b_i / (A y^{m-1})_i)^{1/(m-1)}``, which
    by homogeneity makes ``A (t y)^{m-1} >= b``.  Perturbations that lose the
    positivity of ``A y^{m-1}`` fall back to ``z`` itself.  Deterministic for
    a fixed ``rng_seed``; every returned point is verified feasible.
    """
    A, b = inst.tensor, inst.rhs
    z = np.asarray(z, dtype=float)
    if not positivity_certificate(A, z):
        raise NotApplicableError("sampler needs a positive z with A z^{m-1} > 0")
    if np.any(b < 0):
        raise NotApplicableError("sampler requires a nonnegative right-hand side")
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = np.random.default_rng(rng_seed)
    exponent = 1.0 / (A.order - 1)
    out = []
    for _ in range(count):
        y = z * (1.0 + rng.uniform(0.0, 0.5, size=A.dim))
        w = apply(A, y)
        if np.any(w <= 0):
            y = z.copy()
            w = apply(A, y)
        t = float(np.max(b / w)) ** exponent if np.any(b > 0) else 1.0
        candidate = t * y
        for _ in range(100):
            if np.all(apply(A, candidate) >= b):
                break
            t *= 1.0 + 1e-9
            candidate = t * y
        else:
            raise RuntimeError("feasibility bump failed; scaling identity violated")
        out.append(candidate)
    return out
