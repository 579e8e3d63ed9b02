"""Structural classification of tensors: Z, partially-Z, M, strong-M.

Also provides a bracketing power iteration for the spectral radius of a
nonnegative tensor and a bipartite-matching certificate for tensors that
become Z-tensors after a permutation of their mode-1 slices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotApplicableError
from .tensor import Tensor, apply, identity_tensor, ones_tensor

__all__ = [
    "SpectralBracket",
    "Classification",
    "is_z_tensor",
    "is_partially_z_tensor",
    "m_split",
    "spectral_radius",
    "is_strong_m_tensor",
    "positivity_certificate",
    "find_z_permutation",
    "classify_tensor",
]


@dataclass(frozen=True)
class SpectralBracket:
    """Two-sided enclosure ``lo <= rho <= hi`` of a spectral radius."""

    lo: float
    hi: float
    iterations: int
    converged: bool

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Classification:
    """Structural verdicts for one tensor.

    ``is_strong_m`` is three-valued: ``True`` / ``False`` / ``None`` when the
    spectral bracket straddles the diagonal shift and the verdict would be
    numerically ambiguous.  ``z_permutation``, when present, is a 0/1
    permutation matrix ``P`` such that ``P A`` is a Z-tensor.
    """

    is_z: bool
    is_partially_z: bool
    m_split: tuple[float, Tensor] | None
    spectral_radius_bracket: SpectralBracket | None
    is_strong_m: bool | None
    z_permutation: np.ndarray | None


def is_z_tensor(A: Tensor) -> bool:
    """True iff every off-diagonal entry (index tuple not all equal) is <= 0."""
    if A.nnz == 0:
        return True
    diagonal = np.all(A.indices == A.indices[:, :1], axis=1)
    return bool(np.all(A.values[~diagonal] <= 0.0))


def is_partially_z_tensor(A: Tensor) -> bool:
    """True iff entries whose leading index is absent from the tail are <= 0.

    Entries ``a_{i1 i2..im}`` with ``i1 in {i2, ..., im}`` are unconstrained;
    every Z-tensor is partially Z.
    """
    if A.nnz == 0:
        return True
    leading_absent = np.all(A.indices[:, 1:] != A.indices[:, :1], axis=1)
    return bool(np.all(A.values[leading_absent] <= 0.0))


def m_split(A: Tensor) -> tuple[float, Tensor]:
    """Canonical split ``A = s I - B`` of a Z-tensor with ``B >= 0``.

    ``s`` is the maximum diagonal entry (0 counts for absent diagonals),
    which is the smallest shift keeping ``B`` nonnegative.
    """
    if not is_z_tensor(A):
        raise NotApplicableError("the diagonal split A = s*I - B requires a Z-tensor")
    s = 0.0
    for key, value in A.items():
        if all(i == key[0] for i in key):
            s = max(s, value)
    return s, s * identity_tensor(A.order, A.dim) - A


def spectral_radius(
    B: Tensor,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    perturbation: float = 1e-10,
    stall_limit: int = 200,
) -> SpectralBracket:
    """Bracket the spectral radius of a nonnegative tensor by power iteration.

    From the all-ones vector, iterate ``x <- normalize((B' x^{m-1})^{[1/(m-1)]})``
    where ``B' = B + perturbation * (all-ones tensor)`` keeps the iterates
    strictly positive even for reducible ``B``.  At every iterate the ratios
    ``(B x^{m-1})_i / x_i^{m-1}`` of the *unperturbed* tensor give two-sided
    bounds on ``rho(B)``; the tightest bounds seen so far are returned.

    The bracket is always sound.  It closes below ``tol`` for irreducible
    tensors; for reducible ones it may stall, in which case the tightest
    bracket is returned with ``converged=False`` (after ``stall_limit``
    iterations without improvement, or ``max_iter`` total).
    """
    if B.order < 2:
        raise ValueError("spectral radius needs a tensor of order >= 2")
    if B.nnz and np.any(B.values < 0):
        raise ValueError("spectral radius bracketing requires a nonnegative tensor")
    if perturbation <= 0:
        raise ValueError("perturbation must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    perturbed = B + perturbation * ones_tensor(B.order, B.dim)
    exponent = 1.0 / (B.order - 1)
    x = np.ones(B.dim)
    lo_best, hi_best = 0.0, np.inf
    since_improvement = 0
    for iteration in range(1, max_iter + 1):
        ratios = apply(B, x) / x ** (B.order - 1)
        lo, hi = float(np.min(ratios)), float(np.max(ratios))
        improved = lo > lo_best or hi < hi_best
        lo_best = max(lo_best, lo)
        hi_best = min(hi_best, hi)
        if hi_best - lo_best <= tol:
            return SpectralBracket(lo_best, hi_best, iteration, True)
        since_improvement = 0 if improved else since_improvement + 1
        if since_improvement >= stall_limit:
            return SpectralBracket(lo_best, hi_best, iteration, False)
        y = apply(perturbed, x)
        x = y ** exponent
        x /= np.max(x)
    return SpectralBracket(lo_best, hi_best, max_iter, False)


def _strong_m_verdict(s: float, bracket: SpectralBracket) -> bool | None:
    if s > bracket.hi:
        return True
    if s <= bracket.lo:
        return False
    return None


def is_strong_m_tensor(A: Tensor, tol: float = 1e-10, max_iter: int = 10_000) -> bool | None:
    """Three-valued strong-M test: Z-structure plus ``s > rho(B)``.

    Returns ``True`` when the shift clears the upper bracket bound, ``False``
    when it is at or below the lower bound (or the tensor is not Z), and
    ``None`` when the bracket straddles ``s`` and no certified verdict exists.
    """
    if not is_z_tensor(A):
        return False
    s, B = m_split(A)
    return _strong_m_verdict(s, spectral_radius(B, tol=tol, max_iter=max_iter))


def positivity_certificate(A: Tensor, z) -> bool:
    """Check the strong-M certificate ``A z^{m-1} > 0`` for a positive ``z``.

    Sufficient only: a single ``z`` failing the check proves nothing.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.shape[0] != A.dim:
        raise ValueError(f"expected a vector of length {A.dim}")
    if np.any(z <= 0):
        raise ValueError("certificate point must be strictly positive")
    return bool(np.all(apply(A, z) > 0))


def _slice_positions(A: Tensor) -> list[set[int]]:
    # allowed[j] = target positions that slice j may occupy: a positive entry
    # at tail (t, ..., t) pins the slice to position t; a positive entry at a
    # non-constant tail blocks the slice everywhere.
    allowed = [set(range(A.dim)) for _ in range(A.dim)]
    for key, value in A.items():
        if value <= 0:
            continue
        j, tail = key[0], key[1:]
        if all(t == tail[0] for t in tail):
            allowed[j] &= {tail[0]}
        else:
            allowed[j] = set()
    return allowed


def _completable(candidates: list[list[int]], n: int, start: int, used: set[int]) -> bool:
    # Kuhn's augmenting-path matching for positions start..n-1, scanning
    # candidate slices in ascending order.
    match: dict[int, int] = {}

    def try_position(i: int, seen: set[int]) -> bool:
        for j in candidates[i]:
            if j in used or j in seen:
                continue
            seen.add(j)
            if j not in match or try_position(match[j], seen):
                match[j] = i
                return True
        return False

    return all(try_position(i, set()) for i in range(start, n))


def find_z_permutation(A: Tensor) -> np.ndarray | None:
    """Permutation matrix ``P`` with ``P A`` a Z-tensor, or ``None``.

    Slice ``j`` is compatible with position ``i`` iff every positive entry of
    slice ``j`` sits at the tail ``(i, ..., i)``.  Among all valid
    permutations the lexicographically smallest assignment (scanning
    positions in increasing order) is returned, so the identity wins on
    tensors that are already Z.
    """
    if A.order < 2:
        raise ValueError("permutation certificates need a tensor of order >= 2")
    n = A.dim
    allowed = _slice_positions(A)
    candidates = [[j for j in range(n) if i in allowed[j]] for i in range(n)]
    if not _completable(candidates, n, 0, set()):
        return None
    assignment: list[int] = []
    used: set[int] = set()
    for i in range(n):
        for j in candidates[i]:
            if j in used:
                continue
            used.add(j)
            if _completable(candidates, n, i + 1, used):
                assignment.append(j)
                break
            used.remove(j)
    P = np.zeros((n, n))
    for i, j in enumerate(assignment):
        P[i, j] = 1.0
    P.setflags(write=False)
    return P


def classify_tensor(A: Tensor, tol: float = 1e-10, max_iter: int = 10_000) -> Classification:
    """Run all structural tests on one tensor and bundle the verdicts."""
    z = is_z_tensor(A)
    split = None
    bracket = None
    strong: bool | None = False
    if z:
        s, B = m_split(A)
        split = (s, B)
        bracket = spectral_radius(B, tol=tol, max_iter=max_iter)
        strong = _strong_m_verdict(s, bracket)
    return Classification(
        is_z=z,
        is_partially_z=is_partially_z_tensor(A),
        m_split=split,
        spectral_radius_bracket=bracket,
        is_strong_m=strong,
        z_permutation=find_z_permutation(A),
    )
