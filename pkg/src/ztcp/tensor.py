"""Coordinate-list tensors and the multilinear products built on them.

The central object is :class:`Tensor`, an order-``m`` dimension-``n`` real
tensor stored as a lexicographically sorted coordinate list (absent index
tuples are zero).  Every product defined here sums over the stored entries
in that fixed order, so results are deterministic and bit-reproducible.

Vectors and matrices are plain 1-d / 2-d :class:`numpy.ndarray` objects.
All indices in this API are 0-based; the text file formats in
:mod:`ztcp.io` use 1-based indices.
"""

from __future__ import annotations

import itertools
from functools import reduce
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
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
]

# Densification guard: dense views are only materialized up to this size.
DENSIFY_LIMIT = 1_000_000

Entry = tuple[tuple[int, ...], float]


def _as_vector(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != dim:
        raise ValueError(f"expected a vector of length {dim}, got shape {x.shape}")
    return x


class Tensor:
    """Order-``m`` dimension-``n`` real tensor in coordinate-list form.

    Parameters
    ----------
    order:
        Number of indices ``m`` of every entry (``>= 1``; proper tensors
        have ``m >= 2``, order 1 only arises as a contraction result).
    dim:
        Range ``n`` of every index; indices are 0-based, ``0 <= i < n``.
    entries:
        Mapping from index tuples to values, or an iterable of
        ``(tuple, value)`` pairs.  Duplicate tuples are rejected.

    Instances are immutable; the coordinate arrays are read-only and the
    entry list is kept sorted lexicographically.
    """

    __slots__ = ("_order", "_dim", "_indices", "_values", "_dense")

    def __init__(self, order: int, dim: int, entries: Mapping | Iterable[Entry] = ()):
        order = int(order)
        dim = int(dim)
        if order < 1:
            raise ValueError(f"tensor order must be >= 1, got {order}")
        if dim < 1:
            raise ValueError(f"tensor dimension must be >= 1, got {dim}")
        items = entries.items() if isinstance(entries, Mapping) else entries
        keys: list[tuple[int, ...]] = []
        vals: list[float] = []
        for key, value in items:
            key = tuple(int(i) for i in key)
            if len(key) != order:
                raise ValueError(f"index tuple {key} does not have {order} components")
            for i in key:
                if not 0 <= i < dim:
                    raise ValueError(f"index tuple {key} out of range for dimension {dim}")
            keys.append(key)
            vals.append(float(value))
        perm = sorted(range(len(keys)), key=keys.__getitem__)
        for a, b in zip(perm, perm[1:]):
            if keys[a] == keys[b]:
                raise ValueError(f"duplicate index tuple {keys[a]}")
        self._order = order
        self._dim = dim
        self._indices = np.array([keys[p] for p in perm], dtype=np.int64).reshape(len(keys), order)
        self._values = np.array([vals[p] for p in perm], dtype=float)
        self._indices.setflags(write=False)
        self._values.setflags(write=False)
        self._dense: np.ndarray | None = None

    @classmethod
    def from_dense(cls, data) -> "Tensor":
        """Build a tensor from a dense array, keeping only nonzero entries."""
        arr = np.asarray(data, dtype=float)
        if arr.ndim < 1:
            raise ValueError("dense input must have at least one axis")
        if len(set(arr.shape)) != 1:
            raise ValueError(f"dense input must be square in every mode, got shape {arr.shape}")
        nz = np.nonzero(arr)
        entries = [(tuple(int(i) for i in key), float(arr[key])) for key in zip(*nz)]
        return cls(arr.ndim, arr.shape[0], entries)

    @property
    def order(self) -> int:
        return self._order

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def nnz(self) -> int:
        return self._values.shape[0]

    @property
    def indices(self) -> np.ndarray:
        """Read-only ``(nnz, order)`` array of index tuples, sorted lexicographically."""
        return self._indices

    @property
    def values(self) -> np.ndarray:
        """Read-only ``(nnz,)`` array of entry values, aligned with :attr:`indices`."""
        return self._values

    def items(self) -> Iterator[Entry]:
        for row, value in zip(self._indices, self._values):
            yield tuple(int(i) for i in row), float(value)

    def to_dict(self) -> dict[tuple[int, ...], float]:
        return dict(self.items())

    def entry(self, key) -> float:
        """Value at one index tuple (0 when absent)."""
        key = tuple(int(i) for i in key)
        if len(key) != self._order:
            raise ValueError(f"index tuple {key} does not have {self._order} components")
        return self.to_dict().get(key, 0.0)

    def to_dense(self) -> np.ndarray:
        """Dense view; guarded at ``n**m <= DENSIFY_LIMIT``."""
        if self._dense is None:
            if self._dim ** self._order > DENSIFY_LIMIT:
                raise ValueError(
                    f"refusing to densify a tensor with {self._dim}**{self._order} entries"
                )
            dense = np.zeros((self._dim,) * self._order)
            if self.nnz:
                dense[tuple(self._indices.T)] = self._values
            dense.setflags(write=False)
            self._dense = dense
        return self._dense

    def _merge(self, other: "Tensor", sign: float) -> "Tensor":
        if (other.order, other.dim) != (self._order, self._dim):
            raise ValueError("tensor shapes do not match")
        acc = self.to_dict()
        for key, value in other.items():
            acc[key] = acc.get(key, 0.0) + sign * value
        return Tensor(self._order, self._dim, acc)

    def __add__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._merge(other, 1.0)

    def __sub__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self._merge(other, -1.0)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return Tensor(self._order, self._dim, [(k, scalar * v) for k, v in self.items()])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self._order == other._order
            and self._dim == other._dim
            and np.array_equal(self._indices, other._indices)
            and np.array_equal(self._values, other._values)
        )

    __hash__ = None  # mutable-free but equality is structural

    def __repr__(self):
        return f"Tensor(order={self._order}, dim={self._dim}, nnz={self.nnz})"


def identity_tensor(order: int, dim: int) -> Tensor:
    """Diagonal tensor with entry 1 at ``(i, ..., i)`` and 0 elsewhere.

    For ``order == 2`` this is the ordinary identity matrix.
    """
    if order < 2:
        raise ValueError(f"identity tensor needs order >= 2, got {order}")
    if dim < 1:
        raise ValueError(f"identity tensor needs dimension >= 1, got {dim}")
    return Tensor(order, dim, {(i,) * order: 1.0 for i in range(dim)})


def ones_tensor(order: int, dim: int) -> Tensor:
    """Dense tensor with every entry equal to 1."""
    if order < 1 or dim < 1:
        raise ValueError("ones tensor needs order >= 1 and dimension >= 1")
    if dim ** order > DENSIFY_LIMIT:
        raise ValueError(f"refusing to materialize {dim}**{order} entries")
    return Tensor(order, dim, {key: 1.0 for key in itertools.product(range(dim), repeat=order)})


def apply(A: Tensor, x) -> np.ndarray:
    """Contract all but the first index with ``x``: ``(A x^{m-1})_i``.

    ``(A x^{m-1})_i = sum_{i2..im} a_{i i2..im} x_{i2} ... x_{im}``.
    For an order-2 tensor this is the matrix-vector product.
    """
    x = _as_vector(x, A.dim)
    out = np.zeros(A.dim)
    if A.nnz:
        contrib = A.values * np.prod(x[A.indices[:, 1:]], axis=1)
        np.add.at(out, A.indices[:, 0], contrib)
    return out


def contract(A: Tensor, x, k: int) -> Tensor:
    """Contract the trailing ``m - k`` indices with ``x``, an order-``k`` tensor.

    ``k == m`` returns ``A`` itself and ``k == 1`` agrees with :func:`apply`
    (as an order-1 tensor).
    """
    k = int(k)
    if not 1 <= k <= A.order:
        raise ValueError(f"contraction order k={k} outside 1..{A.order}")
    x = _as_vector(x, A.dim)
    if k == A.order:
        return A
    acc: dict[tuple[int, ...], float] = {}
    if A.nnz:
        tails = A.values * np.prod(x[A.indices[:, k:]], axis=1)
        for row in range(A.nnz):
            key = tuple(int(i) for i in A.indices[row, :k])
            acc[key] = acc.get(key, 0.0) + float(tails[row])
    return Tensor(k, A.dim, acc)


def gradient(A: Tensor, x) -> np.ndarray:
    """Jacobian of the map ``x -> A x^{m-1}`` as an ``n x n`` matrix.

    Computed by direct summation over stored entries, one pass per index
    slot, which is exact for non-symmetric tensors:
    ``grad[i, j] = sum_{k=2..m} sum_{tuples with i_k=j} a_{i i2..im}
    prod_{l != k} x_{i_l}``.
    """
    x = _as_vector(x, A.dim)
    grad = np.zeros((A.dim, A.dim))
    if A.nnz and A.order >= 2:
        lead = A.indices[:, 0]
        cols = A.indices[:, 1:]
        gathered = x[cols]
        for slot in range(A.order - 1):
            others = np.prod(np.delete(gathered, slot, axis=1), axis=1)
            np.add.at(grad, (lead, cols[:, slot]), A.values * others)
    return grad


def matrix_product(P, A: Tensor) -> Tensor:
    """Mode-1 action of a matrix: ``(P A)_{i1 i2..im} = sum_i P[i1, i] a_{i i2..im}``.

    Mode-1 slices of the result are ``P``-combinations of the slices of
    ``A``; the identity matrix returns ``A`` entrywise.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (A.dim, A.dim):
        raise ValueError(f"expected a {A.dim}x{A.dim} matrix, got shape {P.shape}")
    acc: dict[tuple[int, ...], float] = {}
    idx, vals = A.indices, A.values
    for target in range(A.dim):
        weights = P[target, idx[:, 0]] if A.nnz else np.zeros(0)
        for row in np.nonzero(weights)[0]:
            key = (target, *(int(i) for i in idx[row, 1:]))
            acc[key] = acc.get(key, 0.0) + float(weights[row] * vals[row])
    return Tensor(A.order, A.dim, acc)


def rank_one(x, k: int) -> Tensor:
    """Order-``k`` rank-one tensor with entries ``x_{i1} ... x_{ik}``."""
    k = int(k)
    if k < 1:
        raise ValueError(f"rank-one order must be >= 1, got {k}")
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("rank_one needs a nonempty vector")
    if x.shape[0] ** k > DENSIFY_LIMIT:
        raise ValueError(f"refusing to materialize {x.shape[0]}**{k} entries")
    dense = reduce(np.multiply.outer, [x] * k)
    return Tensor.from_dense(dense)


def componentwise_power(x, p: float) -> np.ndarray:
    """Componentwise power ``x_i**p``; fractional ``p`` requires ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    p = float(p)
    if not p.is_integer() and np.any(x < 0):
        raise ValueError(f"fractional power {p} of a vector with negative components")
    return x ** p


def principal_subtensor(A: Tensor, keep) -> Tensor:
    """Restriction of every index position to ``keep`` (0-based, reindexed)."""
    keep = sorted({int(i) for i in keep})
    if not keep:
        raise ValueError("principal subtensor needs a nonempty index set")
    if keep[0] < 0 or keep[-1] >= A.dim:
        raise ValueError(f"index set {keep} out of range for dimension {A.dim}")
    pos = {orig: new for new, orig in enumerate(keep)}
    entries = []
    for key, value in A.items():
        if all(i in pos for i in key):
            entries.append((tuple(pos[i] for i in key), value))
    return Tensor(A.order, len(keep), entries)
