"""Plain-text tensor/vector formats and random strong-M instance generation.

Formats (1-based indices, values printed with 17 significant digits so that
parse(serialize(.)) is bit-exact):

    tensor m n nnz          vector n
    i1 ... im value         value
    ...                     ...
"""

from __future__ import annotations

import itertools

import numpy as np

from .classify import SpectralBracket, is_strong_m_tensor, spectral_radius
from .errors import GenerationError, ParseError
from .solvers import TcpInstance
from .tensor import DENSIFY_LIMIT, Tensor, apply, identity_tensor

__all__ = [
    "serialize_tensor",
    "parse_tensor",
    "serialize_vector",
    "parse_vector",
    "strong_m_from",
    "generate_instance",
]


def _fmt(value: float) -> str:
    return format(value, ".17g")


def serialize_tensor(tensor: Tensor) -> str:
    lines = [f"tensor {tensor.order} {tensor.dim} {tensor.nnz}"]
    for key, value in tensor.items():
        lines.append(" ".join(str(i + 1) for i in key) + " " + _fmt(value))
    return "\n".join(lines) + "\n"


def serialize_vector(x) -> str:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("vectors must be one-dimensional")
    return "\n".join([f"vector {x.shape[0]}"] + [_fmt(v) for v in x]) + "\n"


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        if raw.strip():
            yield number, raw.split()


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line, f"{what} must be an integer, got {token!r}") from None


def _parse_float(token: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(line, f"bad value {token!r}") from None


def parse_tensor(text: str) -> Tensor:
    """Parse the ``tensor m n nnz`` format; blank lines are ignored."""
    lines = _content_lines(text)
    try:
        header_line, header = next(lines)
    except StopIteration:
        raise ParseError(1, "empty input") from None
    if len(header) != 4 or header[0] != "tensor":
        raise ParseError(header_line, "expected header 'tensor m n nnz'")
    order = _parse_int(header[1], header_line, "order")
    dim = _parse_int(header[2], header_line, "dimension")
    nnz = _parse_int(header[3], header_line, "nonzero count")
    if order < 2:
        raise ParseError(header_line, f"tensor order must be >= 2, got {order}")
    if dim < 1:
        raise ParseError(header_line, f"tensor dimension must be >= 1, got {dim}")
    if nnz < 0:
        raise ParseError(header_line, f"nonzero count must be >= 0, got {nnz}")
    entries: dict[tuple[int, ...], float] = {}
    count = 0
    for number, tokens in lines:
        count += 1
        if count > nnz:
            raise ParseError(number, f"more than the declared {nnz} entries")
        if len(tokens) != order + 1:
            raise ParseError(number, f"expected {order} indices and one value")
        key = tuple(_parse_int(t, number, "index") - 1 for t in tokens[:order])
        for i in key:
            if not 0 <= i < dim:
                raise ParseError(number, f"index {i + 1} outside 1..{dim}")
        if key in entries:
            raise ParseError(number, f"duplicate index tuple {tuple(i + 1 for i in key)}")
        entries[key] = _parse_float(tokens[order], number)
    if count != nnz:
        raise ParseError(len(text.splitlines()) + 1, f"expected {nnz} entries, found {count}")
    return Tensor(order, dim, entries)


def parse_vector(text: str) -> np.ndarray:
    """Parse the ``vector n`` format; blank lines are ignored."""
    lines = _content_lines(text)
    try:
        header_line, header = next(lines)
    except StopIteration:
        raise ParseError(1, "empty input") from None
    if len(header) != 2 or header[0] != "vector":
        raise ParseError(header_line, "expected header 'vector n'")
    dim = _parse_int(header[1], header_line, "dimension")
    if dim < 1:
        raise ParseError(header_line, f"vector dimension must be >= 1, got {dim}")
    values = []
    for number, tokens in lines:
        if len(values) == dim:
            raise ParseError(number, f"more than the declared {dim} values")
        if len(tokens) != 1:
            raise ParseError(number, "expected one value per line")
        values.append(_parse_float(tokens[0], number))
    if len(values) != dim:
        raise ParseError(len(text.splitlines()) + 1, f"expected {dim} values, found {len(values)}")
    return np.array(values)


def strong_m_from(
    B: Tensor, margin: float, tol: float = 1e-10, max_iter: int = 10_000
) -> tuple[float, Tensor, SpectralBracket]:
    """Shift a nonnegative tensor into a strong M-tensor: ``A = s I - B``.

    ``s = (1 + margin) * hi`` clears the upper bound of the spectral-radius
    bracket of ``B``, so ``s > rho(B)`` holds even when the bracket did not
    converge.  Returns ``(s, A, bracket)``.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    bracket = spectral_radius(B, tol=tol, max_iter=max_iter)
    s = (1.0 + margin) * bracket.hi
    return s, s * identity_tensor(B.order, B.dim) - B, bracket


def _draw_nonnegative_tensor(rng, order: int, dim: int, density: float) -> Tensor:
    entries = {}
    for key in itertools.product(range(dim), repeat=order):
        if all(i == key[0] for i in key):
            entries[key] = rng.uniform(0.1, 1.0)
        elif rng.uniform() < density:
            entries[key] = rng.uniform(0.1, 1.0)
    return Tensor(order, dim, entries)


def generate_instance(
    n: int,
    m: int,
    density: float,
    margin: float,
    rng_seed: int,
    redraw_budget: int = 500,
) -> TcpInstance:
    """Random strong-M instance with a planted sparse nonnegative solution.

    Draws ``B >= 0`` with the given off-diagonal density (diagonal always
    present), shifts it via :func:`strong_m_from`, plants a sparse ``x0 >= 0``
    and sets ``b = A x0^{m-1}``.  Draws whose ``b`` has a negative component,
    or whose strong-M verdict is not certified, are redrawn; the budget
    counts every redraw.  Deterministic for a fixed ``rng_seed``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if m < 2:
        raise ValueError("order must be >= 2")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    if margin <= 0:
        raise ValueError("margin must be positive")
    if n ** m > DENSIFY_LIMIT:
        raise ValueError(f"refusing to generate a tensor with {n}**{m} candidate entries")
    rng = np.random.default_rng(rng_seed)
    attempts = 0
    while attempts < redraw_budget:
        attempts += 1
        B = _draw_nonnegative_tensor(rng, m, n, density)
        _, A, _ = strong_m_from(B, margin)
        if is_strong_m_tensor(A) is not True:
            continue
        for _ in range(20):
            attempts += 1
            x0 = np.zeros(n)
            size = int(rng.integers(1, n + 1))
            planted = np.sort(rng.choice(n, size=size, replace=False))
            x0[planted] = rng.uniform(0.5, 1.5, size=size)
            b = apply(A, x0)
            if np.all(b >= 0):
                return TcpInstance(A, b)
            if attempts >= redraw_budget:
                break
    raise GenerationError(
        f"no nonnegative right-hand side within {redraw_budget} draws "
        f"(n={n}, m={m}, density={density}, margin={margin}, seed={rng_seed})"
    )
