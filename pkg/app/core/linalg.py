"""
Exact sparse linear algebra over QQ and GF(p).

Matrices are immutable dict-of-dict row maps holding sympy ground-domain
elements. Elimination is fraction-free over the integers for rational
matrices (rows kept primitive) and plain Gaussian elimination over prime
fields. Pivots are chosen deterministically: among the columns with the fewest
nonzeros, the entry with the smallest (row, column) position.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass
from itertools import product
from typing import Any, Iterable, Iterator, Mapping, Optional, Sequence

from loguru import logger
from sympy.polys.domains import QQ

from app.config import get_settings
from app.core.exceptions import (
    BudgetExceededError,
    ContainmentViolationError,
    DimensionMismatchError,
    NotInSpanError,
    PreconditionError,
)
from app.core.field import FieldSpec, require_same_field

Row = dict[int, Any]

_budget_override: ContextVar[Optional[int]] = ContextVar("entry_budget", default=None)


def current_budget() -> int:
    override = _budget_override.get()
    return override if override is not None else get_settings().entry_budget


@contextmanager
def entry_budget_limit(budget: int) -> Iterator[None]:
    token = _budget_override.set(budget)
    try:
        yield
    finally:
        _budget_override.reset(token)


def check_budget(rows: int, cols: int, label: str = "matrix") -> None:
    budget = current_budget()
    if rows * cols > budget:
        raise BudgetExceededError(
            f"{label} of shape {rows}x{cols} exceeds the entry budget of {budget}",
            context={"rows": rows, "cols": cols, "label": label},
        )


class SparseMatrix:
    """Immutable sparse matrix over a :class:`FieldSpec`."""

    __slots__ = ("field", "rows", "cols", "_data")

    def __init__(self, field: FieldSpec, rows: int, cols: int, data: Optional[dict[int, Row]] = None,
                 *, label: str = "matrix"):
        check_budget(rows, cols, label)
        self.field = field
        self.rows = rows
        self.cols = cols
        self._data: dict[int, Row] = data if data is not None else {}

    # construction

    @classmethod
    def from_entries(cls, field: FieldSpec, rows: int, cols: int,
                     entries: Iterable[tuple[int, int, Any]]) -> "SparseMatrix":
        data: dict[int, Row] = {}
        for i, j, value in entries:
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatchError(f"entry ({i}, {j}) outside a {rows}x{cols} matrix")
            row = data.setdefault(i, {})
            if j in row:
                raise PreconditionError(f"duplicate entry at ({i}, {j})")
            row[j] = field.coerce(value)
        return cls(field, rows, cols, _prune(data))

    @classmethod
    def from_dense(cls, field: FieldSpec, values: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "SparseMatrix":
        ncols = cols if cols is not None else (len(values[0]) if values else 0)
        entries = ((i, j, v) for i, row in enumerate(values) for j, v in enumerate(row))
        return cls.from_entries(field, len(values), ncols, entries)

    @classmethod
    def from_columns(cls, field: FieldSpec, rows: int, columns: Sequence[Mapping[int, Any]]) -> "SparseMatrix":
        data: dict[int, Row] = {}
        for j, column in enumerate(columns):
            for i, value in column.items():
                if value:
                    data.setdefault(i, {})[j] = value
        return cls(field, rows, len(columns), data)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "SparseMatrix":
        return cls(field, rows, cols, {})

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "SparseMatrix":
        one = field.one
        return cls(field, n, n, {i: {i: one} for i in range(n)})

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._data.values())

    def get(self, i: int, j: int) -> Any:
        return self._data.get(i, {}).get(j, self.field.zero)

    def row(self, i: int) -> Mapping[int, Any]:
        return self._data.get(i, {})

    def row_items(self) -> Iterator[tuple[int, Mapping[int, Any]]]:
        for i in sorted(self._data):
            yield i, self._data[i]

    def entries(self) -> list[tuple[int, int, Any]]:
        return [(i, j, self._data[i][j]) for i in sorted(self._data) for j in sorted(self._data[i])]

    def columns(self) -> list[Row]:
        out: list[Row] = [{} for _ in range(self.cols)]
        for i, row in self._data.items():
            for j, value in row.items():
                out[j][i] = value
        return out

    def column(self, j: int) -> Row:
        return {i: row[j] for i, row in self._data.items() if j in row}

    def nonzero_columns(self) -> list[int]:
        return sorted({j for row in self._data.values() for j in row})

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list[Any]]:
        zero = self.field.zero
        return [[self._data.get(i, {}).get(j, zero) for j in range(self.cols)] for i in range(self.rows)]

    # arithmetic

    def _check_field(self, other: "SparseMatrix") -> None:
        require_same_field(self.field, other.field)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.field == other.field and self.shape == other.shape and self._data == other._data)

    __hash__ = None  # type: ignore[assignment]

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        odata = other._data
        out: dict[int, Row] = {}
        for i, row in self._data.items():
            acc: Row = {}
            for k, a in row.items():
                orow = odata.get(k)
                if not orow:
                    continue
                for j, b in orow.items():
                    v = acc.get(j)
                    acc[j] = a * b if v is None else v + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                out[i] = acc
        return SparseMatrix(self.field, self.rows, other.cols, out)

    def _combine(self, other: "SparseMatrix", sign: int) -> "SparseMatrix":
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape mismatch {self.shape} vs {other.shape}")
        out = {i: dict(row) for i, row in self._data.items()}
        for i, row in other._data.items():
            target = out.setdefault(i, {})
            for j, value in row.items():
                v = target.get(j)
                new = (value if sign > 0 else -value) if v is None else (v + value if sign > 0 else v - value)
                if new:
                    target[j] = new
                else:
                    target.pop(j, None)
        return SparseMatrix(self.field, self.rows, self.cols, _prune(out))

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.rows, self.cols,
                            {i: {j: -v for j, v in row.items()} for i, row in self._data.items()})

    def scale(self, factor: Any) -> "SparseMatrix":
        c = self.field.coerce(factor)
        if not c:
            return SparseMatrix.zeros(self.field, self.rows, self.cols)
        return SparseMatrix(self.field, self.rows, self.cols,
                            {i: {j: c * v for j, v in row.items()} for i, row in self._data.items()})

    def transpose(self) -> "SparseMatrix":
        out: dict[int, Row] = {}
        for i, row in self._data.items():
            for j, value in row.items():
                out.setdefault(j, {})[i] = value
        return SparseMatrix(self.field, self.cols, self.rows, out)

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def kron(self, other: "SparseMatrix") -> "SparseMatrix":
        """Kronecker product; the left factor is the most significant index."""
        self._check_field(other)
        rows, cols = self.rows * other.rows, self.cols * other.cols
        check_budget(rows, cols, "kronecker product")
        out: dict[int, Row] = {}
        for i1, row1 in self._data.items():
            for i2, row2 in other._data.items():
                out[i1 * other.rows + i2] = {
                    j1 * other.cols + j2: a * b for j1, a in row1.items() for j2, b in row2.items()
                }
        return SparseMatrix(self.field, rows, cols, out)

    def select_columns(self, cols: Sequence[int]) -> "SparseMatrix":
        position = {j: k for k, j in enumerate(cols)}
        out: dict[int, Row] = {}
        for i, row in self._data.items():
            picked = {position[j]: v for j, v in row.items() if j in position}
            if picked:
                out[i] = picked
        return SparseMatrix(self.field, self.rows, len(cols), out)

    def select_rows(self, rows: Sequence[int]) -> "SparseMatrix":
        out = {k: dict(self._data[i]) for k, i in enumerate(rows) if i in self._data}
        return SparseMatrix(self.field, len(rows), self.cols, out)

    def apply(self, vector: Mapping[int, Any]) -> Row:
        out: Row = {}
        for i, row in self._data.items():
            acc = None
            for j, value in row.items():
                x = vector.get(j)
                if x:
                    acc = value * x if acc is None else acc + value * x
            if acc:
                out[i] = acc
        return out

    @staticmethod
    def hstack(*blocks: "SparseMatrix") -> "SparseMatrix":
        field = require_same_field(*(b.field for b in blocks))
        rows = blocks[0].rows
        out: dict[int, Row] = {}
        offset = 0
        for block in blocks:
            if block.rows != rows:
                raise DimensionMismatchError("hstack needs equal row counts")
            for i, row in block._data.items():
                target = out.setdefault(i, {})
                for j, value in row.items():
                    target[offset + j] = value
            offset += block.cols
        return SparseMatrix(field, rows, offset, out)

    @staticmethod
    def vstack(*blocks: "SparseMatrix") -> "SparseMatrix":
        field = require_same_field(*(b.field for b in blocks))
        cols = blocks[0].cols
        out: dict[int, Row] = {}
        offset = 0
        for block in blocks:
            if block.cols != cols:
                raise DimensionMismatchError("vstack needs equal column counts")
            for i, row in block._data.items():
                out[offset + i] = dict(row)
            offset += block.rows
        return SparseMatrix(field, offset, cols, out)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.field.label}, {self.rows}x{self.cols}, nnz={self.nnz})"


def _prune(data: dict[int, Row]) -> dict[int, Row]:
    out: dict[int, Row] = {}
    for i, row in data.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            out[i] = kept
    return out


# elimination

@dataclass
class _Echelon:
    pivots: list[tuple[int, Row]]
    residual: list[Row]


def _integral_row(row: Row) -> Row:
    denominator = 1
    for value in row.values():
        denominator = math.lcm(denominator, int(QQ.denom(value)))
    return _primitive({j: int(QQ.numer(v)) * (denominator // int(QQ.denom(v))) for j, v in row.items()})


def _primitive(row: Row) -> Row:
    g = 0
    for value in row.values():
        g = math.gcd(g, value)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def _eliminate(m: SparseMatrix, limit: Optional[int] = None) -> _Echelon:
    """
    Forward elimination with pivots restricted to columns below ``limit``.

    Returns pivot rows in selection order. A pivot row never contains the
    pivot column of an earlier pivot, so back substitution runs in reverse
    selection order.
    """
    field = m.field
    K = field.domain
    limit = m.cols if limit is None else limit
    fraction_free = field.is_rational

    active: dict[int, Row] = {}
    for i, row in m._data.items():
        active[i] = _integral_row(row) if fraction_free else dict(row)

    colrows: defaultdict[int, set[int]] = defaultdict(set)
    for i, row in active.items():
        for j in row:
            if j < limit:
                colrows[j].add(i)
    heap = [(len(s), min(s), j) for j, s in colrows.items()]
    heapq.heapify(heap)

    pivots: list[tuple[int, Row]] = []
    while heap:
        count, top, j = heapq.heappop(heap)
        members = colrows.get(j)
        if not members or len(members) != count or min(members) != top:
            continue
        targets = sorted(members - {top})
        prow = active.pop(top)
        touched: set[int] = set()
        for jj in prow:
            if jj < limit and jj != j:
                colrows[jj].discard(top)
                touched.add(jj)
        del colrows[j]
        pivot = prow[j]
        for r in targets:
            row = active[r]
            new = _reduce(row, prow, row[j], pivot, fraction_free)
            for jj in row:
                if jj < limit and jj != j and jj not in new:
                    colrows[jj].discard(r)
                    touched.add(jj)
            for jj in new:
                if jj < limit and jj not in row:
                    colrows[jj].add(r)
                    touched.add(jj)
            if new:
                active[r] = new
            else:
                del active[r]
        for jj in touched:
            s = colrows.get(jj)
            if s:
                heapq.heappush(heap, (len(s), min(s), jj))
            elif jj in colrows:
                del colrows[jj]
        pivots.append((j, prow))

    residual = [active[i] for i in sorted(active)]
    if fraction_free:
        pivots = [(j, {k: K(v) for k, v in row.items()}) for j, row in pivots]
        residual = [{k: K(v) for k, v in row.items()} for row in residual]
    return _Echelon(pivots, residual)


def _reduce(row: Row, prow: Row, factor: Any, pivot: Any, fraction_free: bool) -> Row:
    if fraction_free:
        new = {k: pivot * v for k, v in row.items()}
        scale = factor
    else:
        new = dict(row)
        scale = factor / pivot
    for k, v in prow.items():
        current = new.get(k)
        updated = -scale * v if current is None else current - scale * v
        if updated:
            new[k] = updated
        else:
            new.pop(k, None)
    return _primitive(new) if fraction_free and new else new


def _back_substitute(field: FieldSpec, pivots: list[tuple[int, Row]], parameter: Any) -> dict[int, Row]:
    """
    Express every pivot variable through the non-pivot variables accepted by
    ``parameter`` (other non-pivot variables are fixed to zero).
    """
    pivot_cols = {c for c, _ in pivots}
    coefficients: dict[int, Row] = {}
    for c, row in reversed(pivots):
        acc: Row = {}
        for j, value in row.items():
            if j == c:
                continue
            if j in pivot_cols:
                source = coefficients[j]
            elif parameter(j):
                source = {j: field.one}
            else:
                continue
            for k, w in source.items():
                current = acc.get(k)
                acc[k] = value * w if current is None else current + value * w
        inverse = -field.one / row[c]
        coefficients[c] = {k: inverse * v for k, v in acc.items() if v}
    return coefficients


def rank(m: SparseMatrix) -> int:
    r = len(_eliminate(m).pivots)
    logger.debug("rank of {} = {}", m, r)
    return r


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^ambient, spanned by the linearly independent columns of ``basis``."""

    ambient: int
    basis: SparseMatrix

    def __post_init__(self) -> None:
        if self.basis.rows != self.ambient:
            raise DimensionMismatchError(f"basis has {self.basis.rows} rows, ambient is {self.ambient}")

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @classmethod
    def spanned_by(cls, vectors: SparseMatrix) -> "Subspace":
        return image_basis(vectors)

    @classmethod
    def whole(cls, field: FieldSpec, ambient: int) -> "Subspace":
        return cls(ambient, SparseMatrix.identity(field, ambient))

    def contains(self, vectors: SparseMatrix) -> bool:
        if vectors.rows != self.ambient:
            raise DimensionMismatchError("vectors live in a different ambient space")
        augmented = SparseMatrix.hstack(self.basis, vectors)
        return not _eliminate(augmented, limit=self.dim).residual

    def coordinates(self, vectors: SparseMatrix) -> SparseMatrix:
        return solve(self.basis, vectors)

    def vector(self, k: int) -> Row:
        return self.basis.column(k)


def kernel_basis(m: SparseMatrix) -> Subspace:
    echelon = _eliminate(m)
    pivot_cols = {c for c, _ in echelon.pivots}
    free = [j for j in range(m.cols) if j not in pivot_cols]
    coefficients = _back_substitute(m.field, echelon.pivots, lambda j: True)
    columns: list[Row] = [{f: m.field.one} for f in free]
    position = {f: k for k, f in enumerate(free)}
    for c, coeffs in coefficients.items():
        for f, value in coeffs.items():
            columns[position[f]][c] = value
    logger.debug("kernel of {}: dimension {}", m, len(free))
    return Subspace(m.cols, SparseMatrix.from_columns(m.field, m.cols, columns))


def image_basis(m: SparseMatrix) -> Subspace:
    pivots = sorted(c for c, _ in _eliminate(m).pivots)
    return Subspace(m.rows, m.select_columns(pivots))


def solve(a: SparseMatrix, targets: SparseMatrix) -> SparseMatrix:
    """
    A matrix X with ``a @ X == targets``; free variables are set to zero.

    Raises :class:`NotInSpanError` when some target column is not in the
    column space of ``a``.
    """
    if a.rows != targets.rows:
        raise DimensionMismatchError(f"cannot solve {a.shape} against {targets.shape}")
    n = a.cols
    echelon = _eliminate(SparseMatrix.hstack(a, targets), limit=n)
    if echelon.residual:
        failing = sorted({j - n for row in echelon.residual for j in row})
        raise NotInSpanError(f"target columns {failing} are not in the column space", context={"columns": failing})
    coefficients = _back_substitute(a.field, echelon.pivots, lambda j: j >= n)
    # a @ x + targets @ (-1) == 0 on the augmented system
    data: dict[int, Row] = {}
    for c, coeffs in coefficients.items():
        row = {k - n: -v for k, v in coeffs.items()}
        if row:
            data[c] = row
    return SparseMatrix(a.field, n, targets.cols, data)


def inverse(m: SparseMatrix) -> SparseMatrix:
    if m.rows != m.cols:
        raise DimensionMismatchError(f"cannot invert a {m.rows}x{m.cols} matrix")
    if rank(m) != m.rows:
        raise PreconditionError("matrix is singular")
    return solve(m, SparseMatrix.identity(m.field, m.rows))


def quotient_dim(outer: Subspace, inner: Subspace) -> int:
    if outer.ambient != inner.ambient:
        raise DimensionMismatchError(f"ambient dimensions differ: {outer.ambient} vs {inner.ambient}")
    if inner.dim and not outer.contains(inner.basis):
        raise ContainmentViolationError(
            "inner subspace is not contained in the outer subspace (a composite of differentials is nonzero)",
            context={"outer": outer.dim, "inner": inner.dim},
        )
    return outer.dim - inner.dim


def intersect(a: Subspace, b: Subspace) -> Subspace:
    if a.ambient != b.ambient:
        raise DimensionMismatchError(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")
    if not a.dim or not b.dim:
        return Subspace(a.ambient, SparseMatrix.zeros(a.field, a.ambient, 0))
    relations = kernel_basis(SparseMatrix.hstack(a.basis, -b.basis))
    coefficients = relations.basis.select_rows(range(a.dim))
    return Subspace(a.ambient, a.basis @ coefficients)


# tensor index helpers

def flatten(indices: Sequence[int], dims: Sequence[int]) -> int:
    """Flat index of a pure tensor; the leftmost factor is the most significant."""
    flat = 0
    for index, dim in zip(indices, dims):
        flat = flat * dim + index
    return flat


def unflatten(flat: int, dims: Sequence[int]) -> tuple[int, ...]:
    out = []
    for dim in reversed(dims):
        flat, index = divmod(flat, dim)
        out.append(index)
    return tuple(reversed(out))


def tensor_permutation(field: FieldSpec, dims: Sequence[int], order: Sequence[int]) -> SparseMatrix:
    """The map x_0 ⊗ ... ⊗ x_{k-1} ↦ x_{order[0]} ⊗ ... ⊗ x_{order[k-1]}."""
    out_dims = [dims[o] for o in order]
    total = math.prod(dims)
    one = field.one
    data: dict[int, Row] = {}
    for indices in product(*(range(d) for d in dims)):
        target = flatten([indices[o] for o in order], out_dims)
        data[target] = {flatten(indices, dims): one}
    return SparseMatrix(field, total, total, data, label="tensor permutation")


def kron_all(*factors: SparseMatrix) -> SparseMatrix:
    result = factors[0]
    for factor in factors[1:]:
        result = result.kron(factor)
    return result
