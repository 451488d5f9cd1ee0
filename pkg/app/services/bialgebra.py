from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from functools import cached_property
from typing import Any, Mapping, Optional, Sequence

from loguru import logger

from app.core.exceptions import DimensionMismatchError, NotInSpanError
from app.core.field import FieldSpec
from app.core.linalg import Row, SparseMatrix, check_budget, solve, tensor_permutation, unflatten
from app.models.v1 import DefectEntry


def matrix_defects(condition: str, lhs: SparseMatrix, rhs: SparseMatrix,
                   witness_dims: Sequence[int]) -> list[DefectEntry]:
    """One :class:`DefectEntry` per basis input on which ``lhs`` and ``rhs`` differ."""
    difference = lhs - rhs
    if difference.is_zero():
        return []
    columns = difference.columns()
    field = lhs.field
    return [
        DefectEntry(
            condition=condition,
            witness=list(unflatten(j, witness_dims)),
            vector={str(i): field.render(v) for i, v in sorted(columns[j].items())},
        )
        for j in difference.nonzero_columns()
    ]


@dataclass(frozen=True, eq=False)
class Algebra:
    """A finite dimensional associative unital algebra given by structure constants."""

    field: FieldSpec
    dim: int
    mult: SparseMatrix  # dim x dim², column a*dim+b holds e_a e_b
    unit: SparseMatrix  # dim x 1
    name: str = "algebra"

    @cached_property
    def _products(self) -> list[Row]:
        return self.mult.columns()

    @cached_property
    def _words(self) -> dict[tuple[int, ...], Row]:
        return {}

    @cached_property
    def unit_vector(self) -> Row:
        return self.unit.column(0)

    def product(self, a: int, b: int) -> Row:
        return self._products[a * self.dim + b]

    def multiply(self, x: Mapping[int, Any], y: Mapping[int, Any]) -> Row:
        out: Row = {}
        for a, s in x.items():
            for b, t in y.items():
                for c, u in self._products[a * self.dim + b].items():
                    current = out.get(c)
                    value = s * t * u
                    out[c] = value if current is None else current + value
        return {c: v for c, v in out.items() if v}

    def product_word(self, word: Sequence[int]) -> Row:
        """e_{w1} e_{w2} ... e_{wk}; the empty word is the unit."""
        key = tuple(word)
        cached = self._words.get(key)
        if cached is not None:
            return cached
        if not key:
            result = dict(self.unit_vector)
        elif len(key) == 1:
            result = {key[0]: self.field.one}
        else:
            result = self.multiply(self.product_word(key[:-1]), {key[-1]: self.field.one})
        self._words[key] = result
        return result

    def left_multiplication(self, a: int) -> SparseMatrix:
        columns = [self.product(a, b) for b in range(self.dim)]
        return SparseMatrix.from_columns(self.field, self.dim, columns)


def verify_algebra(alg: Algebra) -> list[DefectEntry]:
    d = alg.dim
    identity = SparseMatrix.identity(alg.field, d)
    mu = alg.mult
    violations = matrix_defects("associativity", mu @ mu.kron(identity), mu @ identity.kron(mu), (d, d, d))
    violations += matrix_defects("unit", mu @ alg.unit.kron(identity), identity, (d,))
    violations += matrix_defects("unit", mu @ identity.kron(alg.unit), identity, (d,))
    return violations


@dataclass(frozen=True, eq=False)
class Bialgebra:
    """
    A finite dimensional bialgebra by structure constants.

    ``comult`` is dim² x dim (column a holds Δ(e_a) with the pair (b, c) at
    b*dim+c) and ``counit`` is 1 x dim.
    """

    field: FieldSpec
    dim: int
    mult: SparseMatrix
    unit: SparseMatrix
    comult: SparseMatrix
    counit: SparseMatrix
    name: str = "bialgebra"
    _iterated: dict[int, SparseMatrix] = dataclass_field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        d = self.dim
        expected = {"mult": (d, d * d), "unit": (d, 1), "comult": (d * d, d), "counit": (1, d)}
        for attr, shape in expected.items():
            if getattr(self, attr).shape != shape:
                raise DimensionMismatchError(f"{attr} has shape {getattr(self, attr).shape}, expected {shape}")

    @classmethod
    def from_tables(cls, field: FieldSpec, dim: int,
                    mult: Mapping[tuple[int, int], Mapping[int, Any]],
                    comult: Mapping[int, Mapping[tuple[int, int], Any]],
                    unit: Mapping[int, Any], counit: Mapping[int, Any], name: str = "bialgebra") -> "Bialgebra":
        def index_ok(*indices: int) -> None:
            for i in indices:
                if not 0 <= i < dim:
                    raise DimensionMismatchError(f"basis index {i} outside dimension {dim}")

        mult_entries = []
        for (a, b), values in mult.items():
            for c, value in values.items():
                index_ok(a, b, c)
                mult_entries.append((c, a * dim + b, value))
        comult_entries = []
        for a, values in comult.items():
            for (b, c), value in values.items():
                index_ok(a, b, c)
                comult_entries.append((b * dim + c, a, value))
        for i in list(unit) + list(counit):
            index_ok(i)
        return cls(
            field=field,
            dim=dim,
            mult=SparseMatrix.from_entries(field, dim, dim * dim, mult_entries),
            unit=SparseMatrix.from_entries(field, dim, 1, [(i, 0, v) for i, v in unit.items()]),
            comult=SparseMatrix.from_entries(field, dim * dim, dim, comult_entries),
            counit=SparseMatrix.from_entries(field, 1, dim, [(0, i, v) for i, v in counit.items()]),
            name=name,
        )

    @cached_property
    def algebra(self) -> Algebra:
        return Algebra(self.field, self.dim, self.mult, self.unit, self.name)

    @cached_property
    def counit_values(self) -> list[Any]:
        return [self.counit.get(0, a) for a in range(self.dim)]

    @cached_property
    def _coproduct_terms(self) -> dict[int, list[list[tuple[tuple[int, ...], Any]]]]:
        return {}

    def coproduct_terms(self, a: int, p: int) -> list[tuple[tuple[int, ...], Any]]:
        """Δ_p(e_a) as (legs, coefficient) pairs with p+1 legs each."""
        table = self._coproduct_terms.get(p)
        if table is None:
            columns = delta_iter(self, p).columns()
            dims = (self.dim,) * (p + 1)
            table = [[(unflatten(i, dims), c) for i, c in sorted(col.items())] for col in columns]
            self._coproduct_terms[p] = table
        return table[a]

    def product(self, a: int, b: int) -> Row:
        return self.algebra.product(a, b)

    def product_word(self, word: Sequence[int]) -> Row:
        return self.algebra.product_word(word)

    def multiply(self, x: Mapping[int, Any], y: Mapping[int, Any]) -> Row:
        return self.algebra.multiply(x, y)

    def identity(self) -> SparseMatrix:
        return SparseMatrix.identity(self.field, self.dim)


def verify_bialgebra(b: Bialgebra) -> list[DefectEntry]:
    """All violated bialgebra axioms, each with a basis witness; empty iff ``b`` is a bialgebra."""
    d = b.dim
    F = b.field
    identity = b.identity()
    mu, delta, eta, eps = b.mult, b.comult, b.unit, b.counit
    violations = verify_algebra(b.algebra)
    violations += matrix_defects("coassociativity", delta.kron(identity) @ delta, identity.kron(delta) @ delta, (d,))
    violations += matrix_defects("counit", eps.kron(identity) @ delta, identity, (d,))
    violations += matrix_defects("counit", identity.kron(eps) @ delta, identity, (d,))
    middle = tensor_permutation(F, (d, d, d, d), (0, 2, 1, 3))
    violations += matrix_defects("bialgebra", delta @ mu, mu.kron(mu) @ middle @ delta.kron(delta), (d, d))
    violations += matrix_defects("bialgebra", eps @ mu, eps.kron(eps), (d, d))
    violations += matrix_defects("bialgebra", delta @ eta, eta.kron(eta), (1,))
    violations += matrix_defects("bialgebra", eps @ eta, SparseMatrix.identity(F, 1), (1,))
    if violations:
        logger.info("{} violates {} bialgebra axiom instances", b.name, len(violations))
    return violations


def delta_iter(b: Bialgebra, p: int) -> SparseMatrix:
    """Δ_p : A -> A^{p+1}; Δ_0 = id and Δ_p = (Δ ⊗ id^{p-1}) ∘ Δ_{p-1}."""
    if p < 0:
        raise ValueError("p must be non-negative")
    cached = b._iterated.get(p)
    if cached is not None:
        return cached
    if p == 0:
        result = b.identity()
    else:
        check_budget(b.dim ** (p + 1), b.dim, f"Δ_{p}")
        rest = SparseMatrix.identity(b.field, b.dim ** (p - 1))
        result = b.comult.kron(rest) @ delta_iter(b, p - 1)
    b._iterated[p] = result
    return result


class AntipodeKind(str, Enum):
    ANTIPODE = "antipode"
    SKEW = "skew-antipode"


@dataclass(frozen=True, eq=False)
class Antipode:
    kind: AntipodeKind
    matrix: SparseMatrix  # column j holds S(e_j)


def _convolution_system(b: Bialgebra, kind: AntipodeKind) -> tuple[SparseMatrix, SparseMatrix]:
    d = b.dim
    F = b.field
    entries: dict[tuple[int, int], Any] = {}

    def add(row: int, col: int, value: Any) -> None:
        current = entries.get((row, col))
        entries[(row, col)] = value if current is None else current + value

    for a in range(d):
        for (x, y), coeff in b.coproduct_terms(a, 1):
            # the skew antipode is the antipode of the co-opposite bialgebra
            first, second = (x, y) if kind is AntipodeKind.ANTIPODE else (y, x)
            for i in range(d):
                # Σ S(first) second  : unknown s[i, first]
                for k, v in b.product(i, second).items():
                    add(a * d + k, i * d + first, coeff * v)
                # Σ first S(second)  : unknown s[i, second]
                for k, v in b.product(first, i).items():
                    add(d * d + a * d + k, i * d + second, coeff * v)
    system = SparseMatrix.from_entries(F, 2 * d * d, d * d, [(r, c, v) for (r, c), v in entries.items()])
    rhs_entries = []
    for a in range(d):
        eps = b.counit_values[a]
        if not eps:
            continue
        for k, u in b.unit.column(0).items():
            rhs_entries.append((a * d + k, 0, eps * u))
            rhs_entries.append((d * d + a * d + k, 0, eps * u))
    rhs = SparseMatrix.from_entries(F, 2 * d * d, 1, rhs_entries)
    return system, rhs


def solve_antipode(b: Bialgebra, kind: AntipodeKind = AntipodeKind.ANTIPODE) -> Optional[Antipode]:
    """The (skew) antipode as a d x d matrix, or ``None`` when the convolution system is inconsistent."""
    kind = AntipodeKind(kind)
    system, rhs = _convolution_system(b, kind)
    try:
        solution = solve(system, rhs)
    except NotInSpanError:
        logger.info("{} has no {}", b.name, kind.value)
        return None
    d = b.dim
    values = solution.column(0)
    entries = [(index // d, index % d, value) for index, value in values.items()]
    antipode = Antipode(kind, SparseMatrix.from_entries(b.field, d, d, entries))
    logger.debug("solved {} of {}", kind.value, b.name)
    return antipode


def convolution_defects(b: Bialgebra, antipode: Antipode) -> list[DefectEntry]:
    d = b.dim
    identity = b.identity()
    delta = b.comult
    if antipode.kind is AntipodeKind.SKEW:
        delta = tensor_permutation(b.field, (d, d), (1, 0)) @ delta
    target = b.unit @ b.counit
    S = antipode.matrix
    defects = matrix_defects("left convolution", b.mult @ S.kron(identity) @ delta, target, (d,))
    defects += matrix_defects("right convolution", b.mult @ identity.kron(S) @ delta, target, (d,))
    return defects
