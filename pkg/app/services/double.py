"""Drinfel'd double, YD modules as modules over it, and Ext over the double from the bar complex."""

from __future__ import annotations

import asyncio
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from typing import Any, Optional, Sequence

from loguru import logger

from app.constants import DOUBLE_CONVOLUTION, DOUBLE_CONVOLUTION_ORDERS
from app.core.exceptions import (
    ConventionMismatchError,
    DimensionMismatchError,
    PreconditionError,
    UnsupportedHypothesisError,
)
from app.core.field import FieldSpec, require_same_field
from app.core.linalg import Row, SparseMatrix, Subspace, image_basis, inverse, kernel_basis, quotient_dim, rank
from app.models.v1 import ComparisonRow, DefectEntry, Verdict
from app.services.base import HomSpace, assemble, total_cohomology
from app.services.bialgebra import Algebra, AntipodeKind, Bialgebra, solve_antipode, verify_algebra
from app.services.structures import StructuredModule, check_yd, intertwiners, left_action_defects, structure_defects
from app.services.yetter_drinfeld import yd_bicomplex

EXT_NMAX_LIMIT = 3


@dataclass(frozen=True, eq=False)
class DoubleAlgebra:
    """D(A) on A*⊗A with basis index i*d + a for φ_i⊗e_a."""

    algebra: Algebra
    source: Bialgebra
    convolution: str

    @property
    def field(self) -> FieldSpec:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim


@dataclass(frozen=True, eq=False)
class AlgebraModule:
    """A left module over an associative algebra; ``action`` is dim x (alg.dim*dim), column x*dim + u."""

    algebra: Algebra
    dim: int
    action: SparseMatrix
    name: str = "M"

    def __post_init__(self) -> None:
        expected = (self.dim, self.algebra.dim * self.dim)
        if self.action.shape != expected:
            raise DimensionMismatchError(f"action of {self.name} has shape {self.action.shape}, expected {expected}")
        require_same_field(self.algebra.field, self.action.field)

    @cached_property
    def _columns(self) -> list[Row]:
        return self.action.columns()

    def act(self, x: int, u: int) -> Row:
        return self._columns[x * self.dim + u]

    def defects(self) -> list[DefectEntry]:
        return left_action_defects(self.algebra, self.action, self.dim)


def _inverse_antipode(b: Bialgebra) -> SparseMatrix:
    antipode = solve_antipode(b, AntipodeKind.ANTIPODE)
    if antipode is None:
        raise UnsupportedHypothesisError(f"{b.name} has no antipode")
    if rank(antipode.matrix) != b.dim:
        raise UnsupportedHypothesisError(f"the antipode of {b.name} is not invertible")
    return inverse(antipode.matrix)


def drinfeld_double(b: Bialgebra, convolution: str = DOUBLE_CONVOLUTION) -> DoubleAlgebra:
    """
    (φ⊗a)(ψ⊗b) = Σ φ·(a₁⇀ψ↼S⁻¹(a₃)) ⊗ a₂b, unit ε⊗1.

    The result is checked for associativity and the unit law; a failure means
    the convolution order does not match the module transport.
    """
    if convolution not in DOUBLE_CONVOLUTION_ORDERS:
        raise PreconditionError(f"unknown convolution order {convolution!r}")
    F, d = b.field, b.dim
    one, zero = F.one, F.zero
    s_inv = _inverse_antipode(b).columns()
    split = [b.coproduct_terms(y, 1) for y in range(d)]
    standard = convolution == "standard"

    twisted_cache: dict[tuple[int, int], list[Row]] = {}

    def twisted(a1: int, a3: int) -> list[Row]:
        # x ↦ S⁻¹(a₃)·x·a₁, so (a₁⇀φ_j↼S⁻¹(a₃))(x) is the e_j coefficient
        key = (a1, a3)
        if key not in twisted_cache:
            twisted_cache[key] = [b.multiply(b.multiply(s_inv[a3], {x: one}), {a1: one}) for x in range(d)]
        return twisted_cache[key]

    def convolve(i: int, psi: list[Any]) -> Row:
        # (φ_i ψ)(y) = Σ φ_i(y₁)ψ(y₂), legs swapped for the co-opposite order
        out: Row = {}
        for y in range(d):
            total = zero
            for (y1, y2), c in split[y]:
                first, second = (y1, y2) if standard else (y2, y1)
                if first == i and psi[second]:
                    total += c * psi[second]
            if total:
                out[y] = total
        return out

    D = d * d
    columns: list[Row] = []
    for left in range(D):
        i, a = divmod(left, d)
        legs3 = b.coproduct_terms(a, 2)
        for right in range(D):
            j, bb = divmod(right, d)
            column: Row = {}
            for (a1, a2, a3), c in legs3:
                psi = [w.get(j, zero) for w in twisted(a1, a3)]
                phi = convolve(i, psi)
                if not phi:
                    continue
                for z, c2 in b.product(a2, bb).items():
                    for y, c3 in phi.items():
                        index = y * d + z
                        column[index] = column.get(index, zero) + c * c2 * c3
            columns.append({k: v for k, v in column.items() if v})
    mult = SparseMatrix.from_columns(F, D, columns)
    counit = b.counit_values
    unit = SparseMatrix.from_columns(F, D, [{
        i * d + k: counit[i] * u for i in range(d) if counit[i] for k, u in b.algebra.unit_vector.items()
    }])
    algebra = Algebra(F, D, mult, unit, name=f"D({b.name})")
    defects = verify_algebra(algebra)
    if defects:
        raise ConventionMismatchError(
            f"D({b.name}) with {convolution} convolution fails {defects[0].condition}",
            context={"witness": defects[0].witness},
        )
    logger.info("built D({}) of dimension {} ({} convolution)", b.name, D, convolution)
    return DoubleAlgebra(algebra, b, convolution)


def select_double(b: Bialgebra, modules: Sequence[StructuredModule] = ()) -> tuple[DoubleAlgebra, list[Verdict]]:
    """
    Try each documented convolution order, the pinned one first, against the
    two oracles: D(A) is an associative unital algebra and every module in
    ``modules`` transports to a D(A)-module. Returns the first double that
    passes and one verdict per order tried.
    """
    orders = (DOUBLE_CONVOLUTION,) + tuple(o for o in DOUBLE_CONVOLUTION_ORDERS if o != DOUBLE_CONVOLUTION)
    chosen: Optional[DoubleAlgebra] = None
    verdicts: list[Verdict] = []
    for order in orders:
        try:
            double = drinfeld_double(b, order)
            for m in modules:
                transport_yd(b, m, double)
        except ConventionMismatchError as exc:
            verdicts.append(Verdict(name=f"{order} convolution gives D({b.name})", passed=False,
                                    asserted=False, detail=exc.detail))
            continue
        verdicts.append(Verdict(name=f"{order} convolution gives D({b.name})", passed=True, asserted=False))
        chosen = chosen or double
    if chosen is None:
        raise ConventionMismatchError(f"no documented convolution order gives a double of {b.name}")
    if chosen.convolution != DOUBLE_CONVOLUTION:
        logger.warning("D({}) needs the {} convolution, not the pinned {}", b.name, chosen.convolution,
                       DOUBLE_CONVOLUTION)
    return chosen, verdicts


def double_action(double: DoubleAlgebra, m: StructuredModule) -> AlgebraModule:
    """(φ_i⊗a)·m = Σ φ_i((a·m)₁)(a·m)₀, without checking the module axioms."""
    m.require("action", "coaction")
    d, k = double.source.dim, m.dim
    require_same_field(double.field, m.field)
    zero = double.field.zero
    columns: list[Row] = []
    for x in range(double.dim):
        i, a = divmod(x, d)
        for u in range(k):
            column: Row = {}
            for w, c in m.action.act(a, u).items():
                for u0, h, c2 in m.coaction.coact(w):
                    if h == i:
                        column[u0] = column.get(u0, zero) + c * c2
            columns.append({key: v for key, v in column.items() if v})
    return AlgebraModule(double.algebra, k, SparseMatrix.from_columns(double.field, k, columns), name=m.name)


def transport_yd(b: Bialgebra, m: StructuredModule, double: Optional[DoubleAlgebra] = None) -> AlgebraModule:
    """A YD module as a D(A)-module; module axioms are verified exactly."""
    defects = structure_defects(b, m) + check_yd(b, m)
    if defects:
        raise PreconditionError(f"{m.name} is not a Yetter-Drinfel'd module ({defects[0].condition})")
    double = double or drinfeld_double(b)
    module = double_action(double, m)
    failures = module.defects()
    if failures:
        raise ConventionMismatchError(
            f"{m.name} transported to {double.algebra.name} fails {failures[0].condition}",
            context={"witness": failures[0].witness},
        )
    return module


def module_morphisms(m: AlgebraModule, n: AlgebraModule) -> Subspace:
    """Hom_alg(M, N) as a kernel, with vec index u*dimN + v."""
    alg = m.algebra
    Id = SparseMatrix.identity(alg.field, alg.dim)
    return intertwiners(alg.field, m.dim, n.dim, [lambda f: f @ m.action - n.action @ Id.kron(f)])


# Bar complex Hom(Bⁿ⊗M, N)

def bar_differential(m: AlgebraModule, n: AlgebraModule, degree: int) -> SparseMatrix:
    """(df)(x¹…x^{k+1}⊗u) = x¹·f(x²…) + Σ (-1)^i f(…x^i x^{i+1}…) + (-1)^{k+1} f(x¹…x^k⊗x^{k+1}·u)."""
    alg, field = m.algebra, m.algebra.field
    D = alg.dim
    source = HomSpace((D,) * degree + (m.dim,), (n.dim,))
    target = HomSpace((D,) * (degree + 1) + (m.dim,), (n.dim,))
    one = field.one
    label = f"bar differential in degree {degree}"

    def first_pre(tin):
        yield tin[1:], tin[0], one

    def first_post(sout, x):
        return [((v,), c) for v, c in n.act(x, sout[0]).items()]

    def middle_pre(i):
        def pre(tin):
            for z, c in alg.product(tin[i - 1], tin[i]).items():
                yield tin[:i - 1] + (z,) + tin[i + 1:], None, c
        return pre

    def last_pre(tin):
        for u, c in m.act(tin[degree], tin[degree + 1]).items():
            yield tin[:degree] + (u,), None, c

    total = assemble(field, source, target, first_pre, first_post, label=label)
    for i in range(1, degree + 1):
        face = assemble(field, source, target, middle_pre(i), label=label)
        total = total - face if i % 2 else total + face
    last = assemble(field, source, target, last_pre, label=label)
    return total - last if (degree + 1) % 2 else total + last


def ext_bar(m: AlgebraModule, n: AlgebraModule, nmax: int) -> list[int]:
    """dim Extⁿ(M, N) for n <= nmax from the bar resolution."""
    if m.algebra is not n.algebra:
        require_same_field(m.algebra.field, n.algebra.field)
        if m.algebra.dim != n.algebra.dim or m.algebra.mult != n.algebra.mult:
            raise PreconditionError("modules live over different algebras")
    if not 0 <= nmax <= EXT_NMAX_LIMIT:
        raise PreconditionError(f"nmax must lie between 0 and {EXT_NMAX_LIMIT}")
    for module in (m, n):
        failures = module.defects()
        if failures:
            raise PreconditionError(f"{module.name} is not a module ({failures[0].condition})")

    dims: list[int] = []
    boundaries: Optional[Subspace] = None
    for degree in range(nmax + 1):
        d_out = bar_differential(m, n, degree)
        cycles = kernel_basis(d_out)
        if boundaries is None:
            dims.append(cycles.dim)
        else:
            dims.append(quotient_dim(cycles, boundaries))
        boundaries = image_basis(d_out)
        logger.debug("Ext^{} over {} = {}", degree, m.algebra.name, dims[-1])
    logger.info("Ext over {}: {}", m.algebra.name, dims)
    return dims


@dataclass
class Comparison:
    rows: list[ComparisonRow]
    h: list[int]
    ext: list[int]
    ext_zero_oracle: int
    convolution: list[Verdict] = dataclass_field(default_factory=list)

    @property
    def verdicts(self) -> list[Verdict]:
        verdicts = [
            Verdict(name=f"H^{row.degree} = Ext^{row.degree}", passed=row.agree, asserted=row.asserted,
                    detail=f"H {row.h}, Ext {row.ext}")
            for row in self.rows
        ]
        verdicts.append(Verdict(name="Ext^0 = Hom over the double", passed=self.ext[0] == self.ext_zero_oracle,
                                detail=f"bar {self.ext[0]}, kernel solve {self.ext_zero_oracle}"))
        verdicts += self.convolution
        return verdicts


async def compare_h_ext(b: Bialgebra, m: StructuredModule, n: StructuredModule, nmax: int) -> Comparison:
    """
    dim Hⁿ(M, N) against dim Extⁿ_{D(A)}(M, N) for n <= nmax.

    Degrees 0 and 1 must agree; higher degrees are recorded without assertion.
    """
    if nmax < 0:
        raise PreconditionError("nmax must be non-negative")
    double, convolution = select_double(b, (m, n))
    source, target = transport_yd(b, m, double), transport_yd(b, n, double)

    def h_pipeline() -> list[int]:
        return total_cohomology(yd_bicomplex(b, m, n, nmax + 1)).dims()

    def ext_pipeline() -> list[int]:
        return ext_bar(source, target, nmax)

    h, ext = await asyncio.gather(asyncio.to_thread(h_pipeline), asyncio.to_thread(ext_pipeline))
    oracle = module_morphisms(source, target).dim
    rows = [ComparisonRow(degree=k, h=h[k], ext=ext[k], agree=h[k] == ext[k], asserted=k <= 1)
            for k in range(nmax + 1)]
    for row in rows:
        if not row.agree:
            log = logger.error if row.asserted else logger.info
            log("H^{} = {} but Ext^{} = {} for ({}, {})", row.degree, row.h, row.degree, row.ext, m.name, n.name)
    return Comparison(rows, h, ext, oracle, convolution)
