"""The double complex of a pair of left-right Hopf modules, its homotopies and sub-bicomplexes."""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Callable, Literal, Optional

from loguru import logger

from app.core.exceptions import (
    AssertionFailure,
    ClosureViolationError,
    PreconditionError,
    SkewAntipodeMissingError,
)
from app.core.linalg import SparseMatrix, Subspace, image_basis, intersect, kernel_basis, quotient_dim
from app.models.v1 import CohomologyReport, Verdict
from app.services.base import (
    Bicomplex,
    Bidegree,
    HomElement,
    HomSpace,
    Post,
    Pre,
    assemble,
    coproduct_combinations,
    identity_pre,
    tensor_terms,
    total_cohomology,
)
from app.services.bialgebra import AntipodeKind, Bialgebra, solve_antipode
from app.services.structures import (
    FLAVOR_CONDITIONS,
    StructuredModule,
    check_conditions,
    check_hopf_module,
    free_hopf_module,
    fundamental_decomposition,
    structure_defects,
)
from app.services.yetter_drinfeld import YDBicomplexBuilder

Flavor = Literal["r", "l", "t"]


class HopfBicomplexBuilder(YDBicomplexBuilder):
    """
    Faces of C^{n,p}(M, N) for left-right Hopf modules.

    Only the last b face (a^{n+1} acts on m with no coproduct legs) and the
    first c face (the new leg is (f⁰)₁ alone) differ from the YD faces.
    """

    kind = "hopf"

    def _b_last(self, bd: Bidegree) -> tuple[Pre, Optional[Post]]:
        # f(a¹⊗…⊗aⁿ⊗a^{n+1}·m)
        n = bd.n
        act = self.source.action.act

        def pre(tin):
            for u, c in act(tin[n], tin[n + 1]).items():
                yield tin[:n] + (u,), None, c

        return pre, None

    def _c_first(self, bd: Bidegree) -> tuple[Pre, Post]:
        # ρ_N(f⁰) ⊗ f¹ ⊗ … ⊗ fᵖ
        coact = self.target.coaction.coact

        def post(sout, _):
            for v0, h, c in coact(sout[0]):
                yield (v0, h) + sout[1:], c

        return identity_pre(self.field.one), post


def hopf_bicomplex(b: Bialgebra, m: StructuredModule, n: StructuredModule, qmax: int) -> Bicomplex:
    return HopfBicomplexBuilder(b, m, n).build(qmax)


# Contracting homotopies on free Hopf modules V⊗A, W⊗A

def _free_builder(b: Bialgebra, dim_v: int, dim_w: int) -> HopfBicomplexBuilder:
    return HopfBicomplexBuilder(b, free_hopf_module(dim_v, b), free_hopf_module(dim_w, b))


def row_homotopy_matrix(builder: HopfBicomplexBuilder, bd: Bidegree) -> SparseMatrix:
    """Y^{n+1,p} -> Y^{n,p}, f(a¹…aⁿ⊗v⊗a) = (-1)^{n+1} g(a¹…aⁿ⊗a⊗v⊗1)."""
    b, n, d = builder.bialgebra, bd.n, builder.d
    sign = -builder.field.one if n % 2 == 0 else builder.field.one
    unit = b.algebra.unit_vector

    def pre(tin):
        v, a = divmod(tin[n], d)
        for k, c in unit.items():
            yield tin[:n] + (a, v * d + k), None, sign * c

    return assemble(builder.field, builder.space(Bidegree(n + 1, bd.p)), builder.space(bd), pre,
                    label=f"row homotopy at {bd}")


def col_homotopy_matrix(builder: HopfBicomplexBuilder, bd: Bidegree) -> SparseMatrix:
    """Y^{n,p+1} -> Y^{n,p}, f = (id_W⊗ε⊗id_A^{p+1})∘g."""
    b, d = builder.bialgebra, builder.d
    counit = b.counit_values

    def post(sout, _):
        w, h = divmod(sout[0], d)
        if counit[h]:
            yield (w * d + sout[1],) + sout[2:], counit[h]

    return assemble(builder.field, builder.space(Bidegree(bd.n, bd.p + 1)), builder.space(bd),
                    identity_pre(builder.field.one), post, label=f"column homotopy at {bd}")


def _apply_homotopy(builder: HopfBicomplexBuilder, g: HomElement, target: Bidegree, homotopy: SparseMatrix,
                    differential: SparseMatrix, next_differential: SparseMatrix, name: str) -> HomElement:
    F = builder.field
    vector = g.vector(F)
    if not (next_differential @ vector).is_zero():
        raise PreconditionError(f"{name}: g is not a cocycle of the {name.split()[0]} differential")
    f = homotopy @ vector
    if differential @ f != vector:
        raise AssertionFailure(f"{name} does not reproduce g at {target}")
    return HomElement.from_column(target, builder.space(target), f.column(0))


def row_homotopy(b: Bialgebra, dim_v: int, dim_w: int, g: HomElement,
                 builder: Optional[HopfBicomplexBuilder] = None) -> HomElement:
    """For g in ker d_m^{n+1,p} on V⊗A, W⊗A return f with d_m^{n,p} f = g."""
    builder = builder or _free_builder(b, dim_v, dim_w)
    bd = g.bidegree
    if bd.n < 1:
        raise PreconditionError("row homotopy needs n+1 >= 1")
    target = Bidegree(bd.n - 1, bd.p)
    return _apply_homotopy(builder, g, target, row_homotopy_matrix(builder, target),
                           builder.differential_dm(target), builder.differential_dm(bd), "row homotopy")


def col_homotopy(b: Bialgebra, dim_v: int, dim_w: int, g: HomElement,
                 builder: Optional[HopfBicomplexBuilder] = None) -> HomElement:
    """For g in ker d_c^{n,p+1} on V⊗A, W⊗A return f with d_c^{n,p} f = g."""
    builder = builder or _free_builder(b, dim_v, dim_w)
    bd = g.bidegree
    if bd.p < 1:
        raise PreconditionError("column homotopy needs p+1 >= 1")
    target = Bidegree(bd.n, bd.p - 1)
    return _apply_homotopy(builder, g, target, col_homotopy_matrix(builder, target),
                           builder.differential_dc(target), builder.differential_dc(bd), "column homotopy")


def column_cohomology(builder: HopfBicomplexBuilder, qmax: int) -> list[int]:
    """
    Cohomology read off the n = 0 column, valid when every row is acyclic:
    H⁰ = ker d_m^{0,0} ∩ ker d_c^{0,0} and
    H^{p+1} = (ker d_m^{0,p+1} ∩ ker d_c^{0,p+1}) / d_c^{0,p}(ker d_m^{0,p}).
    """
    dims = []
    for q in range(qmax):
        bd = Bidegree(0, q)
        cycles = intersect(kernel_basis(builder.differential_dm(bd)), kernel_basis(builder.differential_dc(bd)))
        if q == 0:
            dims.append(cycles.dim)
            continue
        previous = Bidegree(0, q - 1)
        row_cycles = kernel_basis(builder.differential_dm(previous))
        boundaries = image_basis(builder.differential_dc(previous) @ row_cycles.basis)
        dims.append(quotient_dim(cycles, boundaries))
    logger.info("column cohomology: {}", dims)
    return dims


@dataclass
class VanishingResult:
    report: CohomologyReport
    column: list[int]
    verdicts: list[Verdict] = dataclass_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if v.asserted)


def _vanishing_verdicts(report: CohomologyReport, column: Optional[list[int]], label: str) -> list[Verdict]:
    positive = [row for row in report.rows if row.degree >= 1]
    nonzero = [f"H^{row.degree} = {row.cohomology}" for row in positive if row.cohomology]
    verdicts = [Verdict(name=f"{label}: H^n = 0 for n >= 1", passed=not nonzero, detail=", ".join(nonzero))]
    if column is not None:
        agree = column == report.dims()
        verdicts.append(Verdict(name=f"{label}: column path agrees with the total complex", passed=agree,
                                detail=f"column {column}, total {report.dims()}"))
    return verdicts


def hopf_vanishing_check(b: Bialgebra, dim_v: int, dim_w: int, qmax: int) -> VanishingResult:
    """H^n(V⊗A, W⊗A) for n < qmax, directly and through the column path."""
    builder = _free_builder(b, dim_v, dim_w)
    report = total_cohomology(builder.build(qmax))
    column = column_cohomology(builder, qmax)
    return VanishingResult(report, column, _vanishing_verdicts(report, column, "free Hopf modules"))


def hopf_vanishing_general(b: Bialgebra, m: StructuredModule, n: StructuredModule, qmax: int) -> VanishingResult:
    """H^n(M, N) = 0 for n >= 1 on arbitrary Hopf modules over a bialgebra with skew antipode."""
    if solve_antipode(b, AntipodeKind.SKEW) is None:
        raise SkewAntipodeMissingError(f"{b.name} has no skew antipode")
    for module in (m, n):
        if structure_defects(b, module) or check_hopf_module(b, module):
            raise PreconditionError(f"{module.name} is not a left-right Hopf module")
    verdicts = []
    for module in (m, n):
        decomposition = fundamental_decomposition(b, module)
        verdicts.append(Verdict(name=f"{module.name} ≅ V⊗A", passed=True,
                                detail=f"dim V = {decomposition.coinvariants.dim}"))
    report = total_cohomology(HopfBicomplexBuilder(b, m, n).build(qmax))
    verdicts += _vanishing_verdicts(report, None, f"({m.name}, {n.name})")
    return VanishingResult(report, [], verdicts)


# Sub-bicomplexes of equivariant cochains

def right_defect_map(builder: HopfBicomplexBuilder, bd: Bidegree) -> SparseMatrix:
    """f ↦ f((…⊗m)·b) - f(…⊗m)·b with the diagonal right action Σ x·b₁⊗a¹b₂⊗…⊗aᵖb_{p+1}."""
    b, n, p, d = builder.bialgebra, bd.n, bd.p, builder.d
    source = builder.space(bd)
    target = HomSpace(source.in_dims + (d,), source.out_dims)
    act_m = builder.source.right_action.act
    act_n = builder.target.right_action.act
    one = builder.field.one

    def pre_inside(tin):
        for u, c in act_m(tin[n + 1], tin[n]).items():
            yield tin[:n] + (u,), None, c

    def pre_outside(tin):
        yield tin[:n + 1], tin[n + 1], one

    def post_outside(sout, letter):
        for legs, c in b.coproduct_terms(letter, p):
            factors = [act_n(legs[0], sout[0])] + [b.product(sout[k + 1], legs[k + 1]) for k in range(p)]
            for tout, c2 in tensor_terms(factors):
                yield tout, c * c2

    label = f"right equivariance at {bd}"
    return (assemble(builder.field, source, target, pre_inside, label=label)
            - assemble(builder.field, source, target, pre_outside, post_outside, label=label))


def left_defect_map(builder: HopfBicomplexBuilder, bd: Bidegree) -> SparseMatrix:
    """f ↦ (id⊗f)∘λ - λ∘f with λ(a¹…aⁿ⊗m) = Σ (a¹)₁…(aⁿ)₁m₍₋₁₎ ⊗ (a¹)₂…(aⁿ)₂⊗m₍₀₎."""
    b, n, d = builder.bialgebra, bd.n, builder.d
    source = builder.space(bd)
    target = HomSpace(source.in_dims, (d,) + source.out_dims)
    coact_m = builder.source.left_coaction.coact
    coact_n = builder.target.left_coaction.coact

    def pre_inside(tin):
        for firsts, seconds, coeff in coproduct_combinations(b, tin[:n]):
            for u0, h, c in coact_m(tin[n]):
                yield seconds + (u0,), firsts + (h,), coeff * c

    def post_inside(sout, word):
        for z, c in b.product_word(word).items():
            yield (z,) + sout, c

    def post_outside(sout, _):
        for v0, h, c in coact_n(sout[0]):
            yield (h, v0) + sout[1:], c

    label = f"left equivariance at {bd}"
    return (assemble(builder.field, source, target, pre_inside, post_inside, label=label)
            - assemble(builder.field, source, target, identity_pre(builder.field.one), post_outside, label=label))


_FLAVOR_DEFECTS: dict[str, tuple[Callable[[HopfBicomplexBuilder, Bidegree], SparseMatrix], ...]] = {
    "r": (right_defect_map,),
    "l": (left_defect_map,),
    "t": (right_defect_map, left_defect_map),
}


@dataclass
class RestrictedResult:
    flavor: str
    bicomplex: Bicomplex
    report: CohomologyReport
    subspaces: dict[Bidegree, Subspace]
    closure: list[Verdict]


def equivariant_subspace(builder: HopfBicomplexBuilder, bd: Bidegree, flavor: Flavor) -> Subspace:
    kernels = [kernel_basis(defect(builder, bd)) for defect in _FLAVOR_DEFECTS[flavor]]
    space = kernels[0]
    for other in kernels[1:]:
        space = intersect(space, other)
    return space


def restricted_bicomplex(b: Bialgebra, m: StructuredModule, n: StructuredModule, flavor: Flavor,
                         qmax: int) -> RestrictedResult:
    """
    R, L or T sub-bicomplex of C^{n,p}(M, N): equivariant cochains, their closure
    under d_m and d_c, and the cohomology computed in subspace coordinates.
    """
    if flavor not in _FLAVOR_DEFECTS:
        raise PreconditionError(f"unknown flavor {flavor!r}")
    for module in (m, n):
        defects = structure_defects(b, module) + check_conditions(b, module, FLAVOR_CONDITIONS[flavor])
        if defects:
            raise PreconditionError(f"{module.name} fails {defects[0].condition} for flavor {flavor}")
    builder = HopfBicomplexBuilder(b, m, n)
    full = builder.build(qmax)
    subspaces = {bd: equivariant_subspace(builder, bd, flavor) for bd in full.dims}

    closure: list[Verdict] = []
    dm: dict[Bidegree, SparseMatrix] = {}
    dc: dict[Bidegree, SparseMatrix] = {}
    for bd in full.dm:
        basis = subspaces[bd].basis
        for name, differential, target in (("d_m", full.dm[bd], Bidegree(bd.n + 1, bd.p)),
                                           ("d_c", full.dc[bd], Bidegree(bd.n, bd.p + 1))):
            image = differential @ basis
            residual = [defect(builder, target) @ image for defect in _FLAVOR_DEFECTS[flavor]]
            broken = sorted({j for r in residual for j in r.nonzero_columns()})
            verdict = Verdict(name=f"{flavor}: {name} closed at {bd}", passed=not broken,
                              detail=f"basis vectors {broken} leave the subspace" if broken else "")
            closure.append(verdict)
            if broken:
                raise ClosureViolationError(verdict.detail, context={"bidegree": bd, "differential": name})
            restricted = subspaces[target].coordinates(image)
            (dm if name == "d_m" else dc)[bd] = restricted

    bicomplex = Bicomplex(f"restricted-{flavor}", qmax, b.field,
                          {bd: s.dim for bd, s in subspaces.items()}, dm, dc)
    report = total_cohomology(bicomplex)
    logger.info("restricted {} cohomology of ({}, {}): {}", flavor, m.name, n.name, report.dims())
    return RestrictedResult(flavor, bicomplex, report, subspaces, closure)


def homotopy_sweep(b: Bialgebra, dim_v: int, dim_w: int, qmax: int) -> list[Verdict]:
    """Apply both homotopies to every kernel basis vector of d_m and d_c with n+p <= qmax."""
    builder = _free_builder(b, dim_v, dim_w)
    verdicts = []
    for q in range(1, qmax + 1):
        for n in range(q + 1):
            bd = Bidegree(n, q - n)
            space = builder.space(bd)
            for name, differential, homotopy, needed in (
                ("row", builder.differential_dm, row_homotopy, bd.n),
                ("column", builder.differential_dc, col_homotopy, bd.p),
            ):
                if not needed:
                    continue
                kernel = kernel_basis(differential(bd))
                failures = []
                for k in range(kernel.dim):
                    g = HomElement.from_column(bd, space, kernel.vector(k))
                    try:
                        homotopy(b, dim_v, dim_w, g, builder=builder)
                    except AssertionFailure:
                        failures.append(k)
                verdicts.append(Verdict(name=f"{name} homotopy at {bd}", passed=not failures,
                                        detail=f"{kernel.dim} kernel vectors"
                                               + (f", failing {failures}" if failures else "")))
    return verdicts
