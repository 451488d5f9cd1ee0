"""The double complex Hom(Aⁿ⊗M, N⊗Aᵖ) of a pair of Yetter-Drinfel'd modules, and degree one."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

from loguru import logger

from app.core.exceptions import PreconditionError
from app.core.linalg import Row, SparseMatrix, Subspace, image_basis, kernel_basis, quotient_dim, tensor_permutation
from app.models.v1 import DefectEntry
from app.services.base import (
    Bidegree,
    BicomplexBuilder,
    HomElement,
    HomSpace,
    Post,
    Pre,
    coproduct_combinations,
    identity_pre,
    tensor_terms,
)
from app.services.bialgebra import Bialgebra
from app.services.structures import (
    ActionTensor,
    CoactionTensor,
    ModuleClass,
    Side,
    StructuredModule,
    check_conditions,
    structure_defects,
    vec,
)

Theory = Literal["yd", "hopf"]


class YDBicomplexBuilder(BicomplexBuilder):
    """
    Faces of Y^{n,p}(M, N) = Hom(Aⁿ⊗M, N⊗Aᵖ).

    In degenerate bidegrees the formulas collapse as follows: at n = 0,
    d_m = b_0 - b_1 with b_1 the last face; at p = 0 the coproduct legs are
    absent (Δ_0 = id), so b_0(f) = ω_N∘(id⊗f) and the last face lets the
    single leg of a^{n+1} act on m.
    """

    kind = "yd"

    def __init__(self, bialgebra: Bialgebra, source: StructuredModule, target: StructuredModule):
        source.require("action", "coaction")
        target.require("action", "coaction")
        super().__init__(bialgebra, source.dim, target.dim)
        self.source = source
        self.target = target

    def b_terms(self, bd: Bidegree, i: int) -> tuple[Pre, Optional[Post]]:
        n = bd.n
        if i == 0:
            return self._b_first(bd)
        if i == n + 1:
            return self._b_last(bd)
        b = self.bialgebra

        def pre(tin):
            for c, coeff in b.product(tin[i - 1], tin[i]).items():
                yield tin[:i - 1] + (c,) + tin[i + 1:], None, coeff

        return pre, None

    def c_terms(self, bd: Bidegree, j: int) -> tuple[Pre, Optional[Post]]:
        if j == 0:
            return self._c_first(bd)
        if j == bd.p + 1:
            return self._c_last(bd)
        b = self.bialgebra

        def post(sout, _):
            # sout = (v, k1..kp); Δ on leg j
            for legs, coeff in b.coproduct_terms(sout[j], 1):
                yield sout[:j] + legs + sout[j + 1:], coeff

        return identity_pre(self.field.one), post

    def _b_first(self, bd: Bidegree) -> tuple[Pre, Post]:
        # Σ (a¹)₁·f(a²⊗…)⁰ ⊗ (a¹)₂f(…)¹ ⊗ … ⊗ (a¹)_{p+1}f(…)ᵖ
        b, p = self.bialgebra, bd.p
        act = self.target.action.act

        def pre(tin):
            for legs, coeff in b.coproduct_terms(tin[0], p):
                yield tin[1:], legs, coeff

        def post(sout, legs):
            factors = [act(legs[0], sout[0])] + [b.product(legs[k + 1], sout[k + 1]) for k in range(p)]
            return tensor_terms(factors)

        return pre, post

    def _b_last(self, bd: Bidegree) -> tuple[Pre, Post]:
        # f(a¹…aⁿ⊗(a^{n+1})_{p+1}·m)⁰ ⊗ f¹(a^{n+1})₁ ⊗ … ⊗ fᵖ(a^{n+1})_p
        b, n, p = self.bialgebra, bd.n, bd.p
        act = self.source.action.act

        def pre(tin):
            for legs, coeff in b.coproduct_terms(tin[n], p):
                for u, c in act(legs[p], tin[n + 1]).items():
                    yield tin[:n] + (u,), legs[:p], coeff * c

        def post(sout, legs):
            one = self.field.one
            factors = [{sout[0]: one}] + [b.product(sout[k + 1], legs[k]) for k in range(p)]
            return tensor_terms(factors)

        return pre, post

    def _c_first(self, bd: Bidegree) -> tuple[Pre, Post]:
        # (f((a¹)₂…(aⁿ)₂⊗m)⁰)₀ ⊗ (f⁰)₁(a¹)₁…(aⁿ)₁ ⊗ f¹ ⊗ … ⊗ fᵖ
        b, n = self.bialgebra, bd.n
        coact = self.target.coaction.coact

        def pre(tin):
            for firsts, seconds, coeff in coproduct_combinations(b, tin[:n]):
                yield seconds + (tin[n],), firsts, coeff

        def post(sout, firsts):
            for v0, h, c in coact(sout[0]):
                for z, c2 in b.product_word((h,) + firsts).items():
                    yield (v0, z) + sout[1:], c * c2

        return pre, post

    def _c_last(self, bd: Bidegree) -> tuple[Pre, Post]:
        # f((a¹)₁…(aⁿ)₁⊗m₀) ⊗ (a¹)₂…(aⁿ)₂m₁
        b, n = self.bialgebra, bd.n
        coact = self.source.coaction.coact

        def pre(tin):
            for firsts, seconds, coeff in coproduct_combinations(b, tin[:n]):
                for u0, h, c in coact(tin[n]):
                    yield firsts + (u0,), seconds + (h,), coeff * c

        def post(sout, word):
            for z, c in b.product_word(word).items():
                yield sout + (z,), c

        return pre, post


def yd_bicomplex(b: Bialgebra, m: StructuredModule, n: StructuredModule, qmax: int):
    return YDBicomplexBuilder(b, m, n).build(qmax)


# Degree one, written out explicitly

@dataclass(frozen=True, eq=False)
class CocyclePair:
    """(ω′, ρ′) in Hom(A⊗M, N) ⊕ Hom(M, N⊗A), i.e. functionals of bidegrees (1,0) and (0,1)."""

    omega: HomElement
    rho: HomElement

    def vector(self) -> Row:
        """Coordinates in the [ω′ | ρ′] ordering used by Z¹ and B¹."""
        offset = self.omega.space.size
        out = dict(self.omega.coords)
        out.update({offset + k: v for k, v in self.rho.coords.items()})
        return out

    @classmethod
    def from_vector(cls, b: Bialgebra, dim_m: int, dim_n: int, vector: Row) -> "CocyclePair":
        omega_space, rho_space = pair_spaces(b, dim_m, dim_n)
        offset = omega_space.size
        omega = {k: v for k, v in vector.items() if k < offset}
        rho = {k - offset: v for k, v in vector.items() if k >= offset}
        return cls(HomElement(Bidegree(1, 0), omega_space, omega), HomElement(Bidegree(0, 1), rho_space, rho))

    def omega_matrix(self, field, d: int, dim_m: int, dim_n: int) -> SparseMatrix:
        # vec position in*dimN + v, in = a*dimM + u
        entries = [(k % dim_n, k // dim_n, v) for k, v in self.omega.coords.items()]
        return SparseMatrix.from_entries(field, dim_n, d * dim_m, entries)

    def rho_matrix(self, field, d: int, dim_m: int, dim_n: int) -> SparseMatrix:
        rows = dim_n * d
        entries = [(k % rows, k // rows, v) for k, v in self.rho.coords.items()]
        return SparseMatrix.from_entries(field, rows, dim_m, entries)


def pair_spaces(b: Bialgebra, dim_m: int, dim_n: int) -> tuple[HomSpace, HomSpace]:
    return (HomSpace((b.dim, dim_m), (dim_n,)), HomSpace((dim_m,), (dim_n, b.dim)))


def pair_to_total(b: Bialgebra, dim_m: int, dim_n: int) -> SparseMatrix:
    """
    The bijection from [ω′ | ρ′] coordinates to Tot¹ = Y^{0,1} ⊕ Y^{1,0}.

    Under D = d_m + (-1)ⁿ d_c no block needs a sign; only the blocks swap.
    """
    omega_space, rho_space = pair_spaces(b, dim_m, dim_n)
    w, r = omega_space.size, rho_space.size
    entries = [(r + k, k, 1) for k in range(w)] + [(k, w + k, 1) for k in range(r)]
    return SparseMatrix.from_entries(b.field, r + w, w + r, entries)


@dataclass(frozen=True, eq=False)
class DegreeOne:
    z1: Subspace
    b1: Subspace
    h1: int
    equations: SparseMatrix


def _pair_equations(b: Bialgebra, m: StructuredModule, n: StructuredModule, theory: Theory):
    d, F = b.dim, b.field
    km, kn = m.dim, n.dim
    Id = b.identity()
    Im, In = SparseMatrix.identity(F, km), SparseMatrix.identity(F, kn)
    omega_m, omega_n = m.action.matrix, n.action.matrix
    rho_m, rho_n = m.coaction.matrix, n.coaction.matrix
    split_m = tensor_permutation(F, (d, d, km, d), (0, 2, 1, 3))
    split_n = tensor_permutation(F, (d, d, kn, d), (0, 2, 1, 3))
    tau_m = tensor_permutation(F, (d, km), (1, 0))
    tau_n = tensor_permutation(F, (d, kn), (1, 0))

    def module_eq(W):
        # ω′∘(id⊗ω_M) + ω_N∘(id⊗ω′) - ω′∘(μ⊗id)
        return W @ Id.kron(omega_m) + omega_n @ Id.kron(W) - W @ b.mult.kron(Im)

    def comodule_eq(R):
        # (ρ′⊗id)∘ρ_M + (ρ_N⊗id)∘ρ′ - (id⊗Δ)∘ρ′
        return R.kron(Id) @ rho_m + rho_n.kron(Id) @ R - In.kron(b.comult) @ R

    def mixed_eq(W, R):
        lhs = W.kron(b.mult) @ split_m @ b.comult.kron(rho_m) + omega_n.kron(b.mult) @ split_n @ b.comult.kron(R)
        if theory == "yd":
            rhs = (In.kron(b.mult) @ R.kron(Id) @ tau_m @ Id.kron(omega_m) @ b.comult.kron(Im)
                   + In.kron(b.mult) @ rho_n.kron(Id) @ tau_n @ Id.kron(W) @ b.comult.kron(Im))
        else:
            rhs = R @ omega_m + rho_n @ W
        return lhs - rhs

    return module_eq, comodule_eq, mixed_eq


def _coboundary(b: Bialgebra, m: StructuredModule, n: StructuredModule, f: SparseMatrix):
    Id = b.identity()
    dm = n.action.matrix @ Id.kron(f) - f @ m.action.matrix
    dc = n.coaction.matrix @ f - f.kron(Id) @ m.coaction.matrix
    return dm, dc


def z1_b1_explicit(b: Bialgebra, m: StructuredModule, n: StructuredModule, theory: Theory = "yd") -> DegreeOne:
    """
    Z¹ as the solutions of the three degree-one equations on pairs (ω′, ρ′) and
    B¹ as the pairs (d_m f, d_c f); coordinates follow the [ω′ | ρ′] ordering.
    """
    for module in (m, n):
        module.require("action", "coaction")
    d, F = b.dim, b.field
    km, kn = m.dim, n.dim
    omega_size, rho_size = d * km * kn, km * kn * d
    module_eq, comodule_eq, mixed_eq = _pair_equations(b, m, n, theory)
    zero_w = SparseMatrix.zeros(F, kn, d * km)
    zero_r = SparseMatrix.zeros(F, kn * d, km)

    columns: list[Row] = []
    total_rows = 0
    for index in range(omega_size + rho_size):
        if index < omega_size:
            W = SparseMatrix.from_entries(F, kn, d * km, [(index % kn, index // kn, 1)])
            R = zero_r
        else:
            k = index - omega_size
            W = zero_w
            R = SparseMatrix.from_entries(F, kn * d, km, [(k % (kn * d), k // (kn * d), 1)])
        column: Row = {}
        offset = 0
        for image in (module_eq(W), comodule_eq(R), mixed_eq(W, R)):
            column.update({offset + j: v for j, v in vec(image).items()})
            offset += image.rows * image.cols
        total_rows = offset
        columns.append(column)
    equations = SparseMatrix.from_columns(F, total_rows, columns)
    z1 = kernel_basis(equations)

    boundaries: list[Row] = []
    for index in range(km * kn):
        u, v = divmod(index, kn)
        f = SparseMatrix.from_entries(F, kn, km, [(v, u, 1)])
        dm, dc = _coboundary(b, m, n, f)
        column = vec(dm)
        column.update({omega_size + j: value for j, value in vec(dc).items()})
        boundaries.append(column)
    b1 = image_basis(SparseMatrix.from_columns(F, omega_size + rho_size, boundaries))
    h1 = quotient_dim(z1, b1)
    logger.info("{} degree one for ({}, {}): dim Z¹ = {}, dim B¹ = {}", theory, m.name, n.name, z1.dim, b1.dim)
    return DegreeOne(z1, b1, h1, equations)


def pair_residual(degree_one: DegreeOne, pair: CocyclePair) -> Row:
    """The equations' values on ``pair``; zero iff the pair is a cocycle."""
    return degree_one.equations.apply(pair.vector())


@dataclass(frozen=True, eq=False)
class Extension:
    module: StructuredModule
    defects: list[DefectEntry]

    @property
    def is_valid(self) -> bool:
        return not self.defects


def build_extension(b: Bialgebra, m: StructuredModule, n: StructuredModule, pair: CocyclePair,
                    theory: Theory = "yd") -> Extension:
    """
    N ⊕ M (N first) with a·(x, y) = (a·x + ω′(a⊗y), a·y) and
    λ(x, y) = ρ_N(x) + ρ′(y) + ρ_M(y).
    """
    d, F = b.dim, b.field
    km, kn = m.dim, n.dim
    total = kn + km
    W = pair.omega_matrix(F, d, km, kn)
    R = pair.rho_matrix(F, d, km, kn)

    action: dict[int, Row] = {}
    for a in range(d):
        for x in range(kn):
            action[a * total + x] = dict(n.action.act(a, x))
        for y in range(km):
            column = {kn + u: v for u, v in m.action.act(a, y).items()}
            for v_index, value in W.column(a * km + y).items():
                column[v_index] = column.get(v_index, F.zero) + value
            action[a * total + kn + y] = column
    coaction: dict[int, Row] = {}
    for x in range(kn):
        coaction[x] = {x0 * d + h: c for x0, h, c in n.coaction.coact(x)}
    for y in range(km):
        column = {(kn + u0) * d + h: c for u0, h, c in m.coaction.coact(y)}
        for row, value in R.column(y).items():
            column[row] = column.get(row, F.zero) + value
        coaction[kn + y] = column

    action_matrix = SparseMatrix.from_columns(F, total, [action[k] for k in range(d * total)])
    coaction_matrix = SparseMatrix.from_columns(F, total * d, [coaction[k] for k in range(total)])
    module = StructuredModule(
        F,
        total,
        action=ActionTensor(Side.LEFT, action_matrix, d, total),
        coaction=CoactionTensor(Side.RIGHT, coaction_matrix, d, total),
        module_class=ModuleClass.YD if theory == "yd" else ModuleClass.HOPF,
        name=f"{n.name}⊕{m.name}",
    )
    condition = "yetter-drinfeld" if theory == "yd" else "hopf left-right"
    defects = structure_defects(b, module) + check_conditions(b, module, (condition,))
    return Extension(module, defects)


def extensions_equivalent(b: Bialgebra, m: StructuredModule, n: StructuredModule,
                          first: CocyclePair, second: CocyclePair, theory: Theory = "yd",
                          degree_one: Optional[DegreeOne] = None) -> bool:
    """True iff the two cocycles differ by an element of B¹."""
    degree_one = degree_one or z1_b1_explicit(b, m, n, theory)
    F = b.field
    size = degree_one.z1.ambient
    for pair in (first, second):
        vector = SparseMatrix.from_columns(F, size, [pair.vector()])
        if not degree_one.z1.contains(vector):
            raise PreconditionError("extension pair is not a cocycle")
    difference = dict(first.vector())
    for k, v in second.vector().items():
        difference[k] = difference.get(k, F.zero) - v
    difference = {k: v for k, v in difference.items() if v}
    if not difference:
        return True
    return degree_one.b1.contains(SparseMatrix.from_columns(F, size, [difference]))
