from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dataclass_field
from itertools import product
from typing import Any, Callable, Iterable, Iterator, Optional

from loguru import logger

from app.config import get_settings
from app.core.exceptions import DimensionMismatchError, PreconditionError
from app.core.field import FieldSpec
from app.core.linalg import (
    Row,
    SparseMatrix,
    Subspace,
    check_budget,
    flatten,
    image_basis,
    kernel_basis,
    quotient_dim,
)
from app.models.v1 import CohomologyReport, DegreeRow, IdentityCheck, IdentityReport
from app.services.bialgebra import Bialgebra

Indices = tuple[int, ...]
# A face is assembled from a pre-step (target input -> source inputs, an extra
# payload handed to the post-step, a coefficient) and a post-step (source
# output, payload -> target outputs with coefficients).
PreTerm = tuple[Indices, Any, Any]
Pre = Callable[[Indices], Iterable[PreTerm]]
Post = Callable[[Indices, Any], Iterable[tuple[Indices, Any]]]


@dataclass(frozen=True, order=True)
class Bidegree:
    n: int
    p: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.p < 0:
            raise PreconditionError(f"bidegree ({self.n}, {self.p}) has a negative entry")

    @property
    def total(self) -> int:
        return self.n + self.p

    def __str__(self) -> str:
        return f"({self.n},{self.p})"


@dataclass(frozen=True)
class HomSpace:
    """Hom(X_1⊗...⊗X_r, Y_1⊗...⊗Y_s); coordinate of (in, out) is flat(in)*size(out) + flat(out)."""

    in_dims: Indices
    out_dims: Indices

    @property
    def in_size(self) -> int:
        return math.prod(self.in_dims)

    @property
    def out_size(self) -> int:
        return math.prod(self.out_dims)

    @property
    def size(self) -> int:
        return self.in_size * self.out_size

    def position(self, tin: Indices, tout: Indices) -> int:
        return flatten(tin, self.in_dims) * self.out_size + flatten(tout, self.out_dims)

    def inputs(self) -> Iterator[Indices]:
        return product(*(range(k) for k in self.in_dims))

    def outputs(self) -> Iterator[Indices]:
        return product(*(range(k) for k in self.out_dims))


@dataclass(frozen=True, eq=False)
class HomElement:
    """A functional of a bidegree, stored sparsely by canonical coordinate."""

    bidegree: Bidegree
    space: HomSpace
    coords: Row

    def __post_init__(self) -> None:
        if any(not 0 <= k < self.space.size for k in self.coords):
            raise DimensionMismatchError(f"coordinate outside Y{self.bidegree} of dimension {self.space.size}")

    @classmethod
    def from_column(cls, bidegree: Bidegree, space: HomSpace, column: Row) -> "HomElement":
        return cls(bidegree, space, {k: v for k, v in column.items() if v})

    def vector(self, field: FieldSpec) -> SparseMatrix:
        return SparseMatrix.from_columns(field, self.space.size, [self.coords])


def tensor_terms(factors: list[Row]) -> list[tuple[Indices, Any]]:
    """Expand a pure tensor of vectors into (indices, coefficient) terms."""
    terms: list[tuple[Indices, Any]] = [((), None)]
    for factor in factors:
        terms = [(idx + (k,), v if c is None else c * v) for idx, c in terms for k, v in factor.items()]
        if not terms:
            return []
    return terms


def coproduct_combinations(b: Bialgebra, word: Indices) -> Iterator[tuple[Indices, Indices, Any]]:
    """Σ over Δ(a¹)…Δ(aⁿ): yields ((a¹)₁…(aⁿ)₁, (a¹)₂…(aⁿ)₂, coefficient)."""
    one = b.field.one
    for combo in product(*(b.coproduct_terms(a, 1) for a in word)):
        coeff = one
        for _, c in combo:
            coeff = coeff * c
        yield tuple(legs[0] for legs, _ in combo), tuple(legs[1] for legs, _ in combo), coeff


def assemble(field: FieldSpec, source: HomSpace, target: HomSpace, pre: Pre,
             post: Optional[Post] = None, label: str = "face") -> SparseMatrix:
    """Matrix of g = face(f) where g(tin) = Σ coeff · post(f(sin), extra) over pre(tin)."""
    check_budget(target.size, source.size, label)
    one = field.one
    outputs = [(k, tout) for k, tout in enumerate(source.outputs())]
    cache: dict[tuple[Indices, Any], list[tuple[int, Any]]] = {}
    out_dims = target.out_dims

    def images(sout: Indices, extra: Any) -> list[tuple[int, Any]]:
        key = (sout, extra)
        found = cache.get(key)
        if found is None:
            raw = [(sout, one)] if post is None else post(sout, extra)
            found = [(flatten(tout, out_dims), c) for tout, c in raw if c]
            cache[key] = found
        return found

    data: dict[int, Row] = {}
    for tin_flat, tin in enumerate(target.inputs()):
        row_base = tin_flat * target.out_size
        for sin, extra, coeff in pre(tin):
            if not coeff:
                continue
            col_base = flatten(sin, source.in_dims) * source.out_size
            for sout_flat, sout in outputs:
                for tout_flat, c in images(sout, extra):
                    row = data.setdefault(row_base + tout_flat, {})
                    col = col_base + sout_flat
                    value = coeff * c
                    current = row.get(col)
                    row[col] = value if current is None else current + value
    pruned = {}
    for i, row in data.items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            pruned[i] = kept
    return SparseMatrix(field, target.size, source.size, pruned, label=label)


def identity_pre(one: Any) -> Pre:
    return lambda tin: ((tin, None, one),)


@dataclass
class Bicomplex:
    """Differentials d_m^{n,p}, d_c^{n,p} for n+p < qmax and dimensions for n+p <= qmax."""

    kind: str
    qmax: int
    field: FieldSpec
    dims: dict[Bidegree, int]
    dm: dict[Bidegree, SparseMatrix]
    dc: dict[Bidegree, SparseMatrix]
    builder: Optional["BicomplexBuilder"] = dataclass_field(default=None, repr=False)

    def tot_blocks(self, q: int) -> list[Bidegree]:
        return [Bidegree(n, q - n) for n in range(q + 1)]

    def tot_dim(self, q: int) -> int:
        return sum(self.dims[bd] for bd in self.tot_blocks(q))


class BicomplexBuilder(ABC):
    """
    Base class for the double complexes Hom(Aⁿ⊗M, N⊗Aᵖ).

    Subclasses provide the pre/post steps of every face; differentials, the
    bicomplex itself and the identity battery are derived here.
    """

    kind: str = "abstract"

    def __init__(self, bialgebra: Bialgebra, dim_m: int, dim_n: int):
        self.bialgebra = bialgebra
        self.field = bialgebra.field
        self.d = bialgebra.dim
        self.dim_m = dim_m
        self.dim_n = dim_n
        self._faces: dict[tuple[str, Bidegree, int], SparseMatrix] = {}
        self._differentials: dict[tuple[str, Bidegree], SparseMatrix] = {}

    def space(self, bd: Bidegree) -> HomSpace:
        return HomSpace((self.d,) * bd.n + (self.dim_m,), (self.dim_n,) + (self.d,) * bd.p)

    def dimension(self, bd: Bidegree) -> int:
        return self.space(bd).size

    @abstractmethod
    def b_terms(self, bd: Bidegree, i: int) -> tuple[Pre, Optional[Post]]:
        """Pre/post steps of b_i^{n,p}: Y^{n,p} -> Y^{n+1,p}."""

    @abstractmethod
    def c_terms(self, bd: Bidegree, j: int) -> tuple[Pre, Optional[Post]]:
        """Pre/post steps of c_j^{n,p}: Y^{n,p} -> Y^{n,p+1}."""

    def face_b(self, bd: Bidegree, i: int) -> SparseMatrix:
        if not 0 <= i <= bd.n + 1:
            raise PreconditionError(f"face b_{i} does not exist in bidegree {bd}")
        key = ("b", bd, i)
        if key not in self._faces:
            pre, post = self.b_terms(bd, i)
            self._faces[key] = assemble(self.field, self.space(bd), self.space(Bidegree(bd.n + 1, bd.p)),
                                        pre, post, label=f"{self.kind} b_{i} at {bd}")
        return self._faces[key]

    def face_c(self, bd: Bidegree, j: int) -> SparseMatrix:
        if not 0 <= j <= bd.p + 1:
            raise PreconditionError(f"face c_{j} does not exist in bidegree {bd}")
        key = ("c", bd, j)
        if key not in self._faces:
            pre, post = self.c_terms(bd, j)
            self._faces[key] = assemble(self.field, self.space(bd), self.space(Bidegree(bd.n, bd.p + 1)),
                                        pre, post, label=f"{self.kind} c_{j} at {bd}")
        return self._faces[key]

    def _alternating(self, faces: list[SparseMatrix]) -> SparseMatrix:
        total = faces[0]
        for i, face in enumerate(faces[1:], start=1):
            total = total - face if i % 2 else total + face
        return total

    def differential_dm(self, bd: Bidegree) -> SparseMatrix:
        """d_m^{n,p} = Σ_{i=0}^{n+1} (-1)^i b_i."""
        key = ("m", bd)
        if key not in self._differentials:
            self._differentials[key] = self._alternating([self.face_b(bd, i) for i in range(bd.n + 2)])
        return self._differentials[key]

    def differential_dc(self, bd: Bidegree) -> SparseMatrix:
        """d_c^{n,p} = Σ_{j=0}^{p+1} (-1)^j c_j."""
        key = ("c", bd)
        if key not in self._differentials:
            self._differentials[key] = self._alternating([self.face_c(bd, j) for j in range(bd.p + 2)])
        return self._differentials[key]

    def build(self, qmax: int) -> Bicomplex:
        if qmax < 1:
            raise PreconditionError("qmax must be at least 1")
        dims = {Bidegree(n, q - n): self.dimension(Bidegree(n, q - n)) for q in range(qmax + 1) for n in range(q + 1)}
        dm: dict[Bidegree, SparseMatrix] = {}
        dc: dict[Bidegree, SparseMatrix] = {}
        for q in range(qmax):
            for n in range(q + 1):
                bd = Bidegree(n, q - n)
                dm[bd] = self.differential_dm(bd)
                dc[bd] = self.differential_dc(bd)
                logger.debug("{} {}: dim {}, d_m nnz {}, d_c nnz {}", self.kind, bd, dims[bd], dm[bd].nnz, dc[bd].nnz)
        logger.info("built {} bicomplex up to total degree {}", self.kind, qmax)
        return Bicomplex(self.kind, qmax, self.field, dims, dm, dc, builder=self)


def _face_identities(builder: BicomplexBuilder, bd: Bidegree) -> list[IdentityCheck]:
    n, p = bd.n, bd.p
    up, right = Bidegree(n + 1, p), Bidegree(n, p + 1)
    checks = []
    # b_j b_i = b_i b_{j-1} for i < j
    for j in range(n + 3):
        for i in range(j):
            ok = builder.face_b(up, j) @ builder.face_b(bd, i) == builder.face_b(up, i) @ builder.face_b(bd, j - 1)
            checks.append(IdentityCheck(family="b", n=n, p=p, i=i, j=j, passed=ok))
    for j in range(p + 3):
        for i in range(j):
            ok = builder.face_c(right, j) @ builder.face_c(bd, i) == builder.face_c(right, i) @ builder.face_c(bd, j - 1)
            checks.append(IdentityCheck(family="c", n=n, p=p, i=i, j=j, passed=ok))
    for i in range(n + 2):
        for j in range(p + 2):
            ok = builder.face_c(up, j) @ builder.face_b(bd, i) == builder.face_b(right, i) @ builder.face_c(bd, j)
            checks.append(IdentityCheck(family="mixed", n=n, p=p, i=i, j=j, passed=ok))
    return checks


def verify_bicomplex_identities(bicomplex: Bicomplex, faces: bool = True) -> IdentityReport:
    """
    Per-face simplicial identities (when the bicomplex knows its faces) and
    d_m² = 0, d_c² = 0, d_m d_c = d_c d_m for every bidegree with n+p+2 <= qmax.
    """
    checks: list[IdentityCheck] = []
    for q in range(bicomplex.qmax - 1):
        for bd in bicomplex.tot_blocks(q):
            n, p = bd.n, bd.p
            up, right = Bidegree(n + 1, p), Bidegree(n, p + 1)
            if faces and bicomplex.builder is not None:
                checks += _face_identities(bicomplex.builder, bd)
            dm, dc = bicomplex.dm, bicomplex.dc
            checks.append(IdentityCheck(family="dm2", n=n, p=p, passed=(dm[up] @ dm[bd]).is_zero()))
            checks.append(IdentityCheck(family="dc2", n=n, p=p, passed=(dc[right] @ dc[bd]).is_zero()))
            checks.append(IdentityCheck(family="commute", n=n, p=p, passed=dm[right] @ dc[bd] == dc[up] @ dm[bd]))
    report = IdentityReport(checks=checks)
    if report.all_passed:
        logger.info("{} bicomplex: all {} identities hold", bicomplex.kind, len(checks))
    else:
        logger.warning("{} bicomplex: {} of {} identities fail", bicomplex.kind, len(report.failures), len(checks))
    return report


def total_differential(bicomplex: Bicomplex, q: int) -> SparseMatrix:
    """D^q: Tot^q -> Tot^{q+1}; on the (n, p) block D = d_m + (-1)^n d_c, blocks ordered by n."""
    sources = bicomplex.tot_blocks(q)
    targets = bicomplex.tot_blocks(q + 1)
    col_offset, offset = {}, 0
    for bd in sources:
        col_offset[bd] = offset
        offset += bicomplex.dims[bd]
    cols = offset
    row_offset, offset = {}, 0
    for bd in targets:
        row_offset[bd] = offset
        offset += bicomplex.dims[bd]
    rows = offset
    check_budget(rows, cols, f"total differential D^{q}")
    data: dict[int, Row] = {}

    def place(block: SparseMatrix, r0: int, c0: int, negate: bool) -> None:
        for i, row in block.row_items():
            target = data.setdefault(r0 + i, {})
            for j, value in row.items():
                target[c0 + j] = -value if negate else value

    for bd in sources:
        place(bicomplex.dm[bd], row_offset[Bidegree(bd.n + 1, bd.p)], col_offset[bd], False)
        place(bicomplex.dc[bd], row_offset[Bidegree(bd.n, bd.p + 1)], col_offset[bd], bd.n % 2 == 1)
    return SparseMatrix(bicomplex.field, rows, cols, data, label=f"D^{q}")


def total_cohomology(bicomplex: Bicomplex, identities: Optional[IdentityReport] = None) -> CohomologyReport:
    """dim H^q = dim ker D^q - rank D^{q-1} for q < qmax."""
    verify = get_settings().verify_containment
    rows: list[DegreeRow] = []
    previous_image: Optional[Subspace] = None
    previous_rank = 0
    for q in range(bicomplex.qmax):
        D = total_differential(bicomplex, q)
        kernel = kernel_basis(D)
        if verify:
            image = previous_image or Subspace(D.cols, SparseMatrix.zeros(bicomplex.field, D.cols, 0))
            h = quotient_dim(kernel, image)
        else:
            h = kernel.dim - previous_rank
        rank_out = D.cols - kernel.dim
        rows.append(DegreeRow(degree=q, dimension=D.cols, kernel=kernel.dim, rank_in=previous_rank,
                              rank_out=rank_out, cohomology=h))
        logger.debug("{} H^{} = {} (ker {}, im {})", bicomplex.kind, q, h, kernel.dim, previous_rank)
        previous_rank = rank_out
        if verify and q + 1 < bicomplex.qmax:
            previous_image = image_basis(D)
    logger.info("{} cohomology: {}", bicomplex.kind, [r.cohomology for r in rows])
    return CohomologyReport(
        theory=bicomplex.kind,
        qmax=bicomplex.qmax,
        bidegree_dims={f"{bd.n},{bd.p}": dim for bd, dim in sorted(bicomplex.dims.items())},
        rows=rows,
        identities=identities,
    )
