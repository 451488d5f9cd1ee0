"""Bialgebra deformation complex Hom(Aⁿ, Aᵖ), coded directly on tensor powers of A."""

from __future__ import annotations

from typing import Optional

from loguru import logger

from app.models.v1 import Verdict
from app.services.base import (
    Bicomplex,
    BicomplexBuilder,
    Bidegree,
    HomSpace,
    Post,
    Pre,
    coproduct_combinations,
    identity_pre,
    tensor_terms,
)
from app.services.bialgebra import Bialgebra
from app.services.structures import trivial_yd
from app.services.yetter_drinfeld import YDBicomplexBuilder


class GSBicomplexBuilder(BicomplexBuilder):
    """
    Faces on Hom(Aⁿ, Aᵖ) with the diagonal left and right A-module
    structures on Aᵖ and the diagonal comodule structures on Aⁿ.

    The coordinates agree with Y^{n,p}(k, k) since the trivial factors have dimension one.
    """

    kind = "gs"

    def __init__(self, bialgebra: Bialgebra):
        super().__init__(bialgebra, 1, 1)

    def space(self, bd: Bidegree) -> HomSpace:
        return HomSpace((self.d,) * bd.n, (self.d,) * bd.p)

    def b_terms(self, bd: Bidegree, i: int) -> tuple[Pre, Optional[Post]]:
        b, n, p = self.bialgebra, bd.n, bd.p
        if 0 < i <= n:
            def pre(tin):
                for c, coeff in b.product(tin[i - 1], tin[i]).items():
                    yield tin[:i - 1] + (c,) + tin[i + 1:], None, coeff

            return pre, None

        # the outer input acts diagonally on Aᵖ, through ε when p = 0
        first = i == 0
        counit = b.counit_values

        def outer_pre(tin):
            letter, rest = (tin[0], tin[1:]) if first else (tin[n], tin[:n])
            if p == 0:
                if counit[letter]:
                    yield rest, (), counit[letter]
                return
            for legs, coeff in b.coproduct_terms(letter, p - 1):
                yield rest, legs, coeff

        if p == 0:
            return outer_pre, None

        def outer_post(sout, legs):
            if first:
                return tensor_terms([b.product(legs[k], sout[k]) for k in range(p)])
            return tensor_terms([b.product(sout[k], legs[k]) for k in range(p)])

        return outer_pre, outer_post

    def c_terms(self, bd: Bidegree, j: int) -> tuple[Pre, Optional[Post]]:
        b, p = self.bialgebra, bd.p
        if 0 < j <= p:
            def post(sout, _):
                for legs, coeff in b.coproduct_terms(sout[j - 1], 1):
                    yield sout[:j - 1] + legs + sout[j:], coeff

            return identity_pre(self.field.one), post

        first = j == 0

        def pre(tin):
            for firsts, seconds, coeff in coproduct_combinations(b, tin):
                # f sees one half of the split inputs, the other half is multiplied out
                yield (seconds, firsts, coeff) if first else (firsts, seconds, coeff)

        def outer_post(sout, word):
            for z, c in b.product_word(word).items():
                yield ((z,) + sout if first else sout + (z,)), c

        return pre, outer_post


def gs_bicomplex(b: Bialgebra, qmax: int) -> Bicomplex:
    return GSBicomplexBuilder(b).build(qmax)


def gs_agreement(b: Bialgebra, qmax: int, gs: Optional[Bicomplex] = None) -> list[Verdict]:
    """Compare the direct faces with the YD engine at trivial coefficients, bidegree by bidegree."""
    gs = gs or gs_bicomplex(b, qmax)
    k = trivial_yd(b)
    general = YDBicomplexBuilder(b, k, k)
    mismatches = []
    for bd in sorted(gs.dm):
        if gs.dm[bd] != general.differential_dm(bd):
            mismatches.append(f"d_m at {bd}")
        if gs.dc[bd] != general.differential_dc(bd):
            mismatches.append(f"d_c at {bd}")
    if mismatches:
        logger.warning("GS faces disagree with the trivial-coefficient engine: {}", mismatches)
    return [Verdict(name="gs faces equal the YD engine at trivial coefficients", passed=not mismatches,
                    detail=", ".join(mismatches))]
