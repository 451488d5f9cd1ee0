import pytest

from app.core.exceptions import PreconditionError
from app.core.linalg import SparseMatrix, Subspace, kernel_basis
from app.services.base import Bidegree, total_cohomology, total_differential, verify_bicomplex_identities
from app.services.hopf import HopfBicomplexBuilder
from app.services.structures import character_module, free_hopf_module, morphism_space, regular_module, trivial_yd
from app.services.yetter_drinfeld import (
    CocyclePair,
    YDBicomplexBuilder,
    build_extension,
    extensions_equivalent,
    pair_residual,
    pair_to_total,
    yd_bicomplex,
    z1_b1_explicit,
)
from tests.conftest import sweedler_sign_module, yd_modules
from tests.face_oracle import b_face, c_face

BIALGEBRAS = ["sweedler_q", "c2_q", "c2_f2", "c3_q"]


def module_pairs(b):
    modules = yd_modules(b)
    return [(m, n) for m in modules for n in modules]


@pytest.mark.parametrize("fixture", [pytest.param("sweedler_q", marks=pytest.mark.slow), "c2_q", "c2_f2", "c3_q"])
def test_simplicial_identities_hold(request, fixture):
    # identities are checked on every bidegree with n+p <= 3
    b = request.getfixturevalue(fixture)
    for m, n in module_pairs(b):
        report = verify_bicomplex_identities(yd_bicomplex(b, m, n, 5))
        assert report.checks
        assert max(c.n + c.p for c in report.checks) == 3
        assert report.all_passed, (m.name, n.name, report.failures[:3])


def test_non_yd_module_breaks_only_the_mixed_identities(c2_q, swap):
    report = verify_bicomplex_identities(yd_bicomplex(c2_q, swap, swap, 3))
    failures = report.failures
    assert failures
    assert {c.family for c in failures} <= {"mixed", "commute"}
    for check in failures:
        if check.family == "mixed":
            assert (check.i, check.j) in {(0, 0), (check.n + 1, check.p + 1)}


def face_cases(b):
    k, sign, regular = trivial_yd(b), sweedler_sign_module(b), regular_module(b)
    free = free_hopf_module(1, b)
    return {
        "k to k_sign": (k, sign, False),
        "k_sign to k_sign": (sign, sign, False),
        "k_sign to A": (sign, regular, False),
        "A to k_sign": (regular, sign, False),
        "hopf V⊗A": (free, free, True),
    }


@pytest.mark.parametrize("case", ["k to k_sign", "k_sign to k_sign", "k_sign to A",
                                  "A to k_sign", "hopf V⊗A"])
def test_faces_match_the_defining_formulas(sweedler_q, case):
    b = sweedler_q
    m, n, hopf = face_cases(b)[case]
    builder = (HopfBicomplexBuilder if hopf else YDBicomplexBuilder)(b, m, n)
    for total in range(3):
        for nn in range(total + 1):
            bd = Bidegree(nn, total - nn)
            for i in range(bd.n + 2):
                assert builder.face_b(bd, i) == b_face(b, m, n, bd, i, hopf=hopf), ("b", bd, i)
            for j in range(bd.p + 2):
                assert builder.face_c(bd, j) == c_face(b, m, n, bd, j, hopf=hopf), ("c", bd, j)


def test_faces_outside_the_range_are_rejected(sweedler_q):
    k = trivial_yd(sweedler_q)
    builder = YDBicomplexBuilder(sweedler_q, k, k)
    with pytest.raises(PreconditionError):
        builder.face_b(Bidegree(1, 0), 3)
    with pytest.raises(PreconditionError):
        Bidegree(-1, 0)


@pytest.mark.parametrize("fixture", BIALGEBRAS)
def test_degree_zero_is_the_morphism_space(request, fixture):
    b = request.getfixturevalue(fixture)
    for m, n in module_pairs(b):
        report = total_cohomology(yd_bicomplex(b, m, n, 2))
        assert report.dim(0) == morphism_space(b, m, n, ("action", "coaction")).dim, (m.name, n.name)


@pytest.mark.parametrize("fixture", BIALGEBRAS)
def test_degree_one_matches_the_explicit_cocycles(request, fixture):
    b = request.getfixturevalue(fixture)
    for m, n in module_pairs(b):
        report = total_cohomology(yd_bicomplex(b, m, n, 2))
        assert z1_b1_explicit(b, m, n).h1 == report.dim(1), (m.name, n.name)


def test_semisimple_double_has_no_degree_one_classes(c2_q):
    for m, n in module_pairs(c2_q):
        assert z1_b1_explicit(c2_q, m, n).h1 == 0


def assert_cocycles_match(b, m, n, theory, bicomplex):
    z1 = z1_b1_explicit(b, m, n, theory).z1
    moved = pair_to_total(b, m.dim, n.dim) @ z1.basis
    differential = total_differential(bicomplex, 1)
    assert (differential @ moved).is_zero(), (m.name, n.name)
    cocycles = kernel_basis(differential)
    assert cocycles.dim == z1.dim
    assert cocycles.contains(moved)
    assert Subspace(moved.rows, moved).contains(cocycles.basis)


@pytest.mark.parametrize("fixture", BIALGEBRAS)
def test_explicit_cocycles_are_the_total_cocycles(request, fixture):
    b = request.getfixturevalue(fixture)
    for m, n in module_pairs(b):
        assert_cocycles_match(b, m, n, "yd", yd_bicomplex(b, m, n, 2))


def test_explicit_hopf_cocycles_are_the_total_cocycles(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    assert_cocycles_match(sweedler_q, m, m, "hopf", HopfBicomplexBuilder(sweedler_q, m, m).build(2))


def test_grading_separates_yd_modules_in_characteristic_two(c2_f2):
    # over F2 every character of C2 is trivial, so only the grading tells k_g from k
    k = trivial_yd(c2_f2)
    k_g = character_module(c2_f2, [1, 1], 1, name="k_g")
    for m, n, expected in ((k, k_g, 0), (k_g, k, 0), (k_g, k_g, 1), (k, k, 1)):
        report = total_cohomology(yd_bicomplex(c2_f2, m, n, 2))
        assert report.dims() == [expected, expected], (m.name, n.name)
        assert z1_b1_explicit(c2_f2, m, n).h1 == expected


def test_total_degree_dimensions(sweedler_q):
    k = trivial_yd(sweedler_q)
    report = total_cohomology(yd_bicomplex(sweedler_q, k, k, 3))
    assert [row.dimension for row in report.rows] == [1, 8, 48]
    assert report.bidegree_dims["1,1"] == 16


def _pair(b, m, n, vector):
    return CocyclePair.from_vector(b, m.dim, n.dim, vector)


def test_cocycles_give_extensions(sweedler_q, sweedler_sign):
    b, m, n = sweedler_q, trivial_yd(sweedler_q), sweedler_sign
    degree_one = z1_b1_explicit(b, m, n)
    assert degree_one.z1.dim > 0
    for k in range(degree_one.z1.dim):
        pair = _pair(b, m, n, degree_one.z1.vector(k))
        assert pair_residual(degree_one, pair) == {}
        extension = build_extension(b, m, n, pair)
        assert extension.is_valid, extension.defects[:2]
        assert extension.module.dim == 2


def test_non_cocycles_give_broken_extensions(sweedler_q, sweedler_sign):
    b, m, n = sweedler_q, trivial_yd(sweedler_q), sweedler_sign
    degree_one = z1_b1_explicit(b, m, n)
    one = b.field.one
    size = degree_one.z1.ambient
    candidates = [{i: one} for i in range(size)]
    candidates += [{i: one, j: one} for i in range(size) for j in range(i + 1, size)]
    outside = [v for v in candidates
               if not degree_one.z1.contains(SparseMatrix.from_columns(b.field, size, [v]))]
    assert len(outside) >= 10
    for vector in outside:
        pair = _pair(b, m, n, vector)
        assert pair_residual(degree_one, pair)
        assert not build_extension(b, m, n, pair).is_valid


def test_cohomologous_cocycles_give_equivalent_extensions(sweedler_q, sweedler_sign):
    b, m, n = sweedler_q, trivial_yd(sweedler_q), sweedler_sign
    degree_one = z1_b1_explicit(b, m, n)
    assert degree_one.b1.dim == 1
    zero = _pair(b, m, n, {})
    for k in range(degree_one.z1.dim):
        cocycle = degree_one.z1.vector(k)
        shifted = dict(cocycle)
        for i, v in degree_one.b1.vector(0).items():
            shifted[i] = shifted.get(i, b.field.zero) + v
        shifted = {i: v for i, v in shifted.items() if v}
        first, second = _pair(b, m, n, cocycle), _pair(b, m, n, shifted)
        assert extensions_equivalent(b, m, n, first, second, degree_one=degree_one)
        column = SparseMatrix.from_columns(b.field, degree_one.z1.ambient, [cocycle])
        trivial = degree_one.b1.contains(column)
        assert extensions_equivalent(b, m, n, first, zero, degree_one=degree_one) is trivial


def test_equivalence_needs_cocycles(sweedler_q, sweedler_sign):
    b, m, n = sweedler_q, trivial_yd(sweedler_q), sweedler_sign
    degree_one = z1_b1_explicit(b, m, n)
    size = degree_one.z1.ambient
    one = b.field.one
    bad = next(v for v in ({i: one} for i in range(size))
               if not degree_one.z1.contains(SparseMatrix.from_columns(b.field, size, [v])))
    with pytest.raises(PreconditionError):
        extensions_equivalent(b, m, n, _pair(b, m, n, bad), _pair(b, m, n, {}), degree_one=degree_one)
