import pytest

from app.core.exceptions import PreconditionError, SkewAntipodeMissingError, StructureMissingError
from app.core.linalg import kernel_basis
from app.services.base import Bidegree, HomElement, total_cohomology, verify_bicomplex_identities
from app.services.hopf import (
    HopfBicomplexBuilder,
    col_homotopy,
    homotopy_sweep,
    hopf_bicomplex,
    hopf_vanishing_check,
    hopf_vanishing_general,
    restricted_bicomplex,
    row_homotopy,
)
from app.services.structures import free_hopf_module, morphism_space, regular_module, transport_structure
from app.services.yetter_drinfeld import CocyclePair, build_extension, z1_b1_explicit
from tests.conftest import sweedler_basis_change


def test_free_hopf_modules_have_no_higher_cohomology(sweedler_q):
    result = hopf_vanishing_check(sweedler_q, 1, 1, 3)
    assert result.report.dims() == [1, 0, 0]
    assert result.column == [1, 0, 0]
    assert result.passed


def test_degree_zero_counts_hopf_module_maps(sweedler_q):
    result = hopf_vanishing_check(sweedler_q, 2, 1, 2)
    assert result.report.dim(0) == 2
    m, n = free_hopf_module(2, sweedler_q), free_hopf_module(1, sweedler_q)
    assert morphism_space(sweedler_q, m, n, ("action", "coaction")).dim == 2


def test_hopf_bicomplex_identities(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    report = verify_bicomplex_identities(hopf_bicomplex(sweedler_q, m, m, 3))
    assert report.all_passed


def test_homotopies_contract_every_cocycle(sweedler_q):
    verdicts = homotopy_sweep(sweedler_q, 1, 1, 2)
    assert verdicts
    assert all(v.passed for v in verdicts), [v.name for v in verdicts if not v.passed]


def test_homotopies_over_a_group_algebra(c2_q):
    verdicts = homotopy_sweep(c2_q, 2, 1, 2)
    assert all(v.passed for v in verdicts)


def test_homotopy_preconditions(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    builder = HopfBicomplexBuilder(sweedler_q, m, m)
    bd = Bidegree(1, 0)
    space = builder.space(bd)
    g = HomElement.from_column(Bidegree(0, 1), builder.space(Bidegree(0, 1)), {0: sweedler_q.field.one})
    with pytest.raises(PreconditionError):
        row_homotopy(sweedler_q, 1, 1, g, builder=builder)
    # a functional outside ker d_m is not contracted
    kernel = kernel_basis(builder.differential_dm(bd))
    outside = next(k for k in range(space.size) if not kernel.contains(
        HomElement.from_column(bd, space, {k: sweedler_q.field.one}).vector(sweedler_q.field)))
    with pytest.raises(PreconditionError):
        row_homotopy(sweedler_q, 1, 1, HomElement.from_column(bd, space, {outside: sweedler_q.field.one}),
                     builder=builder)
    with pytest.raises(PreconditionError):
        col_homotopy(sweedler_q, 1, 1, HomElement.from_column(bd, space, {}), builder=builder)


def test_homotopy_returns_a_primitive(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    builder = HopfBicomplexBuilder(sweedler_q, m, m)
    bd = Bidegree(0, 1)
    kernel = kernel_basis(builder.differential_dc(bd))
    g = HomElement.from_column(bd, builder.space(bd), kernel.vector(0))
    f = col_homotopy(sweedler_q, 1, 1, g, builder=builder)
    assert f.bidegree == Bidegree(0, 0)
    assert builder.differential_dc(f.bidegree) @ f.vector(sweedler_q.field) == g.vector(sweedler_q.field)


def test_vanishing_for_modules_in_other_bases(sweedler_q):
    twisted = transport_structure(free_hopf_module(1, sweedler_q), sweedler_basis_change(sweedler_q))
    result = hopf_vanishing_general(sweedler_q, regular_module(sweedler_q), twisted, 3)
    assert result.passed
    assert result.report.dims() == [1, 0, 0]
    assert {v.detail for v in result.verdicts if "≅" in v.name} == {"dim V = 1"}


def test_vanishing_needs_a_skew_antipode(truncated_monoid):
    a = regular_module(truncated_monoid)
    with pytest.raises(SkewAntipodeMissingError):
        hopf_vanishing_general(truncated_monoid, a, a, 2)


def test_vanishing_needs_hopf_modules(sweedler_q, sweedler_sign):
    with pytest.raises(PreconditionError):
        hopf_vanishing_general(sweedler_q, sweedler_sign, regular_module(sweedler_q), 2)


FLAVOR_STRUCTURES = {
    "r": ("action", "coaction", "right_action"),
    "l": ("action", "coaction", "left_coaction"),
    "t": ("action", "coaction", "right_action", "left_coaction"),
}


@pytest.mark.parametrize("fixture", [pytest.param("sweedler_q", marks=pytest.mark.slow), "c2_q"])
@pytest.mark.parametrize("flavor", ["r", "l", "t"])
def test_restricted_bicomplexes_are_closed(request, fixture, flavor):
    b = request.getfixturevalue(fixture)
    a = regular_module(b)
    result = restricted_bicomplex(b, a, a, flavor, 3)
    # both differentials out of every bidegree with n+p <= 2
    assert len(result.closure) == 2 * 6
    assert all(v.passed for v in result.closure)
    full = total_cohomology(hopf_bicomplex(b, a, a, 3))
    assert len(result.report.rows) == 3
    for bd, subspace in result.subspaces.items():
        assert subspace.dim <= full.bidegree_dims[f"{bd.n},{bd.p}"]
    assert result.report.dim(0) == morphism_space(b, a, a, FLAVOR_STRUCTURES[flavor]).dim


def test_hopf_degree_one_cocycles(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    degree_one = z1_b1_explicit(sweedler_q, m, m, "hopf")
    report = total_cohomology(hopf_bicomplex(sweedler_q, m, m, 2))
    assert degree_one.h1 == report.dim(1) == 0
    for k in range(degree_one.z1.dim):
        pair = CocyclePair.from_vector(sweedler_q, m.dim, m.dim, degree_one.z1.vector(k))
        assert build_extension(sweedler_q, m, m, pair, "hopf").is_valid


def test_restricted_flavors_check_their_structures(sweedler_q):
    m = free_hopf_module(1, sweedler_q)
    with pytest.raises(StructureMissingError):
        restricted_bicomplex(sweedler_q, m, m, "r", 2)
    a = regular_module(sweedler_q)
    with pytest.raises(PreconditionError):
        restricted_bicomplex(sweedler_q, a, a, "x", 2)
