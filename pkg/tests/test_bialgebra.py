import pytest

from app.core.exceptions import (
    AssertionFailure,
    CharacteristicConflictError,
    InvalidGroupTableError,
    PreconditionError,
)
from app.core.linalg import SparseMatrix
from app.services.bialgebra import (
    AntipodeKind,
    Bialgebra,
    convolution_defects,
    delta_iter,
    solve_antipode,
    verify_bialgebra,
)
from app.services.catalog import catalog, cyclic_group, dual_of, group_algebra, sweedler


@pytest.mark.parametrize("name, params", [
    ("cyclic-group", {"n": 2}),
    ("cyclic-group", {"n": 3}),
    ("sweedler", {}),
    ("group-algebra", {"table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}),
    ("monoid-algebra", {"table": [[0, 1], [1, 1]]}),
    ("dual-of", {"of": {"catalog": "sweedler"}}),
])
def test_catalog_entries_are_bialgebras(qq, name, params):
    b = catalog(name, qq, params)
    assert verify_bialgebra(b) == []


def test_sweedler_multiplication(sweedler_q):
    # x g = -g x and x² = 0
    assert sweedler_q.product(2, 1) == {3: -sweedler_q.field.one}
    assert sweedler_q.product(1, 2) == {3: sweedler_q.field.one}
    assert sweedler_q.product(2, 2) == {}
    assert sweedler_q.product(1, 1) == {0: sweedler_q.field.one}


def test_sweedler_antipode(sweedler_q, qq):
    antipode = solve_antipode(sweedler_q)
    expected = SparseMatrix.from_entries(qq, 4, 4, [(0, 0, 1), (1, 1, 1), (3, 2, -1), (2, 3, 1)])
    assert antipode.matrix == expected
    assert convolution_defects(sweedler_q, antipode) == []


def test_skew_antipode_is_the_inverse_of_the_antipode(sweedler_q):
    antipode = solve_antipode(sweedler_q).matrix
    skew = solve_antipode(sweedler_q, AntipodeKind.SKEW)
    assert convolution_defects(sweedler_q, skew) == []
    assert antipode @ skew.matrix == sweedler_q.identity()


def test_truncated_monoid_has_no_antipode(truncated_monoid):
    assert verify_bialgebra(truncated_monoid) == []
    assert solve_antipode(truncated_monoid) is None
    assert solve_antipode(truncated_monoid, AntipodeKind.SKEW) is None


def test_group_inverse_is_the_antipode(c3_q):
    antipode = solve_antipode(c3_q).matrix
    assert antipode.column(1) == {2: c3_q.field.one}
    assert antipode.column(2) == {1: c3_q.field.one}


def test_iterated_coproduct_of_x(sweedler_q):
    # Δ₂(x) = x⊗1⊗1 + g⊗x⊗1 + g⊗g⊗x
    legs = dict(sweedler_q.coproduct_terms(2, 2))
    assert set(legs) == {(2, 0, 0), (1, 2, 0), (1, 1, 2)}
    assert delta_iter(sweedler_q, 0) == sweedler_q.identity()


def test_sweedler_needs_odd_characteristic(f2):
    with pytest.raises(CharacteristicConflictError):
        sweedler(f2)


@pytest.mark.parametrize("table", [
    [[0, 1], [1, 2]],
    [[0, 1], [0, 1]],
    [[1, 0], [0, 0]],
    [],
])
def test_bad_group_tables(qq, table):
    with pytest.raises(InvalidGroupTableError):
        group_algebra(table, qq)


def test_dual_of_group_algebra_has_idempotent_basis(c2_q):
    dual = dual_of(c2_q)
    one = c2_q.field.one
    assert dual.product(0, 0) == {0: one}
    assert dual.product(0, 1) == {}
    assert verify_bialgebra(dual) == []


def test_broken_tables_are_reported(qq):
    b = cyclic_group(2, qq)
    broken = Bialgebra(qq, 2, b.mult, b.unit, b.comult, b.counit.scale(2), name="broken")
    violations = verify_bialgebra(broken)
    assert {v.condition for v in violations} >= {"counit"}


def test_catalog_rejects_unknown_entries(qq):
    with pytest.raises(PreconditionError):
        catalog("taft", qq)
    with pytest.raises(PreconditionError):
        catalog("cyclic-group", qq, {"order": 2})


def test_catalog_surfaces_axiom_failures(qq, monkeypatch):
    import app.services.catalog as catalog_module

    monkeypatch.setitem(catalog_module._BUILDERS, "sweedler",
                        lambda field: Bialgebra(field, 1, SparseMatrix.identity(field, 1),
                                                SparseMatrix.identity(field, 1), SparseMatrix.identity(field, 1),
                                                SparseMatrix.identity(field, 1).scale(2)))
    with pytest.raises(AssertionFailure):
        catalog("sweedler", qq)
