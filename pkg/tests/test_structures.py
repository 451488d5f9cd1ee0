from dataclasses import replace

import pytest

from app.core.exceptions import (
    DimensionMismatchError,
    PreconditionError,
    SkewAntipodeMissingError,
    StructureMissingError,
)
from app.core.linalg import SparseMatrix
from app.services.structures import (
    CoactionTensor,
    ModuleClass,
    Side,
    check_hopf_bimodule,
    check_hopf_module,
    check_module,
    check_yd,
    character_module,
    coinvariants,
    free_hopf_bimodule,
    free_hopf_module,
    fundamental_decomposition,
    morphism_space,
    regular_module,
    structure_defects,
    transport_structure,
    trivial_yd,
)
from tests.conftest import sweedler_basis_change, yd_modules


@pytest.mark.parametrize("fixture", ["sweedler_q", "c2_q", "c2_f2", "c3_q"])
def test_known_yd_modules_pass(request, fixture):
    b = request.getfixturevalue(fixture)
    for m in yd_modules(b):
        assert check_module(b, m) == [], m.name


def test_swap_module_is_not_yetter_drinfeld(c2_q, swap):
    defects = check_yd(c2_q, swap)
    assert defects
    assert all(d.condition == "yetter-drinfeld" for d in defects)


@pytest.mark.parametrize("chi, grade", [([1, 1, 0, 0], 1), ([2, 1, 0, 0], 0), ([1, -1, 0, 0], 2)])
def test_invalid_characters_are_rejected(sweedler_q, chi, grade):
    with pytest.raises(PreconditionError):
        character_module(sweedler_q, chi, grade)


def test_character_needs_one_value_per_basis_element(sweedler_q):
    with pytest.raises(DimensionMismatchError):
        character_module(sweedler_q, [1, -1], 1)


@pytest.mark.parametrize("dim_v", [1, 2])
def test_free_hopf_modules(sweedler_q, dim_v):
    m = free_hopf_module(dim_v, sweedler_q)
    assert m.dim == 4 * dim_v
    assert check_module(sweedler_q, m) == []
    assert coinvariants(sweedler_q, m).dim == dim_v


def test_free_hopf_module_needs_a_positive_dimension(sweedler_q):
    with pytest.raises(PreconditionError):
        free_hopf_module(0, sweedler_q)


@pytest.mark.parametrize("fixture", ["sweedler_q", "c2_q"])
def test_regular_module_is_a_hopf_bimodule(request, fixture):
    b = request.getfixturevalue(fixture)
    assert check_hopf_bimodule(b, regular_module(b)) == []


def test_free_hopf_bimodule(c2_q):
    m = free_hopf_bimodule(1, c2_q)
    assert m.dim == 4
    assert check_module(c2_q, m) == []


def test_missing_structures_are_named(sweedler_q):
    with pytest.raises(StructureMissingError) as info:
        check_hopf_bimodule(sweedler_q, trivial_yd(sweedler_q))
    assert "right_action" in info.value.detail


def test_trivial_module_is_not_a_hopf_module(sweedler_q):
    assert check_hopf_module(sweedler_q, trivial_yd(sweedler_q))
    with pytest.raises(PreconditionError):
        fundamental_decomposition(sweedler_q, trivial_yd(sweedler_q))


def constant_coaction(b, dim):
    """m ↦ m⊗1."""
    return CoactionTensor.from_table(b.field, Side.RIGHT, b.dim, dim, {u: [(u, 0, 1)] for u in range(dim)})


def test_constant_coaction_breaks_the_hopf_module_condition(sweedler_q):
    b = sweedler_q
    m = replace(regular_module(b), right_action=None, left_coaction=None, coaction=constant_coaction(b, 4),
                module_class=ModuleClass.HOPF)
    assert structure_defects(b, m) == []
    defects = check_hopf_module(b, m)
    assert {d.condition for d in defects} == {"hopf left-right"}
    # every a other than 1 fails: ρ(a·m) has no a₂ leg
    assert {tuple(d.witness) for d in defects} == {(a, u) for a in (1, 2, 3) for u in range(4)}
    at_x = next(d for d in defects if d.witness == [2, 0])
    # ρ(x·1) - Σ x₁·1 ⊗ x₂ = -g⊗x
    assert at_x.vector == {"6": "-1"}


def test_constant_coaction_breaks_the_hopf_bimodule_conditions(sweedler_q):
    b = sweedler_q
    m = replace(regular_module(b), coaction=constant_coaction(b, 4))
    defects = check_hopf_bimodule(b, m)
    assert {d.condition for d in defects} == {"hopf left-right", "hopf right-right"}
    right_right = [d for d in defects if d.condition == "hopf right-right"]
    at_x = next(d for d in right_right if d.witness == [0, 2])
    # ρ(1·x) - Σ 1·x₁ ⊗ x₂ = -g⊗x
    assert at_x.vector == {"6": "-1"}


def test_decomposition_of_the_regular_module(sweedler_q):
    decomposition = fundamental_decomposition(sweedler_q, regular_module(sweedler_q))
    assert decomposition.coinvariants.dim == 1
    assert decomposition.free.dim == 4


def test_decomposition_in_a_non_free_basis(sweedler_q):
    twisted = transport_structure(free_hopf_module(1, sweedler_q), sweedler_basis_change(sweedler_q))
    assert check_hopf_module(sweedler_q, twisted) == []
    decomposition = fundamental_decomposition(sweedler_q, twisted)
    assert decomposition.coinvariants.dim == 1
    assert decomposition.forward @ decomposition.inverse == SparseMatrix.identity(sweedler_q.field, 4)


def test_decomposition_needs_a_skew_antipode(truncated_monoid):
    with pytest.raises(SkewAntipodeMissingError):
        fundamental_decomposition(truncated_monoid, regular_module(truncated_monoid))


def test_transport_rejects_wrong_shapes(sweedler_q):
    with pytest.raises(DimensionMismatchError):
        transport_structure(free_hopf_module(1, sweedler_q), SparseMatrix.identity(sweedler_q.field, 3))


def test_morphism_space_dimensions(sweedler_q, c2_q, swap, sweedler_sign):
    both = ("action", "coaction")
    k = trivial_yd(sweedler_q)
    assert morphism_space(sweedler_q, k, k, both).dim == 1
    assert morphism_space(sweedler_q, k, sweedler_sign, both).dim == 0
    assert morphism_space(sweedler_q, regular_module(sweedler_q), regular_module(sweedler_q), both).dim == 1
    free = free_hopf_module(2, sweedler_q)
    assert morphism_space(sweedler_q, free, free, both).dim == 4
    # linear maps commuting with the swap and preserving the grading are scalars
    assert morphism_space(c2_q, swap, swap).dim == 1
    assert morphism_space(c2_q, swap, swap, ("action",)).dim == 2
