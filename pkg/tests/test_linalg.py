import pytest
from sympy.polys.matrices import DomainMatrix

from app.core.exceptions import (
    BudgetExceededError,
    ContainmentViolationError,
    FieldMismatchError,
    InvalidCoefficientError,
    InvalidFieldError,
    NotInSpanError,
)
from app.core.field import FieldSpec
from app.core.linalg import (
    SparseMatrix,
    Subspace,
    entry_budget_limit,
    flatten,
    image_basis,
    intersect,
    inverse,
    kernel_basis,
    quotient_dim,
    rank,
    solve,
    tensor_permutation,
    unflatten,
)

DENSE_CASES = [
    [[1, 2, 3], [2, 4, 6], [1, 0, 1]],
    [[0, 0, 0], [0, 0, 0]],
    [[2, -1, 0, 4], [1, 1, 1, 1], [3, 0, 1, 5], [0, 3, 2, -2]],
    [[1, 0, 2, 0, 1], [0, 1, 1, 0, 3], [1, 1, 3, 0, 4]],
]


def domain_rank(field, dense):
    K = field.domain
    rows, cols = len(dense), len(dense[0])
    return DomainMatrix([[K(v) for v in row] for row in dense], (rows, cols), K).rank()


@pytest.mark.parametrize("dense", DENSE_CASES)
@pytest.mark.parametrize("field", [FieldSpec.rationals(), FieldSpec.prime(2), FieldSpec.prime(5)])
def test_rank_matches_sympy(field, dense):
    m = SparseMatrix.from_dense(field, dense)
    assert rank(m) == domain_rank(field, dense)


@pytest.mark.parametrize("dense", DENSE_CASES)
def test_kernel_basis_is_annihilated_and_complete(qq, dense):
    m = SparseMatrix.from_dense(qq, dense)
    kernel = kernel_basis(m)
    assert (m @ kernel.basis).is_zero()
    assert kernel.dim == m.cols - rank(m)
    assert rank(kernel.basis) == kernel.dim


def test_image_basis_spans_the_columns(qq):
    m = SparseMatrix.from_dense(qq, DENSE_CASES[2])
    image = image_basis(m)
    assert image.dim == rank(m)
    assert image.contains(m)


def test_solve_and_inverse(qq):
    a = SparseMatrix.from_dense(qq, [[2, 1], [1, 1]])
    targets = SparseMatrix.from_dense(qq, [[3, 1], [2, 0]])
    x = solve(a, targets)
    assert a @ x == targets
    assert a @ inverse(a) == SparseMatrix.identity(qq, 2)


def test_solve_reports_targets_outside_the_span(qq):
    a = SparseMatrix.from_dense(qq, [[1, 0], [0, 0]])
    with pytest.raises(NotInSpanError):
        solve(a, SparseMatrix.from_dense(qq, [[0], [1]]))


def test_intersection_of_two_planes_is_a_line(qq):
    xy = Subspace(3, SparseMatrix.from_dense(qq, [[1, 0], [0, 1], [0, 0]]))
    yz = Subspace(3, SparseMatrix.from_dense(qq, [[0, 0], [1, 0], [0, 1]]))
    line = intersect(xy, yz)
    assert line.dim == 1
    assert line.contains(SparseMatrix.from_dense(qq, [[0], [5], [0]]))


def test_quotient_requires_containment(qq):
    outer = Subspace(2, SparseMatrix.from_dense(qq, [[1], [0]]))
    inner = Subspace(2, SparseMatrix.from_dense(qq, [[0], [1]]))
    with pytest.raises(ContainmentViolationError):
        quotient_dim(outer, inner)
    assert quotient_dim(Subspace.whole(qq, 2), inner) == 1


def test_entry_budget_is_enforced(qq):
    with entry_budget_limit(10):
        with pytest.raises(BudgetExceededError) as info:
            SparseMatrix.zeros(qq, 4, 4)
    assert info.value.exit_code == 3
    assert SparseMatrix.zeros(qq, 4, 4).is_zero()


def test_fields_do_not_mix(qq, f3):
    with pytest.raises(FieldMismatchError):
        SparseMatrix.identity(qq, 2) @ SparseMatrix.identity(f3, 2)


def test_elements_of_another_field_are_rejected(qq, f2, f3):
    with pytest.raises(FieldMismatchError):
        f2.coerce(f3.one)
    with pytest.raises(FieldMismatchError):
        qq.coerce(f2.one)
    assert f3.coerce(f3.one) == f3.one


def test_coefficient_parsing(qq, f2, f3):
    assert qq.parse("2/7") == qq.fraction(2, 7)
    assert qq.parse("-3") == qq.coerce(-3)
    assert f3.parse("5") == f3.coerce(2)
    assert f3.parse("1/2") == f3.coerce(2)
    with pytest.raises(InvalidCoefficientError):
        f2.parse("1/2")
    with pytest.raises(InvalidCoefficientError):
        qq.parse("one half")


def test_prime_field_requires_a_prime():
    with pytest.raises(InvalidFieldError):
        FieldSpec.prime(4)


def test_tensor_index_conventions(qq):
    dims = (2, 3, 4)
    assert flatten((1, 2, 3), dims) == 1 * 12 + 2 * 4 + 3
    assert unflatten(flatten((1, 0, 2), dims), dims) == (1, 0, 2)
    swap = tensor_permutation(qq, (2, 3), (1, 0))
    # e_1 ⊗ f_2 goes to f_2 ⊗ e_1
    assert swap.get(flatten((2, 1), (3, 2)), flatten((1, 2), (2, 3))) == qq.one
