import pytest

from app.core.field import FieldSpec
from app.core.linalg import SparseMatrix
from app.services.catalog import cyclic_group, monoid_algebra, sweedler
from app.services.structures import (
    ActionTensor,
    CoactionTensor,
    ModuleClass,
    Side,
    StructuredModule,
    character_module,
    trivial_yd,
)


@pytest.fixture(scope="session")
def qq():
    return FieldSpec.rationals()


@pytest.fixture(scope="session")
def f2():
    return FieldSpec.prime(2)


@pytest.fixture(scope="session")
def f3():
    return FieldSpec.prime(3)


@pytest.fixture(scope="session")
def sweedler_q(qq):
    return sweedler(qq)


@pytest.fixture(scope="session")
def c2_q(qq):
    return cyclic_group(2, qq)


@pytest.fixture(scope="session")
def c2_f2(f2):
    return cyclic_group(2, f2)


@pytest.fixture(scope="session")
def c3_q(qq):
    return cyclic_group(3, qq)


@pytest.fixture(scope="session")
def truncated_monoid(qq):
    # {1, t} with t² = t
    return monoid_algebra([[0, 1], [1, 1]], qq, name="k[{1,t}]")


def sweedler_sign_module(b):
    """k with g ↦ -1, x ↦ 0, graded by g."""
    return character_module(b, [1, -1, 0, 0], 1, name="k_sign")


def yd_modules(b):
    """Trivial module plus every one dimensional character module we know to be YD over ``b``."""
    modules = [trivial_yd(b)]
    if b.name == "Sweedler":
        modules.append(sweedler_sign_module(b))
    elif b.name.startswith("k[C"):
        n = b.dim
        if n == 2:
            modules.append(character_module(b, [1, -1], 1, name="k_sign_g"))
            modules.append(character_module(b, [1, 1], 1, name="k_g"))
        else:
            modules.append(character_module(b, [1] * n, 1, name="k_g"))
    return modules


@pytest.fixture
def sweedler_sign(sweedler_q):
    return sweedler_sign_module(sweedler_q)


def swap_module(b):
    """
    Over k[C2]: g swaps m0 and m1 while m0 is graded by 1 and m1 by g.

    A module and a comodule, but not a Yetter-Drinfel'd module.
    """
    F = b.field
    action = ActionTensor.from_table(F, Side.LEFT, 2, 2, {
        (0, 0): {0: 1}, (0, 1): {1: 1},
        (1, 0): {1: 1}, (1, 1): {0: 1},
    })
    coaction = CoactionTensor.from_table(F, Side.RIGHT, 2, 2, {0: [(0, 0, 1)], 1: [(1, 1, 1)]})
    return StructuredModule(F, 2, action=action, coaction=coaction, module_class=ModuleClass.YD, name="swap")


@pytest.fixture
def swap(c2_q):
    return swap_module(c2_q)


def sweedler_basis_change(b):
    """An invertible 4x4 matrix used to present V⊗A in a non-free basis."""
    return SparseMatrix.from_dense(b.field, [
        [1, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 2, 1, 0],
        [1, 0, 0, 1],
    ])
