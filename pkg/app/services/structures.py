"""
Modules, comodules and their compatibility classes over a bialgebra.

Structure maps are stored as matrices in the tensor bases used everywhere in
the engine (leftmost factor most significant):

* left action      dimM x (d*dimM), column a*dimM + u holds a·m_u
* right action     dimM x (dimM*d), column u*d + a holds m_u·a
* right coaction   (dimM*d) x dimM, row u0*d + a
* left coaction    (d*dimM) x dimM, row a*dimM + u0
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from loguru import logger

from app.core.exceptions import (
    DecompositionError,
    DimensionMismatchError,
    PreconditionError,
    SkewAntipodeMissingError,
    StructureMissingError,
)
from app.core.field import FieldSpec, require_same_field
from app.core.linalg import (
    Row,
    SparseMatrix,
    Subspace,
    inverse,
    kernel_basis,
    kron_all,
    tensor_permutation,
)
from app.models.v1 import DefectEntry
from app.services.bialgebra import Algebra, AntipodeKind, Bialgebra, matrix_defects, solve_antipode


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class ModuleClass(str, Enum):
    PLAIN = "plain"
    YD = "yd"
    HOPF = "hopf"
    HOPF_BIMODULE = "hopf-bimodule"


@dataclass(frozen=True, eq=False)
class ActionTensor:
    side: Side
    matrix: SparseMatrix
    algebra_dim: int
    module_dim: int

    def __post_init__(self) -> None:
        expected = (self.module_dim, self.algebra_dim * self.module_dim)
        if self.matrix.shape != expected:
            raise DimensionMismatchError(f"{self.side.value} action has shape {self.matrix.shape}, expected {expected}")

    @cached_property
    def _columns(self) -> list[Row]:
        return self.matrix.columns()

    def act(self, a: int, u: int) -> Row:
        """a·m_u for a left action, m_u·a for a right one."""
        if self.side is Side.LEFT:
            return self._columns[a * self.module_dim + u]
        return self._columns[u * self.algebra_dim + a]

    @classmethod
    def from_table(cls, field: FieldSpec, side: Side, algebra_dim: int, module_dim: int,
                   table: Mapping[tuple[int, int], Mapping[int, Any]]) -> "ActionTensor":
        """``table[(a, u)]`` maps u' to the coefficient of m_{u'} in the action of e_a on m_u."""
        entries = []
        for (a, u), values in table.items():
            column = a * module_dim + u if side is Side.LEFT else u * algebra_dim + a
            entries.extend((target, column, value) for target, value in values.items())
        matrix = SparseMatrix.from_entries(field, module_dim, algebra_dim * module_dim, entries)
        return cls(side, matrix, algebra_dim, module_dim)


@dataclass(frozen=True, eq=False)
class CoactionTensor:
    side: Side
    matrix: SparseMatrix
    algebra_dim: int
    module_dim: int

    def __post_init__(self) -> None:
        expected = (self.algebra_dim * self.module_dim, self.module_dim)
        if self.matrix.shape != expected:
            raise DimensionMismatchError(f"{self.side.value} coaction has shape {self.matrix.shape}, expected {expected}")

    @cached_property
    def _terms(self) -> list[list[tuple[int, int, Any]]]:
        out = []
        for column in self.matrix.columns():
            terms = []
            for row, value in sorted(column.items()):
                if self.side is Side.RIGHT:
                    u0, a = divmod(row, self.algebra_dim)
                else:
                    a, u0 = divmod(row, self.module_dim)
                terms.append((u0, a, value))
            out.append(terms)
        return out

    def coact(self, u: int) -> list[tuple[int, int, Any]]:
        """The coaction of m_u as (u0, a, coefficient) triples, whatever the side."""
        return self._terms[u]

    @classmethod
    def from_table(cls, field: FieldSpec, side: Side, algebra_dim: int, module_dim: int,
                   table: Mapping[int, Iterable[tuple[int, int, Any]]]) -> "CoactionTensor":
        """``table[u]`` lists (u0, a, coefficient) triples."""
        entries = []
        for u, terms in table.items():
            for u0, a, value in terms:
                row = u0 * algebra_dim + a if side is Side.RIGHT else a * module_dim + u0
                entries.append((row, u, value))
        matrix = SparseMatrix.from_entries(field, algebra_dim * module_dim, module_dim, entries)
        return cls(side, matrix, algebra_dim, module_dim)


@dataclass(frozen=True, eq=False)
class StructuredModule:
    field: FieldSpec
    dim: int
    action: Optional[ActionTensor] = None
    right_action: Optional[ActionTensor] = None
    coaction: Optional[CoactionTensor] = None
    left_coaction: Optional[CoactionTensor] = None
    module_class: ModuleClass = ModuleClass.PLAIN
    name: str = "M"

    def __post_init__(self) -> None:
        for attr, side in (("action", Side.LEFT), ("right_action", Side.RIGHT),
                           ("coaction", Side.RIGHT), ("left_coaction", Side.LEFT)):
            structure = getattr(self, attr)
            if structure is None:
                continue
            if structure.side is not side:
                raise PreconditionError(f"{attr} of {self.name} must be a {side.value} structure")
            if structure.module_dim != self.dim:
                raise DimensionMismatchError(f"{attr} of {self.name} acts on dimension {structure.module_dim}, not {self.dim}")
            require_same_field(self.field, structure.matrix.field)

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise StructureMissingError(f"module {self.name} lacks {', '.join(missing)}",
                                        context={"module": self.name})

    @property
    def structures(self) -> tuple[str, ...]:
        return tuple(n for n in ("action", "right_action", "coaction", "left_coaction") if getattr(self, n) is not None)

    def renamed(self, name: str) -> "StructuredModule":
        return replace(self, name=name)


# Axioms of the individual structures

def left_action_defects(alg: Algebra, action: SparseMatrix, module_dim: int) -> list[DefectEntry]:
    """Associativity and unit law of a left action matrix (dimM x d*dimM) of ``alg``."""
    d = alg.dim
    identity_m = SparseMatrix.identity(alg.field, module_dim)
    identity_a = SparseMatrix.identity(alg.field, d)
    defects = matrix_defects("action associativity", action @ alg.mult.kron(identity_m),
                             action @ identity_a.kron(action), (d, d, module_dim))
    defects += matrix_defects("action unit", action @ alg.unit.kron(identity_m), identity_m, (module_dim,))
    return defects


def _right_action_defects(b: Bialgebra, action: SparseMatrix, module_dim: int) -> list[DefectEntry]:
    identity_m = SparseMatrix.identity(b.field, module_dim)
    identity_a = b.identity()
    defects = matrix_defects("right action associativity", action @ identity_m.kron(b.mult),
                             action @ action.kron(identity_a), (module_dim, b.dim, b.dim))
    defects += matrix_defects("right action unit", action @ identity_m.kron(b.unit), identity_m, (module_dim,))
    return defects


def _right_coaction_defects(b: Bialgebra, coaction: SparseMatrix, module_dim: int) -> list[DefectEntry]:
    identity_m = SparseMatrix.identity(b.field, module_dim)
    identity_a = b.identity()
    defects = matrix_defects("coaction coassociativity", coaction.kron(identity_a) @ coaction,
                             identity_m.kron(b.comult) @ coaction, (module_dim,))
    defects += matrix_defects("coaction counit", identity_m.kron(b.counit) @ coaction, identity_m, (module_dim,))
    return defects


def _left_coaction_defects(b: Bialgebra, coaction: SparseMatrix, module_dim: int) -> list[DefectEntry]:
    identity_m = SparseMatrix.identity(b.field, module_dim)
    identity_a = b.identity()
    defects = matrix_defects("left coaction coassociativity", b.comult.kron(identity_m) @ coaction,
                             identity_a.kron(coaction) @ coaction, (module_dim,))
    defects += matrix_defects("left coaction counit", b.counit.kron(identity_m) @ coaction, identity_m, (module_dim,))
    return defects


def structure_defects(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    """Axiom defects of every structure ``m`` carries, each checked on its own."""
    defects: list[DefectEntry] = []
    if m.action is not None:
        defects += left_action_defects(b.algebra, m.action.matrix, m.dim)
    if m.right_action is not None:
        defects += _right_action_defects(b, m.right_action.matrix, m.dim)
    if m.coaction is not None:
        defects += _right_coaction_defects(b, m.coaction.matrix, m.dim)
    if m.left_coaction is not None:
        defects += _left_coaction_defects(b, m.left_coaction.matrix, m.dim)
    return defects


# Compatibility conditions

def _perm(b: Bialgebra, dims: Sequence[int], order: Sequence[int]) -> SparseMatrix:
    return tensor_permutation(b.field, dims, order)


def _yd_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    # Σ (a₂·m)₀ ⊗ (a₂·m)₁a₁ = Σ a₁·m₀ ⊗ a₂m₁
    d, k = b.dim, m.dim
    Id, Im = b.identity(), SparseMatrix.identity(b.field, k)
    omega, rho = m.action.matrix, m.coaction.matrix
    lhs = (Im.kron(b.mult) @ _perm(b, (d, k, d), (1, 2, 0)) @ Id.kron(rho) @ Id.kron(omega)
           @ b.comult.kron(Im))
    rhs = omega.kron(b.mult) @ _perm(b, (d, d, k, d), (0, 2, 1, 3)) @ b.comult.kron(rho)
    return matrix_defects("yetter-drinfeld", lhs, rhs, (d, k))


def _left_right_hopf_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    # ρ(a·m) = Σ a₁·m₀ ⊗ a₂m₁
    d, k = b.dim, m.dim
    omega, rho = m.action.matrix, m.coaction.matrix
    lhs = rho @ omega
    rhs = omega.kron(b.mult) @ _perm(b, (d, d, k, d), (0, 2, 1, 3)) @ b.comult.kron(rho)
    return matrix_defects("hopf left-right", lhs, rhs, (d, k))


def _left_left_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    # λ(a·m) = Σ a₁m₍₋₁₎ ⊗ a₂·m₍₀₎
    d, k = b.dim, m.dim
    omega, lam = m.action.matrix, m.left_coaction.matrix
    rhs = b.mult.kron(omega) @ _perm(b, (d, d, d, k), (0, 2, 1, 3)) @ b.comult.kron(lam)
    return matrix_defects("hopf left-left", lam @ omega, rhs, (d, k))


def _right_left_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    # λ(m·a) = Σ m₍₋₁₎a₁ ⊗ m₍₀₎·a₂
    d, k = b.dim, m.dim
    omega_r, lam = m.right_action.matrix, m.left_coaction.matrix
    rhs = b.mult.kron(omega_r) @ _perm(b, (d, k, d, d), (0, 2, 1, 3)) @ lam.kron(b.comult)
    return matrix_defects("hopf right-left", lam @ omega_r, rhs, (k, d))


def _right_right_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    # ρ(m·a) = Σ m₀·a₁ ⊗ m₁a₂
    d, k = b.dim, m.dim
    omega_r, rho = m.right_action.matrix, m.coaction.matrix
    rhs = omega_r.kron(b.mult) @ _perm(b, (k, d, d, d), (0, 2, 1, 3)) @ rho.kron(b.comult)
    return matrix_defects("hopf right-right", rho @ omega_r, rhs, (k, d))


def _bimodule_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    Id = b.identity()
    omega, omega_r = m.action.matrix, m.right_action.matrix
    return matrix_defects("bimodule", omega_r @ omega.kron(Id), omega @ Id.kron(omega_r), (b.dim, m.dim, b.dim))


def _bicomodule_condition(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    Id = b.identity()
    rho, lam = m.coaction.matrix, m.left_coaction.matrix
    return matrix_defects("bicomodule", lam.kron(Id) @ rho, Id.kron(rho) @ lam, (m.dim,))


@dataclass(frozen=True)
class Condition:
    requires: tuple[str, ...]
    evaluate: Callable[[Bialgebra, StructuredModule], list[DefectEntry]]


CONDITIONS: dict[str, Condition] = {
    "yetter-drinfeld": Condition(("action", "coaction"), _yd_condition),
    "hopf left-right": Condition(("action", "coaction"), _left_right_hopf_condition),
    "hopf left-left": Condition(("action", "left_coaction"), _left_left_condition),
    "hopf right-left": Condition(("right_action", "left_coaction"), _right_left_condition),
    "hopf right-right": Condition(("right_action", "coaction"), _right_right_condition),
    "bimodule": Condition(("action", "right_action"), _bimodule_condition),
    "bicomodule": Condition(("coaction", "left_coaction"), _bicomodule_condition),
}

CLASS_CONDITIONS: dict[ModuleClass, tuple[str, ...]] = {
    ModuleClass.PLAIN: (),
    ModuleClass.YD: ("yetter-drinfeld",),
    ModuleClass.HOPF: ("hopf left-right",),
    ModuleClass.HOPF_BIMODULE: ("bimodule", "bicomodule", "hopf left-left", "hopf left-right",
                                "hopf right-left", "hopf right-right"),
}

# Left-right Hopf modules inside right modules, inside left comodules, and Hopf bimodules.
FLAVOR_CONDITIONS: dict[str, tuple[str, ...]] = {
    "r": ("bimodule", "hopf left-right", "hopf right-right"),
    "l": ("bicomodule", "hopf left-right", "hopf left-left"),
    "t": CLASS_CONDITIONS[ModuleClass.HOPF_BIMODULE],
}


def check_conditions(b: Bialgebra, m: StructuredModule, names: Iterable[str]) -> list[DefectEntry]:
    require_same_field(b.field, m.field)
    defects: list[DefectEntry] = []
    for name in names:
        condition = CONDITIONS[name]
        m.require(*condition.requires)
        defects += condition.evaluate(b, m)
    return defects


def check_yd(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    """Defects of the Yetter-Drinfel'd compatibility; empty iff ``m`` is a YD module."""
    return check_conditions(b, m, CLASS_CONDITIONS[ModuleClass.YD])


def check_hopf_module(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    return check_conditions(b, m, CLASS_CONDITIONS[ModuleClass.HOPF])


def check_hopf_bimodule(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    return check_conditions(b, m, CLASS_CONDITIONS[ModuleClass.HOPF_BIMODULE])


def check_module(b: Bialgebra, m: StructuredModule) -> list[DefectEntry]:
    """Structure axioms plus the conditions of the declared class."""
    return structure_defects(b, m) + check_conditions(b, m, CLASS_CONDITIONS[m.module_class])


# Constructors

def trivial_yd(b: Bialgebra) -> StructuredModule:
    """k with a·1 = ε(a) and 1 ↦ 1⊗1."""
    action = ActionTensor(Side.LEFT, b.counit, b.dim, 1)
    coaction = CoactionTensor(Side.RIGHT, b.unit, b.dim, 1)
    return StructuredModule(b.field, 1, action=action, coaction=coaction, module_class=ModuleClass.YD, name="k")


def character_module(b: Bialgebra, chi: Sequence[Any], grade: int, name: str = "") -> StructuredModule:
    """
    One dimensional YD module: e_a acts by chi[a] and the coaction is 1 ↦ 1⊗e_grade.

    Raises :class:`PreconditionError` unless chi is an algebra character, e_grade
    is grouplike and the two are YD-compatible.
    """
    if len(chi) != b.dim or not 0 <= grade < b.dim:
        raise DimensionMismatchError("character needs one value per basis element and a basis grade")
    F = b.field
    action = ActionTensor(Side.LEFT, SparseMatrix.from_entries(F, 1, b.dim, [(0, a, v) for a, v in enumerate(chi)]),
                          b.dim, 1)
    coaction = CoactionTensor(Side.RIGHT, SparseMatrix.from_entries(F, b.dim, 1, [(grade, 0, 1)]), b.dim, 1)
    module = StructuredModule(F, 1, action=action, coaction=coaction, module_class=ModuleClass.YD,
                              name=name or f"k(chi, e{grade})")
    defects = check_module(b, module)
    if defects:
        raise PreconditionError(f"{module.name} is not a Yetter-Drinfel'd module ({defects[0].condition})")
    return module


def regular_module(b: Bialgebra) -> StructuredModule:
    """A over itself: multiplication on both sides, Δ as both coactions."""
    d = b.dim
    return StructuredModule(
        b.field,
        d,
        action=ActionTensor(Side.LEFT, b.mult, d, d),
        right_action=ActionTensor(Side.RIGHT, b.mult, d, d),
        coaction=CoactionTensor(Side.RIGHT, b.comult, d, d),
        left_coaction=CoactionTensor(Side.LEFT, b.comult, d, d),
        module_class=ModuleClass.HOPF_BIMODULE,
        name="A",
    )


def free_hopf_module(dim_v: int, b: Bialgebra) -> StructuredModule:
    """V⊗A with a·(v⊗c) = v⊗ac and ρ(v⊗c) = Σ v⊗c₁⊗c₂; basis index v*d + c."""
    if dim_v < 1:
        raise PreconditionError("dimV must be at least 1")
    d, F = b.dim, b.field
    Iv = SparseMatrix.identity(F, dim_v)
    action = Iv.kron(b.mult) @ tensor_permutation(F, (d, dim_v, d), (1, 0, 2))
    coaction = Iv.kron(b.comult)
    return StructuredModule(
        F,
        dim_v * d,
        action=ActionTensor(Side.LEFT, action, d, dim_v * d),
        coaction=CoactionTensor(Side.RIGHT, coaction, d, dim_v * d),
        module_class=ModuleClass.HOPF,
        name=f"V{dim_v}⊗A",
    )


def free_hopf_bimodule(dim_v: int, b: Bialgebra) -> StructuredModule:
    """
    A⊗V⊗A with outer actions and outer-diagonal coactions:
    ρ(x⊗v⊗y) = Σ x₁⊗v⊗y₁⊗x₂y₂ and λ(x⊗v⊗y) = Σ x₁y₁⊗x₂⊗v⊗y₂.
    """
    if dim_v < 1:
        raise PreconditionError("dimV must be at least 1")
    d, F = b.dim, b.field
    k = d * dim_v * d
    Iv, Ik = SparseMatrix.identity(F, dim_v), SparseMatrix.identity(F, k)
    Ivd = SparseMatrix.identity(F, dim_v * d)
    split = kron_all(b.comult, Iv, b.comult)  # x₁, x₂, v, y₁, y₂
    dims = (d, d, dim_v, d, d)
    coaction = Ik.kron(b.mult) @ tensor_permutation(F, dims, (0, 2, 3, 1, 4)) @ split
    left_coaction = b.mult.kron(Ik) @ tensor_permutation(F, dims, (0, 3, 1, 2, 4)) @ split
    return StructuredModule(
        F,
        k,
        action=ActionTensor(Side.LEFT, b.mult.kron(Ivd), d, k),
        right_action=ActionTensor(Side.RIGHT, Ivd.kron(b.mult), d, k),
        coaction=CoactionTensor(Side.RIGHT, coaction, d, k),
        left_coaction=CoactionTensor(Side.LEFT, left_coaction, d, k),
        module_class=ModuleClass.HOPF_BIMODULE,
        name=f"A⊗V{dim_v}⊗A",
    )


def transport_structure(m: StructuredModule, g: SparseMatrix) -> StructuredModule:
    """Rewrite every structure of ``m`` in the basis given by the columns of the invertible ``g``."""
    if g.shape != (m.dim, m.dim):
        raise DimensionMismatchError(f"change of basis must be {m.dim}x{m.dim}")
    g_inv = inverse(g)
    changes: dict[str, Any] = {}
    if m.action is not None:
        t = m.action
        Ia = SparseMatrix.identity(m.field, t.algebra_dim)
        changes["action"] = replace(t, matrix=g_inv @ t.matrix @ Ia.kron(g))
    if m.right_action is not None:
        t = m.right_action
        Ia = SparseMatrix.identity(m.field, t.algebra_dim)
        changes["right_action"] = replace(t, matrix=g_inv @ t.matrix @ g.kron(Ia))
    if m.coaction is not None:
        t = m.coaction
        Ia = SparseMatrix.identity(m.field, t.algebra_dim)
        changes["coaction"] = replace(t, matrix=g_inv.kron(Ia) @ t.matrix @ g)
    if m.left_coaction is not None:
        t = m.left_coaction
        Ia = SparseMatrix.identity(m.field, t.algebra_dim)
        changes["left_coaction"] = replace(t, matrix=Ia.kron(g_inv) @ t.matrix @ g)
    return replace(m, name=f"{m.name}^g", **changes)


# Coinvariants and the fundamental theorem

def coinvariants(b: Bialgebra, m: StructuredModule) -> Subspace:
    """{m : ρ(m) = m⊗1} as the kernel of ρ - (id⊗η)."""
    m.require("coaction")
    embed = SparseMatrix.identity(b.field, m.dim).kron(b.unit)
    return kernel_basis(m.coaction.matrix - embed)


def coinvariant_projection(b: Bialgebra, m: StructuredModule, skew: SparseMatrix) -> SparseMatrix:
    """P(m) = Σ S̄(m₁)·m₀."""
    d = b.dim
    flip = tensor_permutation(b.field, (m.dim, d), (1, 0))
    return m.action.matrix @ skew.kron(SparseMatrix.identity(b.field, m.dim)) @ flip @ m.coaction.matrix


@dataclass(frozen=True, eq=False)
class Decomposition:
    coinvariants: Subspace
    forward: SparseMatrix  # V⊗A -> M, (v, a) ↦ a·v
    inverse: SparseMatrix  # M -> V⊗A, m ↦ Σ P(m₀) ⊗ m₁
    free: StructuredModule


def fundamental_decomposition(b: Bialgebra, m: StructuredModule) -> Decomposition:
    """
    Exhibit the Hopf module ``m`` as V⊗A with V its coinvariants.

    Both composites are checked to be identities and the forward map to
    intertwine the action and coaction with those of the free module.
    """
    skew = solve_antipode(b, AntipodeKind.SKEW)
    if skew is None:
        raise SkewAntipodeMissingError(f"{b.name} has no skew antipode")
    m.require("action", "coaction")
    if check_hopf_module(b, m):
        raise PreconditionError(f"{m.name} is not a left-right Hopf module")

    d, F = b.dim, b.field
    space = coinvariants(b, m)
    k = space.dim
    projection = coinvariant_projection(b, m, skew.matrix)
    if not space.contains(projection):
        raise DecompositionError("the coinvariant projection leaves the coinvariants")

    if m.dim != k * d:
        raise DecompositionError(f"{m.name} has dimension {m.dim} but V⊗A has dimension {k * d}")
    forward = m.action.matrix @ SparseMatrix.identity(F, d).kron(space.basis) @ tensor_permutation(F, (k, d), (1, 0))
    inverse_map = space.coordinates(projection).kron(SparseMatrix.identity(F, d)) @ m.coaction.matrix
    if forward @ inverse_map != SparseMatrix.identity(F, m.dim) or \
            inverse_map @ forward != SparseMatrix.identity(F, k * d):
        raise DecompositionError(f"V⊗A -> {m.name} is not bijective")

    free = free_hopf_module(k, b)
    Id = b.identity()
    if forward @ free.action.matrix != m.action.matrix @ Id.kron(forward):
        raise DecompositionError("forward map does not intertwine the actions")
    if m.coaction.matrix @ forward != forward.kron(Id) @ free.coaction.matrix:
        raise DecompositionError("forward map does not intertwine the coactions")
    logger.info("{} ≅ V⊗A with dim V = {}", m.name, k)
    return Decomposition(space, forward, inverse_map, free)


# Equivariant maps

def vec(m: SparseMatrix) -> Row:
    """Column-major vectorisation: entry (i, j) sits at j*rows + i."""
    return {j * m.rows + i: v for i, j, v in m.entries()}


def intertwiners(field: FieldSpec, dim_m: int, dim_n: int,
                 defects: Sequence[Callable[[SparseMatrix], SparseMatrix]]) -> Subspace:
    """
    Maps F: M -> N (as vec(F), index u*dimN + v) annihilated by every linear ``defects`` map.
    """
    unknowns = dim_m * dim_n
    if not defects:
        return Subspace.whole(field, unknowns)
    columns: list[Row] = []
    total_rows = 0
    for index in range(unknowns):
        u, v = divmod(index, dim_n)
        elementary = SparseMatrix.from_entries(field, dim_n, dim_m, [(v, u, 1)])
        column: Row = {}
        offset = 0
        for defect in defects:
            image = defect(elementary)
            column.update({offset + k: value for k, value in vec(image).items()})
            offset += image.rows * image.cols
        total_rows = offset
        columns.append(column)
    return kernel_basis(SparseMatrix.from_columns(field, total_rows, columns))


def morphism_space(b: Bialgebra, m: StructuredModule, n: StructuredModule,
                   structures: Optional[Sequence[str]] = None) -> Subspace:
    """Linear maps M -> N commuting with the chosen structures (default: every structure both carry)."""
    require_same_field(b.field, m.field, n.field)
    if structures is None:
        structures = [s for s in m.structures if s in n.structures]
    Id = b.identity()
    maps: list[Callable[[SparseMatrix], SparseMatrix]] = []
    for name in structures:
        m.require(name)
        n.require(name)
        sm, sn = getattr(m, name).matrix, getattr(n, name).matrix
        if name == "action":
            maps.append(lambda f, sm=sm, sn=sn: f @ sm - sn @ Id.kron(f))
        elif name == "right_action":
            maps.append(lambda f, sm=sm, sn=sn: f @ sm - sn @ f.kron(Id))
        elif name == "coaction":
            maps.append(lambda f, sm=sm, sn=sn: sn @ f - f.kron(Id) @ sm)
        elif name == "left_coaction":
            maps.append(lambda f, sm=sm, sn=sn: sn @ f - Id.kron(f) @ sm)
        else:
            raise StructureMissingError(f"unknown structure {name!r}")
    return intertwiners(b.field, m.dim, n.dim, maps)
