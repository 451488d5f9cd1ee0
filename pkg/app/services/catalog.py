"""Builtin bialgebras used as fixtures and as catalog entries of input documents."""

from typing import Any, Callable, Mapping, Optional, Sequence

from loguru import logger

from app.core.exceptions import (
    AssertionFailure,
    CharacteristicConflictError,
    InvalidGroupTableError,
    PreconditionError,
)
from app.core.field import FieldSpec
from app.services.bialgebra import Bialgebra, verify_bialgebra


def _validate_table(table: Sequence[Sequence[int]], *, group: bool) -> int:
    kind = "group" if group else "monoid"
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise InvalidGroupTableError(f"{kind} table must be a non-empty square array")
    for row in table:
        for entry in row:
            if not isinstance(entry, int) or not 0 <= entry < n:
                raise InvalidGroupTableError(f"{kind} table entry {entry!r} is not an element index below {n}")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a][b]][c] != table[a][table[b][c]]:
                    raise InvalidGroupTableError(f"{kind} table is not associative at ({a}, {b}, {c})")
    identities = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
    if not identities:
        raise InvalidGroupTableError(f"{kind} table has no identity element")
    e = identities[0]
    if group:
        for x in range(n):
            if not any(table[x][y] == e for y in range(n)):
                raise InvalidGroupTableError(f"element {x} has no inverse")
    return e


def _grouplike_bialgebra(field: FieldSpec, table: Sequence[Sequence[int]], identity: int, name: str) -> Bialgebra:
    n = len(table)
    one = field.one
    return Bialgebra.from_tables(
        field,
        n,
        mult={(a, b): {table[a][b]: one} for a in range(n) for b in range(n)},
        comult={a: {(a, a): one} for a in range(n)},
        unit={identity: one},
        counit={a: one for a in range(n)},
        name=name,
    )


def group_algebra(table: Sequence[Sequence[int]], field: FieldSpec, name: str = "k[G]") -> Bialgebra:
    """k[G] from a multiplication table of G on the indices 0..n-1."""
    identity = _validate_table(table, group=True)
    return _grouplike_bialgebra(field, table, identity, name)


def monoid_algebra(table: Sequence[Sequence[int]], field: FieldSpec, name: str = "k[S]") -> Bialgebra:
    identity = _validate_table(table, group=False)
    return _grouplike_bialgebra(field, table, identity, name)


def cyclic_group(n: int, field: FieldSpec) -> Bialgebra:
    if n < 1:
        raise InvalidGroupTableError(f"cyclic group order must be positive, got {n}")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return group_algebra(table, field, name=f"k[C{n}]")


def sweedler(field: FieldSpec) -> Bialgebra:
    """
    Sweedler's four dimensional Hopf algebra on the basis g^a x^b, index a + 2b.

    Requires characteristic different from 2.
    """
    if field.characteristic == 2:
        raise CharacteristicConflictError("Sweedler's algebra needs characteristic different from 2")
    one = field.one
    mult: dict[tuple[int, int], dict[int, Any]] = {}
    for left in range(4):
        a, b = left % 2, left // 2
        for right in range(4):
            c, d = right % 2, right // 2
            if b + d >= 2:
                continue
            sign = -one if b * c % 2 else one
            mult[(left, right)] = {(a + c) % 2 + 2 * (b + d): sign}
    comult: dict[int, dict[tuple[int, int], Any]] = {
        0: {(0, 0): one},
        1: {(1, 1): one},
        # Δ(g^a x) = g^a x ⊗ g^a + g^{a+1} ⊗ g^a x
        2: {(2, 0): one, (1, 2): one},
        3: {(3, 1): one, (0, 3): one},
    }
    return Bialgebra.from_tables(
        field, 4, mult=mult, comult=comult, unit={0: one}, counit={0: one, 1: one}, name="Sweedler"
    )


def dual_of(b: Bialgebra) -> Bialgebra:
    """The dual bialgebra on the dual basis: μ and Δ swap roles by transposition, as do η and ε."""
    return Bialgebra(
        field=b.field,
        dim=b.dim,
        mult=b.comult.T,
        unit=b.counit.T,
        comult=b.mult.T,
        counit=b.unit.T,
        name=f"{b.name}*",
    )


_BUILDERS: dict[str, Callable[..., Bialgebra]] = {
    "cyclic-group": lambda field, n=2: cyclic_group(int(n), field),
    "group-algebra": lambda field, table, name="k[G]": group_algebra(table, field, name),
    "monoid-algebra": lambda field, table, name="k[S]": monoid_algebra(table, field, name),
    "sweedler": lambda field: sweedler(field),
}


def catalog(name: str, field: FieldSpec, params: Optional[Mapping[str, Any]] = None) -> Bialgebra:
    """
    Build a catalog bialgebra.

    ``dual-of`` takes ``{"of": {"catalog": ..., "params": {...}}}``.
    """
    params = dict(params or {})
    if name == "dual-of":
        inner = params.get("of")
        if not isinstance(inner, Mapping) or "catalog" not in inner:
            raise PreconditionError('dual-of needs {"of": {"catalog": ..., "params": ...}}')
        result = dual_of(catalog(inner["catalog"], field, inner.get("params")))
    elif name in _BUILDERS:
        try:
            result = _BUILDERS[name](field, **params)
        except TypeError as exc:
            raise PreconditionError(f"bad parameters for catalog entry {name}: {exc}") from exc
    else:
        raise PreconditionError(f"unknown catalog entry {name!r}")

    violations = verify_bialgebra(result)
    if violations:
        raise AssertionFailure(f"catalog entry {name} fails {len(violations)} bialgebra axiom instances")
    logger.debug("catalog built {} (dim {}) over {}", result.name, result.dim, field.label)
    return result
