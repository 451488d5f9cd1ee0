"""Turn input documents into engine objects and back."""

import json
from dataclasses import dataclass, field as dataclass_field, replace
from typing import Any, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from app.core.exceptions import (
    DimensionMismatchError,
    InputParseError,
    InvalidFieldError,
    PreconditionError,
)
from app.core.field import FieldSpec
from app.models.v1 import BialgebraBlockV1, InputDocumentV1, ModuleBlockV1, Verdict
from app.services.bialgebra import AntipodeKind, Bialgebra, solve_antipode, verify_bialgebra
from app.services.catalog import catalog
from app.services.structures import (
    ActionTensor,
    CoactionTensor,
    ModuleClass,
    Side,
    StructuredModule,
    character_module,
    check_module,
    free_hopf_bimodule,
    free_hopf_module,
    regular_module,
    trivial_yd,
)


def parse_input(text: str) -> InputDocumentV1:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputParseError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        return InputDocumentV1.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        if first["loc"] and first["loc"][0] == "field":
            raise InvalidFieldError(f"{location}: {first['msg']}") from exc
        raise InputParseError(f"{location}: {first['msg']}") from exc


def _index(value: Any, bound: int, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputParseError(f"{what} index {value!r} is not an integer")
    if not 0 <= value < bound:
        raise DimensionMismatchError(f"{what} index {value} outside dimension {bound}")
    return value


def _outer(table: Sequence[Any], size: int, what: str) -> None:
    if len(table) != size:
        raise DimensionMismatchError(f"{what} has {len(table)} entries, expected {size}")


def _pairs(entries: Sequence[Sequence[Any]], width: int, what: str) -> Sequence[Sequence[Any]]:
    for entry in entries:
        if len(entry) != width:
            raise InputParseError(f"{what} entry {entry!r} should have {width} items")
    return entries


def load_bialgebra(block: BialgebraBlockV1, field: FieldSpec) -> Bialgebra:
    if block.catalog is not None:
        b = catalog(block.catalog, field, block.params)
        return b if block.name is None else replace(b, name=block.name)

    missing = [key for key in ("dim", "mult", "comult", "unit", "counit") if getattr(block, key) is None]
    if missing:
        raise InputParseError(f"bialgebra block lacks {', '.join(missing)}")
    d = block.dim
    if d < 1:
        raise DimensionMismatchError("bialgebra dimension must be positive")
    _outer(block.mult, d, "mult")
    _outer(block.comult, d, "comult")
    mult = {}
    for a, row in enumerate(block.mult):
        _outer(row, d, f"mult[{a}]")
        for b_, terms in enumerate(row):
            mult[(a, b_)] = {_index(c, d, "mult"): field.coerce(v) for c, v in _pairs(terms, 2, "mult")}
    comult = {}
    for a, terms in enumerate(block.comult):
        comult[a] = {(_index(x, d, "comult"), _index(y, d, "comult")): field.coerce(v)
                     for x, y, v in _pairs(terms, 3, "comult")}
    unit = {_index(i, d, "unit"): field.coerce(v) for i, v in _pairs(block.unit, 2, "unit")}
    counit = {_index(i, d, "counit"): field.coerce(v) for i, v in _pairs(block.counit, 2, "counit")}
    return Bialgebra.from_tables(field, d, mult, comult, unit, counit, name=block.name or "bialgebra")


def _action_tensor(field: FieldSpec, side: Side, table: Sequence[Any], d: int, k: int, what: str) -> ActionTensor:
    entries: dict[tuple[int, int], dict[int, Any]] = {}
    outer, inner = (d, k) if side is Side.LEFT else (k, d)
    _outer(table, outer, what)
    for x, row in enumerate(table):
        _outer(row, inner, f"{what}[{x}]")
        for y, terms in enumerate(row):
            a, u = (x, y) if side is Side.LEFT else (y, x)
            entries[(a, u)] = {_index(t, k, what): field.coerce(v) for t, v in _pairs(terms, 2, what)}
    return ActionTensor.from_table(field, side, d, k, entries)


def _coaction_tensor(field: FieldSpec, side: Side, table: Sequence[Any], d: int, k: int,
                     what: str) -> CoactionTensor:
    _outer(table, k, what)
    entries = {}
    for u, terms in enumerate(table):
        triples = []
        for first, second, v in _pairs(terms, 3, what):
            # [u0, a, c] for the right coaction, [a, u0, c] for the left one
            u0, a = (first, second) if side is Side.RIGHT else (second, first)
            triples.append((_index(u0, k, what), _index(a, d, what), field.coerce(v)))
        entries[u] = triples
    return CoactionTensor.from_table(field, side, d, k, entries)


def _catalog_module(block: ModuleBlockV1, b: Bialgebra) -> StructuredModule:
    params = block.params
    try:
        if block.catalog == "trivial":
            module = trivial_yd(b)
        elif block.catalog == "regular":
            module = regular_module(b)
        elif block.catalog == "free":
            module = free_hopf_module(int(params.get("dim_v", 1)), b)
        elif block.catalog == "free-bimodule":
            module = free_hopf_bimodule(int(params.get("dim_v", 1)), b)
        else:
            chi = [b.field.coerce(v) for v in params["chi"]]
            module = character_module(b, chi, int(params.get("grade", 0)), name=block.name)
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"bad parameters for module catalog entry {block.catalog}: {exc}") from exc
    return module.renamed(block.name)


def load_module(block: ModuleBlockV1, b: Bialgebra) -> StructuredModule:
    if block.catalog is not None:
        return _catalog_module(block, b)
    if block.dim is None or block.dim < 1:
        raise DimensionMismatchError(f"module {block.name} needs a positive dim")
    F, d, k = b.field, b.dim, block.dim
    what = f"module {block.name}"
    return StructuredModule(
        F,
        k,
        action=None if block.action is None else _action_tensor(F, Side.LEFT, block.action, d, k, f"{what} action"),
        right_action=None if block.right_action is None else _action_tensor(
            F, Side.RIGHT, block.right_action, d, k, f"{what} right_action"),
        coaction=None if block.coaction is None else _coaction_tensor(
            F, Side.RIGHT, block.coaction, d, k, f"{what} coaction"),
        left_coaction=None if block.left_coaction is None else _coaction_tensor(
            F, Side.LEFT, block.left_coaction, d, k, f"{what} left_coaction"),
        module_class=ModuleClass(block.module_class),
        name=block.name,
    )


@dataclass
class LoadedDocument:
    document: InputDocumentV1
    field: FieldSpec
    bialgebra: Bialgebra
    modules: dict[str, StructuredModule]
    diagnostics: list[Verdict] = dataclass_field(default_factory=list)

    def module(self, name: Optional[str], fallback: int = 0) -> StructuredModule:
        if name is None:
            if len(self.modules) <= fallback:
                raise PreconditionError("the task needs more module blocks than the document provides")
            return list(self.modules.values())[fallback]
        if name not in self.modules:
            raise PreconditionError(f"no module named {name!r}")
        return self.modules[name]


def load_document(doc: InputDocumentV1) -> LoadedDocument:
    """Build every object of the document and run the axiom checks eagerly."""
    field = doc.field
    b = load_bialgebra(doc.bialgebra, field)
    diagnostics = [Verdict(name=f"{b.name} is a bialgebra", passed=True)]
    violations = verify_bialgebra(b)
    if violations:
        diagnostics[0] = Verdict(name=f"{b.name} is a bialgebra", passed=False,
                                 detail=f"{len(violations)} axiom instances fail", defects=violations[:10])
    else:
        for kind in AntipodeKind:
            found = solve_antipode(b, kind) is not None
            diagnostics.append(Verdict(name=f"{b.name} has a {kind.value}", passed=found, asserted=False))

    modules: dict[str, StructuredModule] = {}
    for block in doc.modules:
        if block.name in modules:
            raise PreconditionError(f"duplicate module name {block.name!r}")
        module = load_module(block, b)
        modules[block.name] = module
        if not violations:
            defects = check_module(b, module)
            diagnostics.append(Verdict(name=f"{module.name} is a {module.module_class.value} module",
                                       passed=not defects, detail=f"{len(defects)} defects" if defects else "",
                                       defects=defects[:10]))
    for verdict in diagnostics:
        if verdict.asserted and not verdict.passed:
            logger.warning("diagnostic failed: {} ({})", verdict.name, verdict.detail)
    return LoadedDocument(doc, field, b, modules, diagnostics)


# Emission

def field_to_dict(field: FieldSpec) -> dict[str, Any]:
    return {"type": "rational"} if field.is_rational else {"type": "prime", "p": field.characteristic}


def bialgebra_to_block(b: Bialgebra) -> dict[str, Any]:
    F, d = b.field, b.dim
    products = b.mult.columns()
    coproducts = b.comult.columns()
    block = BialgebraBlockV1(
        name=b.name,
        dim=d,
        mult=[[[[c, F.render(v)] for c, v in sorted(products[a * d + x].items())] for x in range(d)]
              for a in range(d)],
        comult=[[[*divmod(r, d), F.render(v)] for r, v in sorted(coproducts[a].items())] for a in range(d)],
        unit=[[i, F.render(v)] for i, v in sorted(b.unit.column(0).items())],
        counit=[[i, F.render(v)] for i, v in enumerate(b.counit_values) if v],
    )
    return block.model_dump(exclude_none=True, exclude_defaults=True)


def _action_table(t: ActionTensor, F: FieldSpec) -> list:
    d, k = t.algebra_dim, t.module_dim
    outer, inner = (d, k) if t.side is Side.LEFT else (k, d)
    table = []
    for x in range(outer):
        row = []
        for y in range(inner):
            a, u = (x, y) if t.side is Side.LEFT else (y, x)
            row.append([[w, F.render(v)] for w, v in sorted(t.act(a, u).items())])
        table.append(row)
    return table


def _coaction_table(t: CoactionTensor, F: FieldSpec) -> list:
    return [
        [[u0, a, F.render(v)] if t.side is Side.RIGHT else [a, u0, F.render(v)] for u0, a, v in t.coact(u)]
        for u in range(t.module_dim)
    ]


def module_to_block(m: StructuredModule) -> dict[str, Any]:
    F = m.field
    block = ModuleBlockV1(
        name=m.name,
        module_class=m.module_class.value,
        dim=m.dim,
        action=None if m.action is None else _action_table(m.action, F),
        right_action=None if m.right_action is None else _action_table(m.right_action, F),
        coaction=None if m.coaction is None else _coaction_table(m.coaction, F),
        left_coaction=None if m.left_coaction is None else _coaction_table(m.left_coaction, F),
    )
    return block.model_dump(by_alias=True, exclude_none=True)


def document_to_dict(field: FieldSpec, b: Bialgebra, modules: Sequence[StructuredModule] = ()) -> dict[str, Any]:
    return {
        "field": field_to_dict(field),
        "bialgebra": bialgebra_to_block(b),
        "modules": [module_to_block(m) for m in modules],
    }
