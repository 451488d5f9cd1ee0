from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt

from app.core.field import FieldSpec

# Coefficients are written as strings ("-3", "2/7"); plain integers are accepted too.
Coefficient = Union[StrictInt, str]

ModuleClassName = Literal["plain", "yd", "hopf", "hopf-bimodule"]
TheoryName = Literal["yd", "hopf", "gs", "r", "l", "t"]
CommandName = Literal["check", "cohomology", "homotopy-verify", "vanishing", "ext-compare", "catalog-emit"]


# Input document

class BialgebraBlockV1(BaseModel):
    """
    Either a catalog reference (``catalog`` + ``params``) or explicit structure constants.

    ``mult[a][b]`` lists ``[c, coeff]``, ``comult[a]`` lists ``[b, c, coeff]``,
    ``unit`` and ``counit`` list ``[index, coeff]``.
    """

    name: Optional[str] = None
    catalog: Optional[Literal["cyclic-group", "group-algebra", "monoid-algebra", "sweedler", "dual-of"]] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    dim: Optional[int] = None
    mult: Optional[List[List[List[List[Coefficient]]]]] = None
    comult: Optional[List[List[List[Coefficient]]]] = None
    unit: Optional[List[List[Coefficient]]] = None
    counit: Optional[List[List[Coefficient]]] = None


class ModuleBlockV1(BaseModel):
    """
    A module over the document's bialgebra.

    ``action[a][u]`` lists ``[u', coeff]``; ``right_action[u][a]`` lists
    ``[u', coeff]``; ``coaction[u]`` lists ``[u0, a, coeff]`` (right coaction);
    ``left_coaction[u]`` lists ``[a, u0, coeff]``.
    """

    model_config = ConfigDict(populate_by_name=True)

    name: str
    module_class: ModuleClassName = Field("plain", alias="class")
    catalog: Optional[Literal["trivial", "regular", "free", "free-bimodule", "character"]] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    dim: Optional[int] = None
    action: Optional[List[List[List[List[Coefficient]]]]] = None
    right_action: Optional[List[List[List[List[Coefficient]]]]] = None
    coaction: Optional[List[List[List[Coefficient]]]] = None
    left_coaction: Optional[List[List[List[Coefficient]]]] = None


class TaskBlockV1(BaseModel):
    command: CommandName = "check"
    theory: TheoryName = "yd"
    qmax: Optional[int] = None
    nmax: Optional[int] = None
    source: Optional[str] = None  # module name playing M
    target: Optional[str] = None  # module name playing N
    dim_v: int = 1
    dim_w: int = 1


class InputDocumentV1(BaseModel):
    field: FieldSpec = Field(default_factory=FieldSpec.rationals)
    bialgebra: BialgebraBlockV1
    modules: List[ModuleBlockV1] = Field(default_factory=list)
    task: TaskBlockV1 = Field(default_factory=TaskBlockV1)


# Reports

class DefectEntry(BaseModel):
    condition: str
    witness: List[int]
    vector: Dict[str, str]  # nonzero coordinates of LHS - RHS


class Verdict(BaseModel):
    name: str
    passed: bool
    asserted: bool = True  # failures of non-asserted verdicts are evidence, not errors
    detail: str = ""
    defects: List[DefectEntry] = Field(default_factory=list)


class IdentityCheck(BaseModel):
    family: Literal["b", "c", "mixed", "dm2", "dc2", "commute"]
    n: int
    p: int
    i: Optional[int] = None
    j: Optional[int] = None
    passed: bool


class IdentityReport(BaseModel):
    checks: List[IdentityCheck] = Field(default_factory=list)

    @property
    def failures(self) -> List[IdentityCheck]:
        return [c for c in self.checks if not c.passed]

    @property
    def all_passed(self) -> bool:
        return not self.failures


class DegreeRow(BaseModel):
    degree: int
    dimension: int
    kernel: int
    rank_in: int
    rank_out: int
    cohomology: int


class CohomologyReport(BaseModel):
    theory: str
    qmax: int
    bidegree_dims: Dict[str, int] = Field(default_factory=dict)  # "n,p" -> dim
    rows: List[DegreeRow] = Field(default_factory=list)
    identities: Optional[IdentityReport] = None

    def dims(self) -> List[int]:
        return [row.cohomology for row in self.rows]

    def dim(self, degree: int) -> int:
        for row in self.rows:
            if row.degree == degree:
                return row.cohomology
        raise KeyError(degree)


class ComparisonRow(BaseModel):
    degree: int
    h: int
    ext: int
    agree: bool
    asserted: bool


class DimensionTable(BaseModel):
    title: str
    headers: List[str]
    rows: List[List[str]]


class ReportV1(BaseModel):
    tool: str
    version: str
    command: CommandName
    field: str
    bialgebra: str
    conventions: Dict[str, str] = Field(default_factory=dict)
    verdicts: List[Verdict] = Field(default_factory=list)
    tables: List[DimensionTable] = Field(default_factory=list)
    cohomology: List[CohomologyReport] = Field(default_factory=list)
    comparison: List[ComparisonRow] = Field(default_factory=list)
    emitted: Optional[Dict[str, Any]] = None
    runtimes: Dict[str, float] = Field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(v.asserted and not v.passed for v in self.verdicts)
