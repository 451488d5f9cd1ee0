"""Task dispatch: one handler per command, each filling in a :class:`ReportV1`."""

import time
from typing import Awaitable, Callable, Optional

from loguru import logger

from app.api.dependencies import LoadedDocument, document_to_dict, load_document
from app.config import get_settings
from app.constants import conventions
from app.core.exceptions import PreconditionError
from app.core.linalg import entry_budget_limit
from app.models.v1 import (
    CohomologyReport,
    DimensionTable,
    IdentityReport,
    InputDocumentV1,
    ReportV1,
    TaskBlockV1,
    Verdict,
)
from app.services.base import total_cohomology, verify_bicomplex_identities
from app.services.double import compare_h_ext
from app.services.gerstenhaber_schack import gs_agreement, gs_bicomplex
from app.services.hopf import (
    HopfBicomplexBuilder,
    homotopy_sweep,
    hopf_vanishing_check,
    hopf_vanishing_general,
    restricted_bicomplex,
)
from app.services.structures import StructuredModule, morphism_space
from app.services.yetter_drinfeld import YDBicomplexBuilder, z1_b1_explicit

Handler = Callable[[LoadedDocument, TaskBlockV1, ReportV1], Awaitable[None]]


def cohomology_table(report: CohomologyReport, title: str) -> DimensionTable:
    return DimensionTable(
        title=title,
        headers=["n", "dim Tot", "ker D", "im D in", "dim H"],
        rows=[[str(r.degree), str(r.dimension), str(r.kernel), str(r.rank_in), str(r.cohomology)]
              for r in report.rows],
    )


def identity_verdict(label: str, identities: IdentityReport) -> Verdict:
    failures = identities.failures
    detail = f"{len(identities.checks)} identities"
    if failures:
        shown = ", ".join(f"{c.family}({c.n},{c.p};{c.i},{c.j})" for c in failures[:8])
        detail += f", {len(failures)} fail: {shown}"
    return Verdict(name=f"{label} identities", passed=not failures, detail=detail)


def _pair(loaded: LoadedDocument, task: TaskBlockV1) -> tuple[StructuredModule, StructuredModule]:
    source = loaded.module(task.source, 0)
    target = loaded.module(task.target, 1 if len(loaded.modules) > 1 else 0)
    return source, target


def _qmax(task: TaskBlockV1) -> int:
    qmax = task.qmax if task.qmax is not None else get_settings().default_qmax
    if qmax < 1:
        raise PreconditionError("qmax must be at least 1")
    return qmax


async def handle_check(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    """The eager diagnostics are the whole report."""
    logger.info("check: {} diagnostics", len(loaded.diagnostics))


async def handle_cohomology(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    b, qmax, theory = loaded.bialgebra, _qmax(task), task.theory
    if theory == "gs":
        bicomplex = gs_bicomplex(b, qmax)
        identities = verify_bicomplex_identities(bicomplex)
        result = total_cohomology(bicomplex, identities)
        report.verdicts.append(identity_verdict("gs bicomplex", identities))
        report.verdicts += gs_agreement(b, qmax, bicomplex)
    elif theory in ("yd", "hopf"):
        m, n = _pair(loaded, task)
        builder_cls = YDBicomplexBuilder if theory == "yd" else HopfBicomplexBuilder
        bicomplex = builder_cls(b, m, n).build(qmax)
        identities = verify_bicomplex_identities(bicomplex)
        result = total_cohomology(bicomplex, identities)
        report.verdicts.append(identity_verdict(f"{theory} bicomplex", identities))
        morphisms = morphism_space(b, m, n, ("action", "coaction")).dim
        report.verdicts.append(Verdict(name="H^0 equals the morphism space", passed=result.dim(0) == morphisms,
                                       detail=f"H^0 {result.dim(0)}, morphisms {morphisms}"))
        if qmax >= 2:
            degree_one = z1_b1_explicit(b, m, n, theory)
            report.verdicts.append(Verdict(
                name="H^1 equals dim Z^1 - dim B^1", passed=degree_one.h1 == result.dim(1),
                detail=f"Z^1 {degree_one.z1.dim}, B^1 {degree_one.b1.dim}, H^1 {result.dim(1)}"))
    else:
        m, n = _pair(loaded, task)
        restricted = restricted_bicomplex(b, m, n, theory, qmax)
        identities = verify_bicomplex_identities(restricted.bicomplex, faces=False)
        result = restricted.report.model_copy(update={"identities": identities})
        report.verdicts += restricted.closure
        report.verdicts.append(identity_verdict(f"restricted {theory} bicomplex", identities))
    report.cohomology.append(result)
    report.tables.append(cohomology_table(result, f"{theory} cohomology"))


async def handle_homotopy(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    report.verdicts += homotopy_sweep(loaded.bialgebra, task.dim_v, task.dim_w, _qmax(task))


async def handle_vanishing(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    b, qmax = loaded.bialgebra, _qmax(task)
    if loaded.modules:
        m, n = _pair(loaded, task)
        result = hopf_vanishing_general(b, m, n, qmax)
        title = f"vanishing for ({m.name}, {n.name})"
    else:
        result = hopf_vanishing_check(b, task.dim_v, task.dim_w, qmax)
        title = f"vanishing for V{task.dim_v}⊗A, W{task.dim_w}⊗A"
    report.verdicts += result.verdicts
    report.cohomology.append(result.report)
    report.tables.append(cohomology_table(result.report, title))
    if result.column:
        report.tables.append(DimensionTable(title="column path", headers=["n", "dim H"],
                                            rows=[[str(k), str(v)] for k, v in enumerate(result.column)]))


async def handle_ext(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    nmax = task.nmax if task.nmax is not None else get_settings().default_nmax
    m, n = _pair(loaded, task)
    comparison = await compare_h_ext(loaded.bialgebra, m, n, nmax)
    report.comparison = comparison.rows
    report.verdicts += comparison.verdicts
    report.tables.append(DimensionTable(
        title=f"H vs Ext over the double for ({m.name}, {n.name})",
        headers=["n", "dim H", "dim Ext", "agree", "asserted"],
        rows=[[str(r.degree), str(r.h), str(r.ext), "yes" if r.agree else "no", "yes" if r.asserted else "no"]
              for r in comparison.rows],
    ))


async def handle_emit(loaded: LoadedDocument, task: TaskBlockV1, report: ReportV1) -> None:
    report.emitted = document_to_dict(loaded.field, loaded.bialgebra, list(loaded.modules.values()))


HANDLERS: dict[str, Handler] = {
    "check": handle_check,
    "cohomology": handle_cohomology,
    "homotopy-verify": handle_homotopy,
    "vanishing": handle_vanishing,
    "ext-compare": handle_ext,
    "catalog-emit": handle_emit,
}


async def run_task(doc: InputDocumentV1, budget: Optional[int] = None) -> ReportV1:
    """
    Load the document, run its task and collect every verdict.

    Engine errors propagate to the caller, which maps them to exit codes.
    """
    settings = get_settings()
    with entry_budget_limit(budget if budget is not None else settings.entry_budget):
        started = time.perf_counter()
        loaded = load_document(doc)
        loaded_at = time.perf_counter()
        task = doc.task
        report = ReportV1(
            tool=settings.app_name,
            version=settings.app_version,
            command=task.command,
            field=loaded.field.label,
            bialgebra=loaded.bialgebra.name,
            conventions=conventions(),
            verdicts=list(loaded.diagnostics),
        )
        if task.command != "check" and report.failed:
            logger.error("input fails its axiom checks; skipping {}", task.command)
        else:
            logger.info("running {} on {}", task.command, loaded.bialgebra.name)
            await HANDLERS[task.command](loaded, task, report)
        finished = time.perf_counter()
    report.runtimes = {"load": round(loaded_at - started, 4), task.command: round(finished - loaded_at, 4)}
    return report
