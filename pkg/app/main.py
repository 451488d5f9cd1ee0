import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from loguru import logger

from app.api.dependencies import parse_input
from app.api.routes import run_task
from app.config import get_settings
from app.core.exceptions import CohomologyError, PreconditionError
from app.models.v1 import InputDocumentV1, ReportV1

COMMANDS = ("check", "cohomology", "homotopy-verify", "vanishing", "ext-compare", "catalog-emit")
THEORIES = ("yd", "hopf", "gs", "r", "l", "t")


def configure_logging() -> None:
    settings = get_settings()
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if settings.debug else settings.log_level.upper(),
               format="{time:HH:mm:ss} | {level: <7} | {name}:{function} - {message}")


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="defcoh", description=f"{settings.app_name} {settings.app_version}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("input", nargs="?", type=Path, help="input document (JSON)")
        cmd.add_argument("--catalog", help="catalog bialgebra to use instead of an input document")
        cmd.add_argument("--order", type=int, default=2, help="order of the cyclic-group catalog entry")
        cmd.add_argument("--prime", type=int, help="work over F_p instead of the rationals")
        cmd.add_argument("--qmax", type=int)
        cmd.add_argument("--nmax", type=int)
        cmd.add_argument("--theory", choices=THEORIES)
        cmd.add_argument("--source", help="module playing M")
        cmd.add_argument("--target", help="module playing N")
        cmd.add_argument("--dim-v", type=int)
        cmd.add_argument("--dim-w", type=int)
        cmd.add_argument("--budget", type=int, help="entry budget for a single matrix")
        cmd.add_argument("--json", type=Path, help="write the JSON report to this path")
    return parser


def load_document(args: argparse.Namespace) -> InputDocumentV1:
    if args.input is not None:
        doc = parse_input(args.input.read_text())
    elif args.catalog:
        raw = {
            "field": {"type": "prime", "p": args.prime} if args.prime else {"type": "rational"},
            "bialgebra": {"catalog": args.catalog, "params": {"n": args.order} if args.catalog == "cyclic-group" else {}},
        }
        doc = parse_input(json.dumps(raw))
    else:
        raise PreconditionError("an input document or --catalog is required")
    overrides = {"command": args.command}
    for key in ("qmax", "nmax", "theory", "source", "target", "dim_v", "dim_w"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return doc.model_copy(update={"task": doc.task.model_copy(update=overrides)})


def render_text(report: ReportV1) -> str:
    lines = [f"{report.tool} {report.version}: {report.command} on {report.bialgebra} over {report.field}"]
    for key, value in report.conventions.items():
        lines.append(f"  {key}: {value}")
    for table in report.tables:
        lines.append("")
        lines.append(table.title)
        widths = [max(len(str(cell)) for cell in column) for column in zip(table.headers, *table.rows)]
        lines.append("  ".join(h.rjust(w) for h, w in zip(table.headers, widths)))
        for row in table.rows:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))
    lines.append("")
    for verdict in report.verdicts:
        status = "pass" if verdict.passed else ("FAIL" if verdict.asserted else "differ")
        suffix = f" ({verdict.detail})" if verdict.detail else ""
        lines.append(f"[{status}] {verdict.name}{suffix}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        doc = load_document(args)
        report = asyncio.run(run_task(doc, budget=args.budget))
    except CohomologyError as exc:
        logger.error("{}: {}", type(exc).__name__, exc.detail)
        print(f"error: {exc.detail}", file=sys.stderr)
        if args.json is not None:
            args.json.write_text(json.dumps(exc.to_dict(), indent=2, ensure_ascii=False))
        return exc.exit_code
    except OSError as exc:
        logger.error("cannot read input: {}", exc)
        return 2
    except Exception:
        logger.exception("unexpected failure")
        return 1

    if report.emitted is not None and args.json is None:
        print(json.dumps(report.emitted, indent=2, ensure_ascii=False))
    else:
        print(render_text(report))
    if args.json is not None:
        args.json.write_text(report.model_dump_json(indent=2))
        logger.info("report written to {}", args.json)
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
