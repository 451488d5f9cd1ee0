import json

import pytest

from app.api.dependencies import load_document, parse_input
from app.api.routes import run_task
from app.core.exceptions import (
    BudgetExceededError,
    DimensionMismatchError,
    InputParseError,
    InvalidCoefficientError,
    InvalidFieldError,
)
from app.main import main

C2_TABLES = {
    "name": "C2 by hand",
    "dim": 2,
    "mult": [[[[0, 1]], [[1, 1]]], [[[1, 1]], [[0, 1]]]],
    "comult": [[[0, 0, 1]], [[1, 1, 1]]],
    "unit": [[0, 1]],
    "counit": [[0, 1], [1, 1]],
}


def document(**overrides):
    doc = {
        "field": {"type": "rational"},
        "bialgebra": {"catalog": "sweedler"},
        "modules": [{"name": "k", "catalog": "trivial"}],
        "task": {"command": "check"},
    }
    doc.update(overrides)
    return json.dumps(doc)


def test_malformed_json_reports_its_position():
    with pytest.raises(InputParseError) as info:
        parse_input('{"field": {"type": "rational"},\n "bialgebra": }')
    assert info.value.line == 2
    assert info.value.exit_code == 2


def test_field_must_be_prime():
    with pytest.raises(InvalidFieldError):
        parse_input(document(field={"type": "prime", "p": 4}))


def test_unknown_command_is_an_input_error():
    with pytest.raises(InputParseError) as info:
        parse_input(document(task={"command": "deform"}))
    # valid JSON: no position to report
    assert info.value.line is None
    assert "line" not in info.value.detail


def test_coefficients_must_exist_in_the_field():
    tables = dict(C2_TABLES, counit=[[0, "1/2"], [1, 1]])
    doc = parse_input(document(field={"type": "prime", "p": 2}, bialgebra=tables, modules=[]))
    with pytest.raises(InvalidCoefficientError):
        load_document(doc)


def test_indices_must_lie_inside_the_dimension():
    tables = dict(C2_TABLES, comult=[[[0, 5, 1]], [[1, 1, 1]]])
    with pytest.raises(DimensionMismatchError):
        load_document(parse_input(document(bialgebra=tables, modules=[])))


def test_explicit_tables_load():
    loaded = load_document(parse_input(document(bialgebra=C2_TABLES)))
    assert loaded.bialgebra.name == "C2 by hand"
    assert loaded.bialgebra.dim == 2
    assert all(v.passed for v in loaded.diagnostics)


async def test_check_flags_broken_axioms():
    tables = dict(C2_TABLES, counit=[[0, 1], [1, 2]])
    report = await run_task(parse_input(document(bialgebra=tables, modules=[])))
    assert report.failed
    assert report.verdicts[0].defects


async def test_failed_diagnostics_skip_the_computation():
    tables = dict(C2_TABLES, counit=[[0, 1], [1, 2]])
    report = await run_task(parse_input(document(bialgebra=tables, task={"command": "cohomology", "qmax": 2})))
    assert report.failed
    assert report.cohomology == []


async def test_cohomology_of_the_trivial_module():
    doc = parse_input(document(task={"command": "cohomology", "theory": "yd", "qmax": 2}))
    report = await run_task(doc)
    assert not report.failed, [v.name for v in report.verdicts if not v.passed]
    assert report.cohomology[0].dim(0) == 1
    assert report.conventions["total_complex_sign"]
    assert report.conventions["fundamental_inverse"]
    assert set(report.runtimes) == {"load", "cohomology"}


async def test_vanishing_on_free_modules():
    doc = parse_input(document(modules=[], task={"command": "vanishing", "qmax": 2, "dim_v": 1, "dim_w": 2}))
    report = await run_task(doc)
    assert not report.failed
    assert report.cohomology[0].dims() == [2, 0]


async def test_ext_compare_over_a_group_algebra():
    modules = [{"name": "k", "catalog": "trivial"},
               {"name": "k_g", "catalog": "character", "params": {"chi": [1, 1], "grade": 1}}]
    doc = parse_input(document(bialgebra={"catalog": "cyclic-group", "params": {"n": 2}}, modules=modules,
                               task={"command": "ext-compare", "nmax": 1}))
    report = await run_task(doc)
    assert not report.failed
    assert [(row.h, row.ext) for row in report.comparison] == [(0, 0), (0, 0)]


async def test_emitted_documents_load_back(sweedler_q):
    modules = [{"name": "k_sign", "catalog": "character", "params": {"chi": [1, -1, 0, 0], "grade": 1}}]
    report = await run_task(parse_input(document(modules=modules, task={"command": "catalog-emit"})))
    emitted = report.emitted
    assert emitted["modules"][0]["class"] == "yd"
    loaded = load_document(parse_input(json.dumps(emitted)))
    assert loaded.bialgebra.mult == sweedler_q.mult
    assert loaded.bialgebra.comult == sweedler_q.comult
    assert all(v.passed for v in loaded.diagnostics)


def test_main_succeeds_on_a_catalog_entry(capsys):
    assert main(["check", "--catalog", "sweedler"]) == 0
    assert "Sweedler is a bialgebra" in capsys.readouterr().out


def test_main_emits_json(capsys):
    assert main(["catalog-emit", "--catalog", "cyclic-group", "--order", "3"]) == 0
    emitted = json.loads(capsys.readouterr().out)
    assert emitted["bialgebra"]["dim"] == 3


def test_main_writes_the_report(tmp_path):
    path = tmp_path / "input.json"
    path.write_text(document(task={"command": "cohomology", "qmax": 2}))
    out = tmp_path / "report.json"
    assert main(["cohomology", str(path), "--json", str(out)]) == 0
    assert json.loads(out.read_text())["cohomology"][0]["rows"][0]["cohomology"] == 1


@pytest.mark.parametrize("argv", [
    ["check"],
    ["check", "--catalog", "sweedler", "--prime", "2"],
    ["check", "missing-input.json"],
])
def test_main_input_errors(argv):
    assert main(argv) == 2


def test_main_reports_failed_axioms(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(document(bialgebra=dict(C2_TABLES, counit=[[0, 1], [1, 2]]), modules=[]))
    assert main(["check", str(path)]) == 1


def test_main_budget():
    assert main(["cohomology", "--catalog", "sweedler", "--qmax", "2", "--budget", "10"]) == BudgetExceededError.exit_code


def test_main_writes_errors_as_json(tmp_path):
    out = tmp_path / "report.json"
    argv = ["cohomology", "--catalog", "sweedler", "--qmax", "2", "--budget", "10", "--json", str(out)]
    assert main(argv) == BudgetExceededError.exit_code
    written = json.loads(out.read_text())
    assert written["exit_code"] == BudgetExceededError.exit_code
    assert written["error"]
