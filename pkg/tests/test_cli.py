"""Command line behaviour: exit codes, banner, file handling, diagnostics."""

from pathlib import Path

import pytest

from helpers import jsp_tokens, load

from xml2jsp.cli import SUCCESS_BANNER, run


@pytest.fixture
def sample(tmp_path):
    path = tmp_path / "sample.xml"
    path.write_text(load("fig6_input.xml"), encoding="utf-8")
    return path


def test_successful_translation(sample, capsys):
    code = run([str(sample)])
    captured = capsys.readouterr()
    assert code == 0
    assert SUCCESS_BANNER in captured.out
    output = sample.with_suffix(".jsp")
    assert output.is_file()
    assert jsp_tokens(output.read_text()) == jsp_tokens(load("fig8_expected.jsp"))


def test_default_output_name_swaps_extension(sample):
    run([str(sample)])
    assert (sample.parent / "sample.jsp").is_file()


def test_explicit_output_path(sample, tmp_path):
    out = tmp_path / "custom.jsp"
    assert run([str(sample), "-o", str(out)]) == 0
    assert out.is_file()


def test_missing_input_exits_2(tmp_path, capsys):
    assert run([str(tmp_path / "missing.xml")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_usage_error_exits_2(capsys):
    assert run([]) == 2


def test_validation_error_exits_1_and_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.xml"
    bad.write_text("<root><declare><var>a=1</var><var>a=2</var></declare></root>")
    code = run([str(bad)])
    captured = capsys.readouterr()
    assert code == 1
    assert SUCCESS_BANNER not in captured.out
    assert not (tmp_path / "bad.jsp").exists()
    lines = [l for l in captured.err.splitlines() if ": error " in l]
    assert len(lines) == 1
    assert "RepeatedDecl" in lines[0]


def test_diagnostic_line_format(tmp_path, capsys):
    bad = tmp_path / "bad.xml"
    bad.write_text("<root><writev> 9abc </writev></root>")
    run([str(bad)])
    err = capsys.readouterr().err
    first = err.splitlines()[0]
    # <file>:<line>:<col>: <severity> <code>: <message>
    assert first.startswith(f"{bad}:1:7: error PatternMismatch:")


def test_check_mode_writes_no_files(sample, capsys):
    code = run([str(sample), "--check"])
    captured = capsys.readouterr()
    assert code == 0
    assert SUCCESS_BANNER in captured.out
    assert not sample.with_suffix(".jsp").exists()


def test_check_mode_reports_codegen_errors(tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_text('<root><ps><query> st="q" </query></ps></root>')
    assert run([str(bad), "--check"]) == 1
    assert not (tmp_path / "bad.jsp").exists()


def test_check_suppresses_xsd_export(sample, tmp_path):
    xsd = tmp_path / "dialect.xsd"
    assert run([str(sample), "--check", "--emit-xsd", str(xsd)]) == 0
    assert not xsd.exists()


def test_emit_xsd(sample, tmp_path):
    xsd = tmp_path / "dialect.xsd"
    assert run([str(sample), "--emit-xsd", str(xsd)]) == 0
    assert xsd.is_file()
    assert "<xs:schema" in xsd.read_text()


def test_strict_mode_rejects_fig6(sample, capsys):
    assert run([str(sample), "--strict"]) == 1
    assert "UndeclaredVar" in capsys.readouterr().err


def test_input_file_never_modified(sample):
    before = sample.read_bytes()
    run([str(sample)])
    assert sample.read_bytes() == before


def test_runs_are_reproducible(sample):
    run([str(sample)])
    first = sample.with_suffix(".jsp").read_bytes()
    run([str(sample)])
    assert sample.with_suffix(".jsp").read_bytes() == first


def test_notes_do_not_fail_the_run(sample, capsys):
    assert run([str(sample)]) == 0
    err = capsys.readouterr().err
    assert "note ImplicitLoopVar" in err
    assert "note SetterKeywordMismatch" in err


def test_flags_change_output(sample):
    out = sample.with_suffix(".jsp")
    run([str(sample), "--emit-excep-msg", "--emit-imports", "--response-out"])
    text = out.read_text()
    assert text.startswith('<%@ page import="java.sql.*" %>')
    assert 'out.println("oops...error !!!");e.printStackTrace();' in text
    assert "System.out" not in text
