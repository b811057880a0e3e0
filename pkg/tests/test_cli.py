import contextlib
import io

import pytest

from conftest import FIXTURES, GOLDEN
from golden_cases import CASES, EXIT
from kkwreath.cli import main, parse_command, run
from kkwreath.errors import UsageError
from kkwreath.report import Report, emit_report


def render(argv):
    buf = io.TextIOWrapper(io.BytesIO(), write_through=True)
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return buf.buffer.getvalue(), code


@pytest.fixture(autouse=True)
def in_fixtures(monkeypatch):
    monkeypatch.chdir(FIXTURES)


def test_parse_examples():
    cmd = parse_command(["split", "--group", "g.txt", "--h", "1,2"])
    assert cmd.verb == "split" and cmd.options["h"] == "1,2"
    cmd = parse_command(["embed", "--group", "g.txt", "--normal", "3"])
    assert cmd.verb == "embed" and cmd.options["mod"] is None
    assert cmd.options["seed"] == 0 and cmd.options["format"] == "text"


def test_unknown_verb_names_token():
    with pytest.raises(UsageError) as exc:
        parse_command(["frobnicate"])
    assert exc.value.token == "frobnicate"


def test_unknown_option_rejected():
    with pytest.raises(UsageError) as exc:
        parse_command(["embed", "--group", "g.txt", "--normal", "1", "--bogus", "2"])
    assert "--bogus" in str(exc.value)


def test_missing_required_option():
    with pytest.raises(UsageError):
        parse_command(["split", "--group", "g.txt"])


def test_exit_codes(capsys):
    assert main(["prop1", "--group", "s3.txt", "--normal", "(0 1 2)"]) == 0
    assert main(["split", "--group", "q8.txt", "--h", "(0 1 3 6)(2 5 7 4)"]) == 1
    assert main(["embed", "--group", "missing.txt", "--normal", "1"]) == 2
    assert main(["embed", "--group", "broken.txt", "--normal", "1"]) == 2
    assert main(["frobnicate"]) == 2
    err = capsys.readouterr().err
    assert "frobnicate" in err and "missing.txt" in err


def test_hypothesis_failure_is_an_assertion():
    rep, code = run(parse_command(["split", "--group", "q8.txt", "--h", "(0 1 3 6)(2 5 7 4)"]))
    assert code == 1
    names = {a.name: a for a in rep.assertions}
    assert not names["HypothesisFailed"].passed
    assert "normalizer" in names["HypothesisFailed"].witness


def test_planted_failure_carries_witness():
    rep, code = run(parse_command(["prop1", "--group", "s3.txt", "--normal", "(0 1 2)", "--mod", "(0 1 2)"]))
    assert code == 1
    (a,) = rep.assertions
    assert a.name == "CoreNotTrivial" and "order 3" in a.witness
    out = emit_report(rep, "machine").decode()
    assert "assertion CoreNotTrivial fail C contains a normal subgroup of G of order 3" in out


def test_emit_header_only_and_single_line():
    r = Report("kk test", "00")
    text = emit_report(r, "machine").decode().splitlines()
    assert text == ["command kk test", "inputs sha256:00"]
    r.check("ok", True)
    lines = emit_report(r, "machine").decode().splitlines()
    assert [ln for ln in lines if ln.startswith("assertion")] == ["assertion ok pass -"]


def test_out_file(tmp_path):
    out = tmp_path / "r.txt"
    data, code = render(["magnus", "dij", "0", "0", "--out", str(out)])
    assert code == 0 and out.read_bytes() == data
    # the output path is not part of the echoed command
    assert b"--out" not in data


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_reports(name):
    first, code = render(CASES[name])
    second, code2 = render(CASES[name])
    assert first == second
    assert code == code2 == EXIT.get(name, 0)
    assert first == (GOLDEN / f"{name}.txt").read_bytes()


def test_digest_tracks_file_contents(tmp_path, monkeypatch):
    src = (FIXTURES / "s3.txt").read_text()
    (tmp_path / "s3.txt").write_text(src)
    monkeypatch.chdir(tmp_path)
    a, _ = render(["prop1", "--group", "s3.txt", "--normal", "(0 1 2)"])
    (tmp_path / "s3.txt").write_text(src + "# edited\n")
    b, _ = render(["prop1", "--group", "s3.txt", "--normal", "(0 1 2)"])
    assert a.splitlines()[1] != b.splitlines()[1]
    assert a.splitlines()[2:] == b.splitlines()[2:]
