from __future__ import annotations

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from builders import build_mixed_fixture, engineered_pair, write_admissions, write_csv, write_text, write_wfdb_record
from croissant_local import __version__
from croissant_local.cli import main
from croissant_local.model import serialize_jsonld

DEMO_ARGS = [
    "--name", "MIMIC-IV Demo Dataset",
    "--description", "Demo subset of MIMIC-IV.",
    "--license", "PhysioNet Restricted Health Data License 1.5.0",
    "--citation", "Johnson et al., 2023",
    "--creator", "Alistair Johnson",
    "--creator", "Lucas Bulgarelli",
    "--creator", "Tom Pollard",
    "--dataset-version", "2.2",
    "--date-published", "2023-01-06",
    "--url", "https://physionet.org/content/mimic-iv-demo/2.2/",
    "--rai-data-use-cases", "Clinical research and ML model development",
    "--rai-data-limitations", "Demo subset; not for clinical decisions",
    "--rai-personal-sensitive-information", "De-identified per HIPAA Safe Harbor",
]


@pytest.fixture
def demo(tmp_path: Path) -> Path:
    root = tmp_path / "mimic-iv-demo"
    write_admissions(root)
    write_csv(root / "hosp" / "patients.csv", [("subject_id", "gender"), ("10000032", "F")])
    return root


def _bake(root: Path, out: Path, *extra: str) -> int:
    return main(["--input", str(root), "--output", str(out), *DEMO_ARGS, *extra])


def test_flag_form_invocation(demo: Path, tmp_path: Path, capsys):
    out = tmp_path / "mimic-iv-demo.json"
    assert _bake(demo, out) == 0
    obj = json.loads(out.read_text())
    assert obj["name"] == "MIMIC-IV Demo Dataset"
    assert [c["name"] for c in obj["creator"]] == ["Alistair Johnson", "Lucas Bulgarelli", "Tom Pollard"]
    assert obj["version"] == "2.2" and obj["datePublished"] == "2023-01-06"
    assert obj["rai:dataUseCases"] == "Clinical research and ML model development"
    assert obj["rai:personalSensitiveInformation"] == "De-identified per HIPAA Safe Harbor"
    assert "http://mlcommons.org/croissant/RAI/1.0" in obj["conformsTo"]
    err = capsys.readouterr().err
    assert "2 FileObjects" in err and "2 RecordSets" in err
    assert not (tmp_path / "mimic-iv-demo.json.tmp").exists()


def test_subcommand_form_equals_flag_form(demo: Path, tmp_path: Path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _bake(demo, a) == 0
    assert main(["-v", "bake", "-i", str(demo), "-o", str(b), *DEMO_ARGS]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_stdout_output(demo: Path, capsysbinary):
    assert main(["bake", "-i", str(demo), "-o", "-", "--name", "x", "-q"]) == 0
    captured = capsysbinary.readouterr()
    assert json.loads(captured.out)["name"] == "x"
    assert b"warning" not in captured.err


def test_rai_pass_through_flag(demo: Path, tmp_path: Path):
    out = tmp_path / "o.json"
    assert main(["-i", str(demo), "-o", str(out), "--name", "x", "--rai", "dataCollection=Surveys, 2020"]) == 0
    assert json.loads(out.read_text())["rai:dataCollection"] == "Surveys, 2020"
    assert main(["-i", str(demo), "-o", str(out), "--name", "x", "--rai", "novalue"]) == 2


def test_usage_errors(demo: Path, tmp_path: Path, capsys):
    out = tmp_path / "o.json"
    assert main(["-i", str(demo), "-o", str(out)]) == 2
    assert "--name is required" in capsys.readouterr().err
    assert not out.exists()
    assert main(["-i", str(tmp_path / "missing"), "-o", str(out), "--name", "x"]) == 2
    assert main(["-i", str(demo), "-o", str(out), "--name", "x", "--date-published", "yesterday"]) == 2
    assert main(["bake", "--bogus"]) == 2
    assert main([]) == 2


def test_no_supported_files(tmp_path: Path, capsys):
    root = tmp_path / "d"
    write_text(root / "a.xyz", "?")
    out = tmp_path / "o.json"
    assert main(["-i", str(root), "-o", str(out), "--name", "x"]) == 3
    assert "no supported files found" in capsys.readouterr().err
    assert not out.exists()


def test_unwritable_output(demo: Path, tmp_path: Path):
    assert main(["-i", str(demo), "-o", str(tmp_path / "no" / "such" / "dir.json"), "--name", "x"]) == 4


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_field_mappings_flag(demo: Path, tmp_path: Path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"admissions::subject_id": {"equivalentProperty": "https://example.org/person_id"},
                             "ghost::x": {"equivalentProperty": []}}))
    out = tmp_path / "o.json"
    assert main(["-i", str(demo), "-o", str(out), "--name", "x", "--field-mappings", str(m)]) == 0
    fields = json.loads(out.read_text())["recordSet"][0]["field"]
    assert fields[0]["equivalentProperty"] == ["https://example.org/person_id"]
    assert "ghost::x" in capsys.readouterr().err


# --- compare / verify / diff ------------------------------------------------------


def _write_doc(path: Path, doc) -> Path:
    path.write_bytes(serialize_jsonld(doc))
    return path


def test_compare_self_and_engineered(demo: Path, tmp_path: Path, capsys):
    out = tmp_path / "d.json"
    _bake(demo, out)
    capsys.readouterr()
    assert main(["compare", str(out), str(out)]) == 0
    text = capsys.readouterr().out
    assert "R_field\t1.0000" in text and "T_sem\t1.0000" in text

    gen, ref = engineered_pair(819, 21)
    g, r = _write_doc(tmp_path / "g.json", gen), _write_doc(tmp_path / "r.json", ref)
    assert main(["compare", str(g), str(r), "--json-report", str(tmp_path / "rep.json")]) == 0
    text = capsys.readouterr().out
    assert "T_sem\t0.9744\t(798/819)" in text
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["semantic_matches"] == 798 and len(rep["disagreements"]) == 21


def test_compare_names_missing_field(tmp_path: Path, capsys):
    from builders import metric_document

    g = _write_doc(tmp_path / "g.json", metric_document([("t", "a", "sc:Text")]))
    r = _write_doc(tmp_path / "r.json", metric_document([("t", "a", "sc:Text"), ("t", "b", "sc:Text")]))
    assert main(["compare", str(g), str(r), "--json-report", "-"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["field_recovery"] == 0.5 and rep["missing_fields"] == [["t", "b"]]


def test_compare_unparseable(tmp_path: Path):
    bad = write_text(tmp_path / "bad.json", "{")
    assert main(["compare", str(bad), str(bad)]) == 2
    assert main(["compare", str(tmp_path / "none.json"), str(bad)]) == 4


def test_verify_cycle(tmp_path: Path, capsys):
    root = tmp_path / "d"
    write_wfdb_record(root, "100")
    write_wfdb_record(root, "101")
    doc = tmp_path / "doc.json"
    assert main(["-i", str(root), "-o", str(doc), "--name", "w"]) == 0
    assert main(["verify", str(doc), str(root)]) == 0
    (root / "101.dat").rename(root / "101x.dat")
    capsys.readouterr()
    assert main(["verify", str(doc), str(root), "--json-report", str(tmp_path / "v.json")]) == 1
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1 and "schema-drift" in out[0] and "101" in out[0]
    assert json.loads((tmp_path / "v.json").read_text())["violations"][0]["rule"] == "schema-drift"


def test_verify_removed_file(tmp_path: Path, capsys):
    root = build_mixed_fixture(tmp_path / "d")
    doc = tmp_path / "doc.json"
    main(["-i", str(root), "-o", str(doc), "--name", "m", "-q"])
    (root / "hosp" / "patients.tsv").unlink()
    capsys.readouterr()
    assert main(["verify", str(doc), str(root)]) == 1
    assert capsys.readouterr().out.startswith("missing-file")


def test_diff_exit_codes(tmp_path: Path, capsys):
    from builders import metric_document

    a = _write_doc(tmp_path / "a.json", metric_document([("person", "id", "cr:Int64"), ("visit", "id", "cr:Int64")]))
    b = _write_doc(tmp_path / "b.json", metric_document([("person", "id", "cr:Int64")]))
    c = _write_doc(tmp_path / "c.json", metric_document([("person", "id", "cr:Float64"), ("visit", "id", "cr:Int64")]))
    assert main(["diff", str(a), str(a)]) == 0
    assert capsys.readouterr().out == ""
    assert main(["diff", str(a), str(b)]) == 1
    assert capsys.readouterr().out.splitlines() == ["- recordset\tvisit"]
    assert main(["diff", str(a), str(c)]) == 1
    assert capsys.readouterr().out.splitlines() == ["~ field\tperson\tid\tcr:Int64 -> cr:Float64"]
    assert main(["diff", str(a), str(tmp_path / "nope.json")]) == 4


@pytest.mark.skipif(shutil.which("croissant-local") is None, reason="console script not installed")
def test_console_script(demo: Path, tmp_path: Path):
    out = tmp_path / "o.json"
    proc = subprocess.run(["croissant-local", "--input", str(demo), "--output", str(out), "--name", "x"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout == ""
    proc = subprocess.run([sys.executable, "-m", "croissant_local", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
