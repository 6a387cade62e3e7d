from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from builders import (
    build_mixed_fixture,
    engineered_pair,
    metric_document,
    write_admissions,
    write_csv,
    write_meds,
    write_wfdb_record,
)
from croissant_local import vocab
from croissant_local.mappings import apply_field_mappings, load_field_mappings
from croissant_local.errors import UsageError
from croissant_local.metrics import (
    NumericFamily,
    compare_documents,
    format_ratio,
    normalize_type,
    schema_diff,
    verify_packaging,
)
from croissant_local.model import from_jsonld, to_jsonld
from croissant_local.registry import BakeOptions, run_pipeline


def test_normalization_spellings():
    a, b, c = (normalize_type(t) for t in ("sc:Integer", "https://schema.org/Integer", "http://schema.org/Integer"))
    assert a == b == c
    assert normalize_type("cr:Int64").numeric_family is NumericFamily.INTEGER
    assert normalize_type("http://mlcommons.org/croissant/Float32").numeric_family is NumericFamily.FLOAT
    assert normalize_type("sc:URL").numeric_family is NumericFamily.NONE
    odd = normalize_type("ex:Thing")
    assert odd.canonical == "ex:Thing" and odd.numeric_family is NumericFamily.NONE


def test_every_integer_and_float_width_is_in_family():
    for tag in vocab.DATA_TYPES:
        fam = normalize_type(tag).numeric_family
        if tag == "sc:Integer" or tag.startswith(("cr:Int", "cr:UInt")):
            assert fam is NumericFamily.INTEGER, tag
        elif tag == "sc:Float" or tag.startswith("cr:Float"):
            assert fam is NumericFamily.FLOAT, tag
        else:
            assert fam is NumericFamily.NONE, tag


@pytest.mark.parametrize(
    "matched, cross, same",
    [(819, 21, 0), (406, 0, 9), (406, 9, 0), (50, 3, 7)],
)
def test_engineered_ratios_are_exact(matched, cross, same):
    gen, ref = engineered_pair(matched, cross, same)
    r = compare_documents(gen, ref)
    assert r.field_recovery == 1.0
    assert Fraction(r.semantic_agreement).limit_denominator(10**6) == Fraction(matched - cross, matched)
    assert Fraction(r.strict_agreement).limit_denominator(10**6) == Fraction(matched - cross - same, matched)
    assert len(r.disagreements) == cross + same
    assert sum(not d.same_family for d in r.disagreements) == cross


def test_int_vs_float_and_url_vs_text_are_mismatches():
    gen = metric_document([("t", "a", "cr:Int64"), ("t", "b", "sc:URL")])
    ref = metric_document([("t", "a", "sc:Float"), ("t", "b", "sc:Text")])
    r = compare_documents(gen, ref)
    assert r.semantic_agreement == 0.0 and r.strict_agreement == 0.0


def test_matching_ignores_case_whitespace_and_order():
    gen = metric_document([("T2", "y", "sc:Text"), (" t1", "X ", "sc:Integer")])
    ref = metric_document([("t1", "x", "https://schema.org/Integer"), ("t2", "Y", "sc:Text")])
    r = compare_documents(gen, ref)
    assert (r.field_recovery, r.strict_agreement, r.recordset_recovery) == (1.0, 1.0, 1.0)


def test_missing_and_extra_fields():
    gen = metric_document([("t", "a", "sc:Text"), ("t", "z", "sc:Text")])
    ref = metric_document([("t", "a", "sc:Text"), ("t", "b", "sc:Text"), ("u", "c", "sc:Text")])
    r = compare_documents(gen, ref)
    assert r.field_recovery == pytest.approx(1 / 3)
    assert r.recordset_recovery == 0.5
    assert r.missing_fields == [("t", "b"), ("u", "c")]
    assert r.extra_fields == [("t", "z")]
    # unmatched generated fields do not enter any ratio
    assert r.strict_agreement == 1.0
    assert "missing from generated:" in r.render()


def test_empty_reference_gives_undefined_ratios():
    r = compare_documents(metric_document([("t", "a", "sc:Text")]), metric_document([]))
    assert r.field_recovery is None and r.strict_agreement is None and r.recordset_recovery is None
    assert format_ratio(None) == "n/a"
    assert "R_field\tn/a\t(0/0)" in r.render()
    json.dumps(r.to_dict())


def test_self_comparison_of_baked_document(tmp_path: Path, semantic):
    doc = run_pipeline(build_mixed_fixture(tmp_path), semantic).document
    r = compare_documents(doc, doc)
    assert (r.field_recovery, r.strict_agreement, r.semantic_agreement, r.recordset_recovery) == (1.0, 1.0, 1.0, 1.0)
    assert r.disagreements == []


def test_strict_never_exceeds_semantic_on_random_pairs():
    rng = random.Random(7)
    tags = list(vocab.DATA_TYPES)
    for _ in range(200):
        n = rng.randint(0, 30)
        gen = metric_document([("t", f"f{i}", rng.choice(tags)) for i in range(n)])
        ref = metric_document([("t", f"f{i}", rng.choice(tags)) for i in range(rng.randint(0, n))])
        r = compare_documents(gen, ref)
        if r.strict_agreement is not None:
            assert 0.0 <= r.strict_agreement <= r.semantic_agreement <= 1.0


def test_round_trip_through_third_party_spelling(tmp_path: Path, semantic):
    write_admissions(tmp_path)
    doc = run_pipeline(tmp_path, semantic).document
    obj = to_jsonld(doc)
    for rs in obj["recordSet"]:
        for f in rs["field"]:
            f["dataType"] = vocab.expand_type(f["dataType"])
    r = compare_documents(doc, from_jsonld(obj))
    assert r.strict_agreement == 1.0


# --- verify -------------------------------------------------------------------


def _baked(root: Path, semantic, options=None):
    return run_pipeline(root, semantic, options).document


def test_fresh_bake_verifies_clean(tmp_path: Path, semantic):
    build_mixed_fixture(tmp_path)
    assert verify_packaging(_baked(tmp_path, semantic), tmp_path) == []


def test_removed_file(tmp_path: Path, semantic):
    write_meds(tmp_path / "meds", n_files=3)
    doc = _baked(tmp_path, semantic)
    (tmp_path / "meds" / "1.parquet").unlink()
    v = verify_packaging(doc, tmp_path)
    assert [x.rule for x in v] == ["missing-file"]
    assert "meds/1.parquet" in v[0].message


def test_waveform_component_rename(tmp_path: Path, semantic):
    write_wfdb_record(tmp_path, "100")
    write_wfdb_record(tmp_path, "101")
    doc = _baked(tmp_path, semantic)
    (tmp_path / "100.dat").rename(tmp_path / "100_renamed.dat")
    v = verify_packaging(doc, tmp_path)
    assert [x.rule for x in v] == ["schema-drift"]
    assert v[0].id == "100"


def test_one_byte_corruption(tmp_path: Path, semantic):
    import hashlib

    write_admissions(tmp_path)
    write_csv(tmp_path / "other.csv", [("a",), ("1",)])
    doc = _baked(tmp_path, semantic)
    p = tmp_path / "other.csv"
    data = bytearray(p.read_bytes())
    data[-2] ^= 0x01
    p.write_bytes(bytes(data))
    v = verify_packaging(doc, tmp_path)
    assert [x.rule for x in v] == ["checksum-mismatch"]
    assert hashlib.sha256(bytes(data)).hexdigest() in v[0].message


def test_column_rename_is_schema_drift(tmp_path: Path, semantic):
    write_csv(tmp_path / "labs.csv", [("subject_id", "value"), ("1", "2.5")])
    doc = _baked(tmp_path, semantic)
    write_csv(tmp_path / "labs.csv", [("subject_id", "valuenum"), ("1", "2.5")])
    v = verify_packaging(doc, tmp_path)
    assert [x.rule for x in v] == ["schema-drift"]
    assert "value" in v[0].message and "valuenum" in v[0].message


def test_size_change_reported_once(tmp_path: Path, semantic):
    write_csv(tmp_path / "t.csv", [("a",), ("1",)])
    doc = _baked(tmp_path, semantic)
    write_csv(tmp_path / "t.csv", [("a",), ("1",), ("2",)])
    assert [x.rule for x in verify_packaging(doc, tmp_path)] == ["size-mismatch"]


def test_structurally_invalid_document(tmp_path: Path, semantic):
    write_csv(tmp_path / "t.csv", [("a",), ("1",)])
    obj = to_jsonld(_baked(tmp_path, semantic))
    obj["recordSet"][0]["field"][0]["dataType"] = "sc:Banana"
    assert [v.rule for v in verify_packaging(from_jsonld(obj), tmp_path)] == ["unknown-data-type"]


def test_grouped_partitions_verify_with_same_options(tmp_path: Path, semantic):
    write_meds(tmp_path / "d", n_files=3)
    opts = BakeOptions(group_partitions=True)
    doc = _baked(tmp_path, semantic, opts)
    assert verify_packaging(doc, tmp_path, opts) == []


# --- diff -----------------------------------------------------------------------


def test_diff_cases():
    a = metric_document([("person", "id", "cr:Int64"), ("visit", "id", "cr:Int64"), ("visit", "x", "sc:Text")])
    assert schema_diff(a, a).is_empty
    missing = metric_document([("person", "id", "cr:Int64")])
    d = schema_diff(a, missing)
    assert d.only_in_a == ["visit"] and d.only_in_b == [] and d.field_changes == []
    assert d.lines() == ["- recordset\tvisit"]
    changed = metric_document([("person", "id", "cr:Float64"), ("visit", "id", "cr:Int64"), ("visit", "x", "sc:Text")])
    d = schema_diff(a, changed)
    assert d.lines() == ["~ field\tperson\tid\tcr:Int64 -> cr:Float64"]
    renamed = metric_document([("person", "id", "cr:Int64"), ("visit", "id", "cr:Int64"), ("visit", "y", "sc:Text")])
    assert schema_diff(a, renamed).lines() == ["- field\tvisit\tx\tsc:Text", "+ field\tvisit\ty\tsc:Text"]


def test_diff_ignores_type_spelling():
    a = metric_document([("t", "a", "sc:Integer")])
    b = metric_document([("t", "a", "http://schema.org/Integer")])
    assert schema_diff(a, b).is_empty


# --- field mappings ---------------------------------------------------------------


def test_field_mappings_by_id_and_name(tmp_path: Path, semantic):
    write_admissions(tmp_path)
    mapping = {
        "file_0_subject_id": {"equivalentProperty": ["https://w3id.org/omop#person_id"]},
        "admissions::admittime": {"extraDataTypes": "https://w3id.org/meds#time"},
        "nope": {"equivalentProperty": []},
    }
    path = tmp_path.parent / "map.json"
    path.write_text(json.dumps(mapping))
    doc = run_pipeline(tmp_path, semantic, BakeOptions(field_mappings=load_field_mappings(path))).document
    rs = doc.record_set("admissions")
    out = to_jsonld(doc)["recordSet"][0]["field"]
    by_name = {f["name"]: f for f in out}
    assert by_name["subject_id"]["equivalentProperty"] == ["https://w3id.org/omop#person_id"]
    assert by_name["admittime"]["dataType"] == ["sc:DateTime", "https://w3id.org/meds#time"]
    assert rs.fields[1].equivalent_property == ()
    _, warnings = apply_field_mappings(doc, mapping)
    assert warnings == ["field mapping 'nope' matches no field"]


def test_bad_mapping_file(tmp_path: Path):
    p = tmp_path / "m.json"
    p.write_text("[1, 2]")
    with pytest.raises(UsageError):
        load_field_mappings(p)
    with pytest.raises(UsageError):
        apply_field_mappings(metric_document([]), {"x": {"equivalentProperty": [3]}})
