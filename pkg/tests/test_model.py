from __future__ import annotations

import hashlib
import json
from dataclasses import replace
from pathlib import Path

import pytest

from builders import write_admissions, write_csv, write_wfdb_record
from croissant_local import vocab
from croissant_local.errors import InvariantError, UsageError
from croissant_local.extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from croissant_local.discovery import discover_files
from croissant_local.model import (
    CroissantDocument,
    FieldDesc,
    RaiMetadata,
    SemanticMetadata,
    Source,
    assign_identifiers,
    covering_globs,
    from_jsonld,
    glob_match,
    merge_semantic,
    sanitize_id,
    serialize_jsonld,
    to_jsonld,
    validate_document,
)
from croissant_local.registry import run_pipeline

EXPECTED_CONTEXT = {
    "@language": "en",
    "@vocab": "https://schema.org/",
    "cr": "http://mlcommons.org/croissant/",
    "rai": "http://mlcommons.org/croissant/RAI/",
    "sc": "https://schema.org/",
}


def test_vocabulary_round_trip():
    assert len(vocab.DATA_TYPES) == 20
    expanded = {vocab.expand_type(t) for t in vocab.DATA_TYPES}
    assert len(expanded) == 20
    for tag in vocab.DATA_TYPES:
        assert vocab.compact_type(vocab.expand_type(tag)) == tag
    assert vocab.expand_type("sc:Integer") == "https://schema.org/Integer"
    assert vocab.expand_type("cr:Int64") == "http://mlcommons.org/croissant/Int64"
    assert vocab.compact_type("http://schema.org/Integer") == "sc:Integer"


def test_context_constant():
    assert vocab.CONTEXT == EXPECTED_CONTEXT


def test_id_sequence_matches_sorted_position(tmp_path: Path, semantic):
    # 13 files sort before hosp/admissions.csv.gz, making it the 14th
    for i in range(13):
        write_csv(tmp_path / "a" / f"t{i:02d}.csv", [("x",), ("1",)])
    write_admissions(tmp_path)
    doc = run_pipeline(tmp_path, semantic).document
    rs = doc.record_set("admissions")
    fo = next(f for f in doc.file_objects if f.content_url == "hosp/admissions.csv.gz")
    assert fo.id == "file_13"
    assert rs.id == "recordset_13"
    assert rs.fields[0].id == "file_13_subject_id"


def test_single_file_ids(tmp_path: Path, semantic):
    write_csv(tmp_path / "only.csv", [("a",), ("1",)])
    doc = run_pipeline(tmp_path, semantic).document
    assert [f.id for f in doc.file_objects] == ["file_0"]
    assert [r.id for r in doc.record_sets] == ["recordset_0"]


def test_field_ids_are_sanitized(tmp_path: Path, semantic):
    write_csv(tmp_path / "t.csv", [("a b", "c/d", "é"), ("1", "2", "3")])
    doc = run_pipeline(tmp_path, semantic).document
    assert [f.id for f in doc.record_sets[0].fields] == ["file_0_a_b", "file_0_c_d", "file_0__"]
    assert sanitize_id("x.y-z") == "x_y_z"


def test_duplicate_record_set_names_get_parent_prefix(tmp_path: Path, semantic):
    write_csv(tmp_path / "site_a" / "labs.csv", [("a",), ("1",)])
    write_csv(tmp_path / "site_b" / "labs.csv", [("a",), ("1",)])
    doc = run_pipeline(tmp_path, semantic).document
    assert sorted(r.name for r in doc.record_sets) == ["site_a/labs", "site_b/labs"]


def test_assign_identifiers_rejects_double_claims(tmp_path: Path):
    write_csv(tmp_path / "a.csv", [("a",), ("1",)])
    files = discover_files(tmp_path)
    r = ExtractionResult(file_objects=[FileRef("a.csv", "text/csv")])
    with pytest.raises(InvariantError):
        assign_identifiers([r, r], files)
    with pytest.raises(InvariantError):
        assign_identifiers([r], list(files) + list(files))


def test_merge_semantic_and_conforms_to():
    skeleton = CroissantDocument()
    with pytest.raises(UsageError):
        merge_semantic(skeleton, SemanticMetadata())
    doc = merge_semantic(skeleton, SemanticMetadata(name="x", creators=("Alistair Johnson", "Lucas Bulgarelli")))
    assert doc.conforms_to == ("http://mlcommons.org/croissant/1.1",)
    out = to_jsonld(doc)
    assert out["creator"] == [
        {"@type": "sc:Person", "name": "Alistair Johnson"},
        {"@type": "sc:Person", "name": "Lucas Bulgarelli"},
    ]
    doc = merge_semantic(skeleton, SemanticMetadata(name="x", rai=RaiMetadata(data_use_cases="research")))
    assert doc.conforms_to == ("http://mlcommons.org/croissant/1.1", "http://mlcommons.org/croissant/RAI/1.0")
    assert to_jsonld(doc)["rai:dataUseCases"] == "research"
    with pytest.raises(UsageError):
        merge_semantic(skeleton, SemanticMetadata(name="x", date_published="06/01/2023"))


def test_rai_pass_through_is_verbatim():
    rai = RaiMetadata(extra=(("dataCollection", "  Surveys, 2020 "), ("rai:dataBiases", "none known")))
    out = to_jsonld(merge_semantic(CroissantDocument(), SemanticMetadata(name="x", rai=rai)))
    assert out["rai:dataCollection"] == "  Surveys, 2020 "
    assert out["rai:dataBiases"] == "none known"


def test_minimal_document_serializes_and_validates():
    doc = merge_semantic(CroissantDocument(), SemanticMetadata(name="empty"))
    assert validate_document(doc) == []
    data = serialize_jsonld(doc)
    obj = json.loads(data)
    assert obj["@context"] == EXPECTED_CONTEXT
    assert obj["name"] == "empty"
    assert data.endswith(b"\n")


def test_serialize_parse_serialize_is_byte_identical(tmp_path: Path, semantic):
    write_admissions(tmp_path)
    write_wfdb_record(tmp_path / "w", "100")
    data = run_pipeline(tmp_path, semantic).jsonld
    again = json.dumps(json.loads(data), indent=2, ensure_ascii=False).encode("utf-8") + b"\n"
    assert again == data
    assert serialize_jsonld(from_jsonld(json.loads(data))) == data


def test_traceability_no_semantic_keys_beyond_name(tmp_path: Path, semantic):
    write_admissions(tmp_path)
    obj = json.loads(run_pipeline(tmp_path, semantic).jsonld)
    assert set(obj) == {"@context", "@type", "conformsTo", "name", "distribution", "recordSet"}


def test_file_object_key_order_and_shape(tmp_path: Path, semantic):
    path = write_admissions(tmp_path)
    obj = json.loads(run_pipeline(tmp_path, semantic).jsonld)
    fo = obj["distribution"][0]
    assert list(fo) == ["@type", "@id", "name", "contentSize", "contentUrl", "encodingFormat", "sha256"]
    assert fo["contentUrl"] == "hosp/admissions.csv.gz"
    assert fo["encodingFormat"] == "application/gzip"
    assert fo["contentSize"] == str(path.stat().st_size)
    assert fo["sha256"] == hashlib.sha256(path.read_bytes()).hexdigest()


def _doc_with_field(data_type: str = "sc:Text", ref: str = "file_0") -> CroissantDocument:
    from croissant_local.model import FileObjectDesc, RecordSetDesc

    fo = FileObjectDesc("file_0", "a.csv", "a.csv", "3", "text/csv", "0" * 64)
    f = FieldDesc("file_0_a", "a", data_type, Source(ref, "fileObject", "column", "a"))
    return merge_semantic(CroissantDocument(distribution=(fo,), record_sets=(RecordSetDesc("recordset_0", "a", (f,)),)),
                          SemanticMetadata(name="x"))


def test_validator_flags_dangling_reference():
    v = validate_document(_doc_with_field(ref="file_9"))
    assert [x.rule for x in v] == ["dangling-reference"]
    assert v[0].id == "file_0_a"


def test_validator_flags_unknown_type_and_accepts_all_vocabulary():
    v = validate_document(_doc_with_field("sc:Banana"))
    assert [x.rule for x in v] == ["unknown-data-type"]
    for tag in vocab.DATA_TYPES:
        assert validate_document(_doc_with_field(tag)) == []


def test_validator_other_rules():
    doc = _doc_with_field()
    fo = doc.distribution[0]
    bad = replace(doc, distribution=(replace(fo, content_url="../a.csv", sha256="ABC", content_size="-1"),))
    rules = sorted(v.rule for v in validate_document(bad))
    assert rules == ["bad-content-size", "bad-content-url", "bad-sha256"]
    dup = replace(doc, record_sets=(replace(doc.record_sets[0], fields=doc.record_sets[0].fields * 2),))
    assert {v.rule for v in validate_document(dup)} == {"duplicate-field-name", "duplicate-id"}
    ctx = replace(doc, context={**EXPECTED_CONTEXT, "extra": "x"})
    assert [v.rule for v in validate_document(ctx)] == ["context"]
    noname = replace(doc, semantic=SemanticMetadata())
    assert [v.rule for v in validate_document(noname)] == ["missing-name"]


def test_glob_helpers():
    assert glob_match("a/*.ndjson", "a/x.ndjson")
    assert not glob_match("a/*.ndjson", "a/b/x.ndjson")
    assert glob_match("**/*.json", "a/b/x.json")
    universe = ["d/0.parquet", "d/1.parquet", "d/x.csv", "e/2.parquet"]
    assert covering_globs(["d/0.parquet", "d/1.parquet"], universe) == ("d/*.parquet",)
    assert covering_globs(["d/0.parquet"], universe + ["d/9.parquet"]) == ("d/0.parquet",)


def test_from_jsonld_tolerates_third_party_spellings():
    obj = {
        "@context": EXPECTED_CONTEXT,
        "name": "ref",
        "distribution": [{"@type": "http://mlcommons.org/croissant/FileSet", "@id": "fs", "includes": "*.csv"}],
        "recordSet": [{
            "@type": "cr:RecordSet", "name": "t",
            "field": [{"name": "a", "dataType": ["https://schema.org/Integer"],
                       "subField": [{"name": "b", "dataType": "http://schema.org/Float"}]}],
        }],
    }
    doc = from_jsonld(obj)
    names = [(f.name, f.data_type) for f in doc.record_sets[0].fields]
    assert ("a.b", "sc:Float") in names
    assert doc.file_sets[0].includes == ("*.csv",)
