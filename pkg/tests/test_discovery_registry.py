from __future__ import annotations

import gzip
import hashlib
import json
import os
from pathlib import Path

import pytest

from builders import observation, write_csv, write_ndjson, write_text, write_wfdb_record
from croissant_local.discovery import discover_files, hash_file
from croissant_local.errors import ConfigurationError, NoSupportedFilesError, UsageError
from croissant_local.extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from croissant_local.handlers import record_set_name
from croissant_local.registry import (
    HandlerDescriptor,
    HandlerRegistry,
    default_registry,
    extract_structure,
    run_pipeline,
)

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_hash_empty_file(tmp_path: Path):
    p = tmp_path / "empty"
    p.write_bytes(b"")
    assert hash_file(p) == (EMPTY_SHA256, 0)
    assert hashlib.sha256(b"").hexdigest() == EMPTY_SHA256


def test_hash_compressed_bytes_not_content(tmp_path: Path):
    raw = b"a,b\n1,2\n" * 1000
    p = tmp_path / "t.csv.gz"
    p.write_bytes(gzip.compress(raw, mtime=0))
    digest, size = hash_file(p)
    assert digest == hashlib.sha256(p.read_bytes()).hexdigest()
    assert digest != hashlib.sha256(raw).hexdigest()
    assert size == p.stat().st_size
    assert hash_file(p) == (digest, size)


def test_hash_streams_large_file_in_chunks(tmp_path: Path):
    p = tmp_path / "big.bin"
    blob = os.urandom(3 * 1024 * 1024 + 17)
    p.write_bytes(blob)
    assert hash_file(p, chunk_size=4096)[0] == hashlib.sha256(blob).hexdigest()


def test_discovery_sorted_relative_nested_hidden(tmp_path: Path):
    write_text(tmp_path / "a" / "b" / "c.csv", "x\n")
    write_text(tmp_path / ".hidden", "h")
    write_text(tmp_path / "Z.txt", "z")
    write_text(tmp_path / "a" / "a.txt", "a")
    files = discover_files(tmp_path)
    paths = [f.relative_path for f in files]
    assert paths == sorted(paths)
    assert "a/b/c.csv" in paths and ".hidden" in paths
    for f in files:
        assert f.byte_size == (tmp_path / f.relative_path).stat().st_size
        assert f.sha256 == hashlib.sha256((tmp_path / f.relative_path).read_bytes()).hexdigest()


def test_discovery_empty_and_missing_root(tmp_path: Path):
    assert discover_files(tmp_path) == []
    with pytest.raises(UsageError):
        discover_files(tmp_path / "nope")


def test_symlinks_outside_root_skipped(tmp_path: Path):
    root = tmp_path / "root"
    outside = tmp_path / "outside"
    write_text(outside / "secret.csv", "a\n1\n")
    write_text(root / "in.csv", "a\n1\n")
    (root / "link_out.csv").symlink_to(outside / "secret.csv")
    (root / "link_in.csv").symlink_to(root / "in.csv")
    (root / "loop").symlink_to(root)
    warnings: list[str] = []
    paths = [f.relative_path for f in discover_files(root, warnings)]
    assert "link_out.csv" not in paths
    assert "link_in.csv" in paths and "in.csv" in paths
    assert any("link_out.csv" in w for w in warnings)


def test_unreadable_file_is_a_warning(tmp_path: Path, monkeypatch):
    import croissant_local.discovery as discovery

    write_text(tmp_path / "x.csv", "a\n")
    write_text(tmp_path / "y.csv", "a\n")
    real = discovery.hash_file

    def flaky(path, *a, **k):
        if Path(path).name == "x.csv":
            raise PermissionError(13, "Permission denied")
        return real(path, *a, **k)

    monkeypatch.setattr(discovery, "hash_file", flaky)
    warnings: list[str] = []
    assert [f.relative_path for f in discover_files(tmp_path, warnings, workers=1)] == ["y.csv"]
    assert warnings == ["skipped unreadable file x.csv: Permission denied"]


@pytest.mark.parametrize(
    "name, expected",
    [("admissions.csv.gz", "admissions"), ("a.b.tsv", "a.b"), ("bold.nii.gz", "bold"),
     ("x.parquet", "x"), ("noext", "noext")],
)
def test_record_set_name(name, expected):
    assert record_set_name(name) == expected


def test_builtin_order():
    names = [h.name for h in default_registry().handlers]
    assert names == ["fhir", "json", "tabular", "parquet", "wfdb", "image", "dicom", "nifti"]


def test_duplicate_registration_is_configuration_error():
    reg = default_registry()
    with pytest.raises(ConfigurationError):
        reg.register(HandlerDescriptor("json", (".json",), lambda f, c: ExtractionResult()))


def test_empty_registry_matches_nothing(tmp_path: Path):
    write_csv(tmp_path / "a.csv", [("a",), ("1",)])
    f = discover_files(tmp_path)[0]
    assert HandlerRegistry().dispatch(f, b"") is None


def test_sniffing_routes_fhir_and_plain_json(tmp_path: Path):
    write_ndjson(tmp_path / "Patient.ndjson", [{"resourceType": "Patient", "id": "1"}])
    write_text(tmp_path / "plain.json", json.dumps([{"a": 1}]))
    write_ndjson(tmp_path / "events.ndjson", [{"kind": "x"}])
    write_text(tmp_path / "bundle.json", json.dumps({"id": "b", "resourceType": "Bundle", "entry": []}))
    write_text(tmp_path / "README.txt", "hi")
    reg = default_registry()
    from croissant_local.fileio import read_prefix

    routes = {f.relative_path: reg.dispatch(f, read_prefix(f.absolute_path, 8192, f.name)) for f in discover_files(tmp_path)}
    assert routes == {"Patient.ndjson": "fhir", "plain.json": "json", "events.ndjson": "json",
                      "bundle.json": "fhir", "README.txt": None}


def test_priority_then_registration_order(tmp_path: Path):
    write_text(tmp_path / "a.json", "{}")
    f = discover_files(tmp_path)[0]
    noop = lambda files, ctx: ExtractionResult()  # noqa: E731
    reg = HandlerRegistry()
    reg.register(HandlerDescriptor("first", (".json",), noop))
    reg.register(HandlerDescriptor("second", (".json",), noop))
    assert reg.dispatch(f, b"{}") == "first"
    reg.register(HandlerDescriptor("urgent", (".json",), noop, priority=5))
    assert reg.dispatch(f, b"{}") == "urgent"
    reg.register(HandlerDescriptor("picky", (".json",), noop, sniff=lambda p, f: False, priority=9))
    assert reg.dispatch(f, b"{}") == "urgent"


def test_new_handler_extends_pipeline(tmp_path: Path, semantic):
    (tmp_path / "t.arrow").write_bytes(b"ARROW1\x00\x00")
    with pytest.raises(NoSupportedFilesError):
        run_pipeline(tmp_path, semantic)

    def extract_arrow(files, ctx):
        out = ExtractionResult()
        for f in files:
            out.file_objects.append(FileRef(f.relative_path, "application/vnd.apache.arrow.file"))
            out.record_sets.append(RecordSetDraft(record_set_name(f.name, (".arrow",)),
                                                  (FieldDraft("payload", "sc:Text", f.relative_path),),
                                                  f.relative_path))
        return out

    reg = default_registry()
    reg.register(HandlerDescriptor("arrow", (".arrow",), extract_arrow, lambda p, f: p.startswith(b"ARROW1")))
    doc = run_pipeline(tmp_path, semantic, registry=reg).document
    assert [r.name for r in doc.record_sets] == ["t"]


def test_unsupported_directory_fails_cleanly(tmp_path: Path, semantic):
    write_text(tmp_path / "a.xyz", "?")
    with pytest.raises(NoSupportedFilesError, match="no supported files found"):
        run_pipeline(tmp_path, semantic)


def test_control_files_unmatched_with_warning(tmp_path: Path, semantic):
    write_csv(tmp_path / "a.csv", [("a",), ("1",)])
    write_text(tmp_path / "_SUCCESS", "")
    write_text(tmp_path / "SHA256SUMS.txt", "abc  a.csv\n")
    result = run_pipeline(tmp_path, semantic)
    assert len(result.document.file_objects) == 1
    assert sum("no handler" in w for w in result.warnings) == 2


def test_wfdb_components_not_double_processed(tmp_path: Path):
    write_wfdb_record(tmp_path, "100")
    write_wfdb_record(tmp_path, "101")
    _, results, _, _ = extract_structure(tmp_path)
    claimed = [p for r in results for p in r.consumed_paths]
    assert len(claimed) == len(set(claimed)) == 6


def test_ndjson_chunks_route_together(tmp_path: Path, semantic):
    write_ndjson(tmp_path / "Observation.000.ndjson", [observation(0)])
    write_ndjson(tmp_path / "Observation.001.ndjson", [observation(1)])
    doc = run_pipeline(tmp_path, semantic).document
    assert [r.name for r in doc.record_sets] == ["Observation"]
