"""Generic JSON / JSON Lines handler and FHIR-aware handling of NDJSON and Bundles.

Nested objects are expanded into ``.``-joined leaf paths. Arrays add no path
segment: arrays of objects recurse into their elements, arrays of scalars
are a repeated leaf.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, FileSetDraft, RecordSetDraft
from ..fileio import inner_suffix, media_type, open_binary
from ..fileio import read_prefix
from ..inference import EMPTY_STATE, TypeLatticeState, ValueClass, classify_json_value, join_types, resolve_column
from . import record_set_name

log = logging.getLogger(__name__)

EXTENSIONS = tuple(f"{ext}{comp}" for ext in (".json", ".jsonl", ".ndjson") for comp in ("", ".gz"))
LINE_SUFFIXES = (".jsonl", ".ndjson")


class JsonShape(enum.Enum):
    ARRAY_OF_OBJECTS = "array"
    SINGLE_OBJECT = "object"
    JSON_LINES = "lines"
    FHIR_NDJSON = "fhir-ndjson"
    FHIR_BUNDLE = "fhir-bundle"
    FHIR_SINGLE_RESOURCE = "fhir-resource"

    @property
    def is_fhir(self) -> bool:
        return self.name.startswith("FHIR")


class MalformedJson(ValueError):
    pass


# ---------------------------------------------------------------------------
# sniffing


def _scan_top_level_string(text: str, key: str) -> str | None:
    """Value of ``key`` in the outermost object of a possibly truncated JSON text.

    Only string values are returned; nested occurrences of the key are ignored.
    """
    depth = 0
    i, n = 0, len(text)
    expect_key = False
    while i < n:
        ch = text[i]
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            if j >= n:
                return None
            token = text[i + 1 : j]
            i = j + 1
            if depth == 1 and expect_key:
                k = i
                while k < n and text[k] in " \t\r\n":
                    k += 1
                if k < n and text[k] == ":":
                    if token == key:
                        k += 1
                        while k < n and text[k] in " \t\r\n":
                            k += 1
                        if k < n and text[k] == '"':
                            end = text.find('"', k + 1)
                            return text[k + 1 : end] if end != -1 else None
                        return None
                    expect_key = False
            continue
        if ch in "{[":
            depth += 1
            expect_key = ch == "{" and depth == 1
        elif ch in "}]":
            depth -= 1
            if depth <= 0:
                return None
        elif ch == "," and depth == 1:
            expect_key = True
        i += 1
    return None


def sniff_shape(prefix: bytes, filename: str) -> JsonShape:
    """Classify a JSON file from its first (decompressed) bytes."""
    text = prefix.decode("utf-8", "ignore").lstrip("﻿")
    stripped = text.lstrip()
    if inner_suffix(filename) in LINE_SUFFIXES:
        first_line = next((ln for ln in stripped.splitlines() if ln.strip()), "")
        if not first_line:
            return JsonShape.JSON_LINES
        try:
            record = json.loads(first_line)
        except json.JSONDecodeError:
            if first_line.lstrip().startswith("{") and _scan_top_level_string(first_line, "resourceType"):
                return JsonShape.FHIR_NDJSON
            if len(prefix) < 8192:
                raise MalformedJson("first JSON Lines record does not parse") from None
            return JsonShape.JSON_LINES
        if isinstance(record, dict) and isinstance(record.get("resourceType"), str):
            return JsonShape.FHIR_NDJSON
        return JsonShape.JSON_LINES
    if stripped.startswith("["):
        return JsonShape.ARRAY_OF_OBJECTS
    if stripped.startswith("{"):
        rtype = _scan_top_level_string(stripped, "resourceType")
        if rtype == "Bundle":
            return JsonShape.FHIR_BUNDLE
        if rtype:
            return JsonShape.FHIR_SINGLE_RESOURCE
        return JsonShape.SINGLE_OBJECT
    raise MalformedJson("content does not start with a JSON object or array")


def _safe_shape(prefix: bytes, file: DiscoveredFile) -> JsonShape | None:
    try:
        return sniff_shape(prefix, file.name)
    except MalformedJson:
        return None


def sniff_fhir(prefix: bytes, file: DiscoveredFile) -> bool:
    shape = _safe_shape(prefix, file)
    return shape is not None and shape.is_fhir


# ---------------------------------------------------------------------------
# nested expansion


Path = tuple[str, ...]


@dataclass
class SchemaAccumulator:
    """Union of leaf paths over many records, in first-seen order."""

    leaves: dict[Path, TypeLatticeState] = field(default_factory=dict)
    containers: set[Path] = field(default_factory=set)
    truncated: bool = False
    records: int = 0

    def add_leaf(self, path: Path, cls: ValueClass) -> None:
        self.leaves[path] = join_types(self.leaves.get(path, EMPTY_STATE), cls)

    def touch_leaf(self, path: Path) -> None:
        self.leaves.setdefault(path, EMPTY_STATE)

    def merge(self, other: SchemaAccumulator) -> None:
        for path, state in other.leaves.items():
            self.leaves[path] = self.leaves[path].merge(state) if path in self.leaves else state
        self.containers |= other.containers
        self.truncated |= other.truncated
        self.records += other.records

    def resolved(self) -> list[tuple[str, str]]:
        """``(dotted name, data type)`` per leaf; a path that is both a scalar and
        a container somewhere resolves to sc:Text."""
        out = []
        for path, state in self.leaves.items():
            name = ".".join(path) if path else "value"
            tag = "sc:Text" if path in self.containers else resolve_column(state)
            out.append((name, tag))
        return out


def expand_nested(
    record: Any,
    prefix: Path = (),
    acc: SchemaAccumulator | None = None,
    max_depth: int = 32,
) -> SchemaAccumulator:
    """Add the leaves of one JSON value to ``acc`` (a fresh accumulator if None)."""
    acc = acc if acc is not None else SchemaAccumulator()
    _expand(record, prefix, acc, max_depth)
    return acc


def _expand(value: Any, path: Path, acc: SchemaAccumulator, max_depth: int) -> None:
    if isinstance(value, dict):
        if len(path) >= max_depth:
            acc.truncated = True
            acc.add_leaf(path, ValueClass.TEXT)
            return
        if path:
            acc.containers.add(path)
        for key, child in value.items():
            _expand(child, path + (str(key),), acc, max_depth)
    elif isinstance(value, list):
        if not value:
            acc.touch_leaf(path)
        for item in value:
            _expand(item, path, acc, max_depth)
    else:
        acc.add_leaf(path, classify_json_value(value))


def leaf_paths(record: Any, max_depth: int = 32) -> dict[str, str]:
    """Leaf name -> data type for a single record."""
    return dict(expand_nested(record, max_depth=max_depth).resolved())


# ---------------------------------------------------------------------------
# record iteration


def _iter_lines(file: DiscoveredFile) -> Iterator[str]:
    with open_binary(file.absolute_path, file.name) as fh:
        for raw in fh:
            line = raw.decode("utf-8").strip().lstrip("﻿")
            if line:
                yield line


def _load_whole(file: DiscoveredFile) -> Any:
    with open_binary(file.absolute_path, file.name) as fh:
        return json.loads(fh.read().decode("utf-8-sig"))


@dataclass
class _LineScan:
    sampled: list[Any]
    total: int
    errors: int


def _scan_lines(file: DiscoveredFile, budget: int | None) -> _LineScan:
    sampled: list[Any] = []
    total = errors = 0
    for line in _iter_lines(file):
        total += 1
        if budget is None or len(sampled) < budget:
            try:
                sampled.append(json.loads(line))
            except json.JSONDecodeError:
                errors += 1
    return _LineScan(sampled, total, errors)


def _fields(acc: SchemaAccumulator, source: str, source_kind: str) -> tuple[FieldDraft, ...]:
    out = []
    for name, tag in acc.resolved():
        locator = "$" if name == "value" and () in acc.leaves else f"$.{name}"
        out.append(FieldDraft(name, tag, source, source_kind, "jsonPath", locator))
    return tuple(out)


# ---------------------------------------------------------------------------
# generic JSON


def extract_generic_json(
    file: DiscoveredFile, shape: JsonShape, budget: int | None = 200, max_depth: int = 32
) -> ExtractionResult:
    result = ExtractionResult()
    rel = file.relative_path
    acc = SchemaAccumulator()
    try:
        if shape is JsonShape.JSON_LINES:
            scan = _scan_lines(file, budget)
            for rec in scan.sampled:
                expand_nested(rec, acc=acc, max_depth=max_depth)
            rows = scan.total
            if scan.errors:
                result.warnings.append(f"{rel}: {scan.errors} JSON Lines record(s) did not parse")
            kind = "JSON Lines"
        else:
            data = _load_whole(file)
            if isinstance(data, list):
                rows = len(data)
                for rec in data if budget is None else data[:budget]:
                    expand_nested(rec, acc=acc, max_depth=max_depth)
                kind = "JSON array"
            else:
                rows = 1
                expand_nested(data, acc=acc, max_depth=max_depth)
                kind = "JSON object"
    except (json.JSONDecodeError, UnicodeDecodeError, EOFError, OSError) as exc:
        result.warnings.append(f"skipped {rel}: {exc}")
        return result
    if acc.truncated:
        result.warnings.append(f"{rel}: nesting deeper than {max_depth} levels truncated")
    result.file_objects.append(FileRef(rel, media_type(file.name)))
    result.record_sets.append(
        RecordSetDraft(record_set_name(file.name), _fields(acc, rel, "fileObject"), rel, f"{kind}; rows={rows}")
    )
    return result


def extract_json(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    for f in files:
        try:
            shape = sniff_shape(read_prefix(f.absolute_path, 8192, f.name), f.name)
        except MalformedJson as exc:
            out.warnings.append(f"skipped {f.relative_path}: {exc}")
            continue
        if shape.is_fhir:
            # FHIR content that lost the dispatch race is still generic JSON here
            shape = JsonShape.JSON_LINES if shape is JsonShape.FHIR_NDJSON else JsonShape.SINGLE_OBJECT
        out.extend(extract_generic_json(f, shape, ctx.options.record_budget(), ctx.options.max_depth))
    return out


# ---------------------------------------------------------------------------
# FHIR


@dataclass
class _TypeGroup:
    acc: SchemaAccumulator = field(default_factory=SchemaAccumulator)
    paths: list[str] = field(default_factory=list)
    rows: int = 0


def _resources_in_bundle(bundle: dict, rel: str, warnings: list[str]) -> Iterable[dict]:
    for i, entry in enumerate(bundle.get("entry") or []):
        resource = entry.get("resource") if isinstance(entry, dict) else None
        if not isinstance(resource, dict) or not isinstance(resource.get("resourceType"), str):
            warnings.append(f"{rel}: Bundle entry {i} has no resource with a resourceType; skipped")
            continue
        yield resource


def extract_fhir(
    files: Sequence[tuple[DiscoveredFile, JsonShape]],
    budget: int | None = 200,
    max_depth: int = 32,
) -> ExtractionResult:
    """Group FHIR resources into one record set per ``resourceType``.

    NDJSON chunks and single-resource documents back their record sets
    directly (through a FileSet when a type spans several files). Bundle
    resources are pooled across all Bundle files behind one FileSet.
    """
    result = ExtractionResult()
    direct: dict[str, _TypeGroup] = {}
    bundled: dict[str, _TypeGroup] = {}
    bundle_paths: list[str] = []

    for file, shape in sorted(files, key=lambda t: t[0].relative_path):
        rel = file.relative_path
        try:
            if shape is JsonShape.FHIR_NDJSON:
                scan = _scan_lines(file, budget)
                if scan.errors:
                    result.warnings.append(f"{rel}: {scan.errors} NDJSON line(s) did not parse")
                file_types: list[str] = []
                for rec in scan.sampled:
                    rtype = rec.get("resourceType") if isinstance(rec, dict) else None
                    if not isinstance(rtype, str):
                        result.warnings.append(f"{rel}: NDJSON record without resourceType skipped")
                        continue
                    group = direct.setdefault(rtype, _TypeGroup())
                    expand_nested(rec, acc=group.acc, max_depth=max_depth)
                    if rtype not in file_types:
                        file_types.append(rtype)
                if not file_types:
                    result.warnings.append(f"skipped {rel}: no FHIR resources found")
                    continue
                for rtype in file_types:
                    direct[rtype].paths.append(rel)
                # rows attributed to the file's first resource type
                direct[file_types[0]].rows += scan.total
            else:
                data = _load_whole(file)
                if not isinstance(data, dict):
                    result.warnings.append(f"skipped {rel}: not a FHIR resource document")
                    continue
                if shape is JsonShape.FHIR_BUNDLE:
                    bundle_paths.append(rel)
                    for res in _resources_in_bundle(data, rel, result.warnings):
                        group = bundled.setdefault(res["resourceType"], _TypeGroup())
                        expand_nested(res, acc=group.acc, max_depth=max_depth)
                        group.rows += 1
                else:
                    rtype = data.get("resourceType")
                    if not isinstance(rtype, str):
                        result.warnings.append(f"skipped {rel}: no resourceType")
                        continue
                    group = direct.setdefault(rtype, _TypeGroup())
                    expand_nested(data, acc=group.acc, max_depth=max_depth)
                    group.paths.append(rel)
                    group.rows += 1
        except (json.JSONDecodeError, UnicodeDecodeError, EOFError, OSError) as exc:
            result.warnings.append(f"skipped {rel}: {exc}")
            continue
        result.file_objects.append(FileRef(rel, media_type(file.name)))

    for rtype in sorted(direct):
        group = direct[rtype]
        paths = sorted(set(group.paths))
        if len(paths) == 1:
            source, kind = paths[0], "fileObject"
        else:
            source, kind = f"fhir:{rtype}", "fileSet"
            result.file_sets.append(FileSetDraft(source, f"{rtype}_files", tuple(paths), media_type(paths[0])))
        result.record_sets.append(
            RecordSetDraft(rtype, _fields(group.acc, source, kind), paths[0],
                           f"FHIR {rtype} resources from {len(paths)} file(s); rows={group.rows}")
        )

    if bundle_paths:
        key = "fhir:bundles"
        result.file_sets.append(FileSetDraft(key, "fhir_bundles", tuple(sorted(bundle_paths)), media_type(sorted(bundle_paths)[0])))
        for rtype in sorted(bundled):
            group = bundled[rtype]
            result.record_sets.append(
                RecordSetDraft(rtype, _fields(group.acc, key, "fileSet"), sorted(bundle_paths)[0],
                               f"FHIR {rtype} resources pooled from {len(bundle_paths)} Bundle file(s); rows={group.rows}")
            )
    return result


def extract_fhir_handler(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    typed: list[tuple[DiscoveredFile, JsonShape]] = []
    warnings: list[str] = []
    for f in files:
        shape = _safe_shape(read_prefix(f.absolute_path, 8192, f.name), f)
        if shape is None or not shape.is_fhir:
            warnings.append(f"skipped {f.relative_path}: not FHIR content")
            continue
        typed.append((f, shape))
    result = extract_fhir(typed, ctx.options.record_budget(), ctx.options.max_depth)
    result.warnings[:0] = warnings
    return result
