"""Parquet handler: schema and row counts come from the file footer only.

The footer is ``<FileMetaData thrift><4-byte LE length>PAR1`` at the end of
the file; no column chunk or page is ever read.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass, field
from typing import Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, FileSetDraft, RecordSetDraft
from ..fileio import media_type
from .thrift_compact import CompactReader, ThriftError
from . import record_set_name

EXTENSIONS = (".parquet",)
MAGIC = b"PAR1"

PHYSICAL = ["BOOLEAN", "INT32", "INT64", "INT96", "FLOAT", "DOUBLE", "BYTE_ARRAY", "FIXED_LEN_BYTE_ARRAY"]
REPETITION = ["REQUIRED", "OPTIONAL", "REPEATED"]
CONVERTED = [
    "UTF8", "MAP", "MAP_KEY_VALUE", "LIST", "ENUM", "DECIMAL", "DATE", "TIME_MILLIS",
    "TIME_MICROS", "TIMESTAMP_MILLIS", "TIMESTAMP_MICROS", "UINT_8", "UINT_16", "UINT_32",
    "UINT_64", "INT_8", "INT_16", "INT_32", "INT_64", "JSON", "BSON", "INTERVAL",
]
# LogicalType union member ids
LOGICAL = {
    1: "STRING", 2: "MAP", 3: "LIST", 4: "ENUM", 5: "DECIMAL", 6: "DATE", 7: "TIME",
    8: "TIMESTAMP", 10: "INTEGER", 11: "NULL", 12: "JSON", 13: "BSON", 14: "UUID",
    15: "FLOAT16", 16: "VARIANT", 17: "GEOMETRY", 18: "GEOGRAPHY",
}


class ParquetFooterError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnarColumn:
    name: str
    """Leaf path, segments joined with ``.``."""
    physical: str | None
    logical: str | None
    """Logical annotation, e.g. ``INTEGER(32,signed)``, ``TIMESTAMP(MILLIS)``, ``UTF8``."""
    nullable: bool


@dataclass
class ColumnarSchema:
    columns: list[ColumnarColumn] = field(default_factory=list)
    num_rows: int = 0
    created_by: str | None = None

    def signature(self) -> tuple[tuple[str, str | None, str | None], ...]:
        return tuple((c.name, c.physical, c.logical) for c in self.columns)


def read_footer_bytes(path: str | os.PathLike[str]) -> bytes:
    """Read just the serialized FileMetaData at the end of a Parquet file."""
    with open(path, "rb") as fh:
        fh.seek(0, os.SEEK_END)
        size = fh.tell()
        if size < 12:
            raise ParquetFooterError("file too small to be Parquet")
        fh.seek(size - 8)
        tail = fh.read(8)
        if tail[4:] != MAGIC:
            raise ParquetFooterError("missing PAR1 footer magic")
        (length,) = struct.unpack("<I", tail[:4])
        if length <= 0 or length > size - 12:
            raise ParquetFooterError("footer length out of range")
        fh.seek(size - 8 - length)
        return fh.read(length)


def _logical_label(elem: dict) -> str | None:
    lt = elem.get(10)
    if isinstance(lt, dict) and lt:
        member_id, body = next(iter(lt.items()))
        kind = LOGICAL.get(member_id, f"UNKNOWN_{member_id}")
        if kind == "INTEGER" and isinstance(body, dict):
            return f"INTEGER({body.get(1, 64)},{'signed' if body.get(2, True) else 'unsigned'})"
        if kind in ("TIMESTAMP", "TIME") and isinstance(body, dict):
            unit = body.get(2)
            unit_name = next(iter(("MILLIS", "MICROS", "NANOS")[k - 1] for k in unit)) if isinstance(unit, dict) and unit else "?"
            return f"{kind}({unit_name})"
        if kind == "DECIMAL" and isinstance(body, dict):
            return f"DECIMAL({body.get(2)},{body.get(1)})"
        return kind
    ct = elem.get(6)
    if isinstance(ct, int) and 0 <= ct < len(CONVERTED):
        label = CONVERTED[ct]
        if label == "DECIMAL":
            return f"DECIMAL({elem.get(8)},{elem.get(7)})"
        return label
    return None


def _name(elem: dict) -> str:
    raw = elem.get(4, b"")
    return raw.decode("utf-8", "replace") if isinstance(raw, bytes) else str(raw)


def parse_footer(data: bytes) -> ColumnarSchema:
    try:
        meta = CompactReader(data).struct()
    except ThriftError as exc:
        raise ParquetFooterError(f"corrupt footer: {exc}") from exc
    elements = meta.get(2)
    if not isinstance(elements, list) or not elements:
        raise ParquetFooterError("footer has no schema")
    num_rows = meta.get(3, 0)
    created_by = meta.get(6)
    schema = ColumnarSchema(num_rows=int(num_rows), created_by=created_by.decode("utf-8", "replace") if isinstance(created_by, bytes) else None)

    root, consumed = _build_tree(elements, 0)
    if consumed != len(elements):
        raise ParquetFooterError("schema tree does not cover all elements")
    for child in root[1]:
        _flatten(child, [], False, schema.columns)
    return schema


_Node = tuple  # (element dict, list of child nodes)


def _build_tree(elements: list, pos: int) -> tuple[_Node, int]:
    if pos >= len(elements):
        raise ParquetFooterError("schema tree truncated")
    elem = elements[pos]
    if not isinstance(elem, dict):
        raise ParquetFooterError("malformed schema element")
    pos += 1
    children = []
    for _ in range(elem.get(5, 0) or 0):
        child, pos = _build_tree(elements, pos)
        children.append(child)
    return (elem, children), pos


def _leaf(elem: dict, path: list[str], nullable: bool) -> ColumnarColumn:
    ptype = elem.get(1)
    physical = PHYSICAL[ptype] if isinstance(ptype, int) and 0 <= ptype < len(PHYSICAL) else None
    return ColumnarColumn(".".join(path), physical, _logical_label(elem), nullable)


def _flatten(node: _Node, prefix: list[str], nullable: bool, out: list[ColumnarColumn]) -> None:
    elem, children = node
    path = prefix + [_name(elem)]
    nullable = nullable or elem.get(3, 0) != 0
    if not children:
        out.append(_leaf(elem, path, nullable))
        return
    label = _logical_label(elem)
    if label == "LIST" and len(children) == 1:
        # <list> ( repeated group list ( element ) ) or legacy repeated leaf;
        # wrapper names carry no meaning and are dropped from the path
        wrapper, inner = children[0]
        if not inner:
            out.append(_leaf(wrapper, path, True))
        elif len(inner) == 1 and not inner[0][1]:
            out.append(_leaf(inner[0][0], path, True))
        elif len(inner) == 1:
            for grandchild in inner[0][1]:
                _flatten(grandchild, path, True, out)
        else:
            for grandchild in inner:
                _flatten(grandchild, path, True, out)
        return
    if label in ("MAP", "MAP_KEY_VALUE") and len(children) == 1 and children[0][1]:
        for grandchild in children[0][1]:
            _flatten(grandchild, path, True, out)
        return
    for child in children:
        _flatten(child, path, nullable, out)


def read_schema(path: str | os.PathLike[str]) -> ColumnarSchema:
    return parse_footer(read_footer_bytes(path))


_INT_TAGS = {
    (8, True): "cr:Int8", (16, True): "cr:Int16", (32, True): "cr:Int32", (64, True): "cr:Int64",
    (8, False): "cr:UInt8", (16, False): "cr:UInt16", (32, False): "cr:UInt32", (64, False): "cr:UInt64",
}
_CONVERTED_INT = {
    "INT_8": "cr:Int8", "INT_16": "cr:Int16", "INT_32": "cr:Int32", "INT_64": "cr:Int64",
    "UINT_8": "cr:UInt8", "UINT_16": "cr:UInt16", "UINT_32": "cr:UInt32", "UINT_64": "cr:UInt64",
}
_TEXT_LOGICAL = {"STRING", "UTF8", "ENUM", "JSON", "UUID"}
_PHYSICAL_TAGS = {
    "BOOLEAN": "sc:Boolean",
    "INT32": "cr:Int32",
    "INT64": "cr:Int64",
    "INT96": "sc:DateTime",
    "FLOAT": "cr:Float32",
    "DOUBLE": "cr:Float64",
}


def map_columnar_type(column: ColumnarColumn) -> tuple[str, str | None]:
    """Croissant data type for a Parquet leaf, plus an optional annotation.

    Annotations flag lossy or unrepresentable mappings (binary, decimal,
    unsupported logical types).
    """
    logical = column.logical or ""
    kind = logical.split("(", 1)[0]
    if kind == "INTEGER":
        width, signed = logical[len("INTEGER("):-1].split(",")
        return _INT_TAGS.get((int(width), signed == "signed"), "cr:Int64"), None
    if kind in _CONVERTED_INT:
        return _CONVERTED_INT[kind], None
    if kind in _TEXT_LOGICAL:
        return "sc:Text", None
    if kind == "DATE":
        return "sc:Date", None
    if kind in ("TIMESTAMP", "TIMESTAMP_MILLIS", "TIMESTAMP_MICROS"):
        return "sc:DateTime", None
    if kind in ("TIME", "TIME_MILLIS", "TIME_MICROS"):
        return "sc:Time", None
    if kind == "FLOAT16":
        return "cr:Float16", None
    if kind == "DECIMAL":
        return "cr:Float64", f"parquet {logical}"
    if kind:
        return "sc:Text", f"unsupported parquet logical type {logical}; typed as text"
    if column.physical in _PHYSICAL_TAGS:
        return _PHYSICAL_TAGS[column.physical], ("legacy INT96 timestamp" if column.physical == "INT96" else None)
    if column.physical in ("BYTE_ARRAY", "FIXED_LEN_BYTE_ARRAY"):
        return "sc:Text", "binary column"
    return "sc:Text", f"unknown parquet type {column.physical}; typed as text"


def _fields(schema: ColumnarSchema, source: str, source_kind: str) -> tuple[FieldDraft, ...]:
    out = []
    for col in schema.columns:
        tag, note = map_columnar_type(col)
        out.append(FieldDraft(col.name, tag, source, source_kind, "column", col.name, note))
    return tuple(out)


def extract_parquet(file: DiscoveredFile) -> tuple[ExtractionResult, ColumnarSchema | None]:
    result = ExtractionResult()
    try:
        schema = read_schema(file.absolute_path)
    except (ParquetFooterError, OSError) as exc:
        result.warnings.append(f"skipped {file.relative_path}: {exc}")
        return result, None
    rel = file.relative_path
    result.file_objects.append(FileRef(rel, media_type(file.name)))
    result.record_sets.append(
        RecordSetDraft(record_set_name(file.name), _fields(schema, rel, "fileObject"), rel, f"Parquet table; rows={schema.num_rows}")
    )
    result.profiles.append(schema)
    return result, schema


def group_partitions(
    files: Sequence[DiscoveredFile],
    schemas: Sequence[ColumnarSchema],
    grouped: bool = False,
    root_name: str = "root",
) -> ExtractionResult:
    """Per-file record sets, or one record set per directory of same-schema files."""
    out = ExtractionResult()
    by_dir: dict[str, list[tuple[DiscoveredFile, ColumnarSchema]]] = {}
    for f, s in zip(files, schemas):
        by_dir.setdefault(f.parent, []).append((f, s))

    for directory in sorted(by_dir):
        members = sorted(by_dir[directory], key=lambda t: t[0].relative_path)
        same = len({s.signature() for _, s in members}) == 1
        if grouped and len(members) > 1 and not same:
            out.warnings.append(f"parquet files in {directory or '.'} have differing schemas; not grouped")
        if grouped and len(members) > 1 and same:
            paths = tuple(f.relative_path for f, _ in members)
            key = f"parquet:{directory}"
            name = directory.rsplit("/", 1)[-1] if directory else root_name
            rows = sum(s.num_rows for _, s in members)
            out.file_objects.extend(FileRef(p, media_type(p)) for p in paths)
            out.file_sets.append(FileSetDraft(key, f"{name}_partitions", paths, "application/x-parquet"))
            out.record_sets.append(
                RecordSetDraft(name, _fields(members[0][1], key, "fileSet"), paths[0],
                               f"Parquet table in {len(paths)} partition files; rows={rows}")
            )
            continue
        for f, s in members:
            out.file_objects.append(FileRef(f.relative_path, media_type(f.name)))
            out.record_sets.append(
                RecordSetDraft(record_set_name(f.name), _fields(s, f.relative_path, "fileObject"),
                               f.relative_path, f"Parquet table; rows={s.num_rows}")
            )
    return out


def sniff(prefix: bytes, file: DiscoveredFile) -> bool:
    return prefix[:4] == MAGIC


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    readable: list[DiscoveredFile] = []
    schemas: list[ColumnarSchema] = []
    for f in files:
        single, schema = extract_parquet(f)
        out.warnings.extend(single.warnings)
        if schema is not None:
            readable.append(f)
            schemas.append(schema)
            out.profiles.append(schema)
    grouped = group_partitions(readable, schemas, ctx.options.group_partitions, ctx.root_name)
    out.file_objects.extend(grouped.file_objects)
    out.file_sets.extend(grouped.file_sets)
    out.record_sets.extend(grouped.record_sets)
    out.warnings.extend(grouped.warnings)
    return out
