"""Croissant 1.1 document model, identifier assignment, JSON-LD I/O and validation."""

from __future__ import annotations

import datetime as _dt
import json
import re
from dataclasses import dataclass, field, replace
from fnmatch import fnmatchcase
from glob import escape as glob_escape
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Union

from . import vocab
from .discovery import DiscoveredFile
from .errors import InvariantError, UsageError
from .extraction import ExtractionResult, FieldDraft

__all__ = [
    "RaiMetadata",
    "SemanticMetadata",
    "FileObjectDesc",
    "FileSetDesc",
    "Source",
    "FieldDesc",
    "RecordSetDesc",
    "CroissantDocument",
    "Violation",
    "assign_identifiers",
    "merge_semantic",
    "to_jsonld",
    "serialize_jsonld",
    "from_jsonld",
    "load_document",
    "validate_document",
    "glob_match",
    "covering_globs",
    "sanitize_id",
]


# --------------------------------------------------------------------------
# semantic metadata


_RAI_NAMED = (
    ("data_use_cases", "rai:dataUseCases"),
    ("data_limitations", "rai:dataLimitations"),
    ("personal_sensitive_information", "rai:personalSensitiveInformation"),
)


@dataclass(frozen=True)
class RaiMetadata:
    data_use_cases: str | None = None
    data_limitations: str | None = None
    personal_sensitive_information: str | None = None
    extra: tuple[tuple[str, str], ...] = ()
    """Any other RAI attributes as ``(key, value)``; keys get a ``rai:`` prefix if missing."""

    def items(self) -> list[tuple[str, str]]:
        out = [(key, getattr(self, attr)) for attr, key in _RAI_NAMED if getattr(self, attr) is not None]
        extras = {(k if k.startswith("rai:") else f"rai:{k}"): v for k, v in self.extra}
        out.extend(sorted(extras.items()))
        return out

    def is_empty(self) -> bool:
        return not self.items()


@dataclass(frozen=True)
class SemanticMetadata:
    name: str | None = None
    description: str | None = None
    license: str | None = None
    citation: str | None = None
    creators: tuple[str, ...] = ()
    publisher: str | None = None
    version: str | None = None
    date_published: str | None = None
    url: str | None = None
    same_as: tuple[str, ...] = ()
    alternate_names: tuple[str, ...] = ()
    temporal_coverage: str | None = None
    usage_info: str | None = None
    rai: RaiMetadata = field(default_factory=RaiMetadata)

    def is_empty(self) -> bool:
        return self == SemanticMetadata()


# --------------------------------------------------------------------------
# structural types


@dataclass(frozen=True)
class FileObjectDesc:
    id: str
    name: str
    content_url: str
    content_size: str
    encoding_format: str
    sha256: str


@dataclass(frozen=True)
class FileSetDesc:
    id: str
    name: str
    includes: tuple[str, ...]
    encoding_format: str


Distribution = Union[FileObjectDesc, FileSetDesc]


@dataclass(frozen=True)
class Source:
    ref_id: str
    ref_kind: str = "fileObject"
    extract_kind: str | None = "column"
    extract_value: str | None = None


@dataclass(frozen=True)
class FieldDesc:
    id: str
    name: str
    data_type: str
    source: Source | None
    description: str | None = None
    equivalent_property: tuple[str, ...] = ()
    extra_data_types: tuple[str, ...] = ()


@dataclass(frozen=True)
class RecordSetDesc:
    id: str
    name: str
    fields: tuple[FieldDesc, ...]
    description: str | None = None


@dataclass(frozen=True)
class CroissantDocument:
    semantic: SemanticMetadata = field(default_factory=SemanticMetadata)
    distribution: tuple[Distribution, ...] = ()
    record_sets: tuple[RecordSetDesc, ...] = ()
    conforms_to: tuple[str, ...] = (vocab.CROISSANT_1_1,)
    context: Mapping[str, Any] = field(default_factory=lambda: dict(vocab.CONTEXT))

    @property
    def file_objects(self) -> list[FileObjectDesc]:
        return [d for d in self.distribution if isinstance(d, FileObjectDesc)]

    @property
    def file_sets(self) -> list[FileSetDesc]:
        return [d for d in self.distribution if isinstance(d, FileSetDesc)]

    def distribution_by_id(self) -> dict[str, Distribution]:
        return {d.id: d for d in self.distribution}

    def record_set(self, name: str) -> RecordSetDesc:
        for rs in self.record_sets:
            if rs.name == name:
                return rs
        raise KeyError(name)

    def backing_paths(self, record_set: RecordSetDesc) -> list[str]:
        """Content URLs of the FileObjects that a record set's fields read from.

        FileSet sources are resolved through their ``includes`` patterns
        against this document's FileObjects.
        """
        by_id = self.distribution_by_id()
        urls = [fo.content_url for fo in self.file_objects]
        out: list[str] = []
        for f in record_set.fields:
            if f.source is None:
                continue
            target = by_id.get(f.source.ref_id)
            if isinstance(target, FileObjectDesc):
                out.append(target.content_url)
            elif isinstance(target, FileSetDesc):
                out.extend(u for u in urls if any(glob_match(p, u) for p in target.includes))
        return sorted(set(out))


# --------------------------------------------------------------------------
# glob helpers


def glob_match(pattern: str, path: str) -> bool:
    """Segment-wise glob match; ``*`` never crosses ``/`` and ``**`` spans segments."""
    return _match_segments(pattern.split("/"), path.split("/"))


def _match_segments(pat: list[str], parts: list[str]) -> bool:
    if not pat:
        return not parts
    head = pat[0]
    if head == "**":
        return any(_match_segments(pat[1:], parts[i:]) for i in range(len(parts) + 1))
    if not parts:
        return False
    return fnmatchcase(parts[0], head) and _match_segments(pat[1:], parts[1:])


def _suffix(name: str) -> str:
    stem, dot, ext = name.partition(".")
    return dot + ext if stem and dot else ""


def covering_globs(members: Sequence[str], universe: Iterable[str]) -> tuple[str, ...]:
    """Compact ``includes`` patterns matching exactly ``members`` within ``universe``.

    Uses ``dir/*.ext`` where that pattern would not pull in any non-member,
    otherwise the escaped literal path.
    """
    member_set = set(members)
    universe = list(universe)
    groups: dict[str, list[str]] = {}
    for m in sorted(member_set):
        head, sep, name = m.rpartition("/")
        suffix = _suffix(name)
        if suffix:
            pattern = f"{glob_escape(head)}/*{glob_escape(suffix)}" if sep else f"*{glob_escape(suffix)}"
        else:
            pattern = glob_escape(m)
        groups.setdefault(pattern, []).append(m)
    out: list[str] = []
    for pattern, group in groups.items():
        if len(group) > 1 and all(u in member_set for u in universe if glob_match(pattern, u)):
            out.append(pattern)
        else:
            out.extend(glob_escape(m) for m in group)
    return tuple(sorted(out))


# --------------------------------------------------------------------------
# identifier assignment

_ID_UNSAFE = re.compile(r"[^A-Za-z0-9_]")


def sanitize_id(text: str) -> str:
    return _ID_UNSAFE.sub("_", text)


def assign_identifiers(
    results: Sequence[ExtractionResult], files: Sequence[DiscoveredFile]
) -> CroissantDocument:
    """Assemble handler outputs into a document skeleton with deterministic ids.

    ``file_{i}`` and ``recordset_{i}`` use the zero-based position of the
    backing file in ``files`` (sorted by relative path). FileSets take the
    position of their first member.
    """
    index: dict[str, int] = {}
    for i, f in enumerate(files):
        if f.relative_path in index:
            raise InvariantError(f"duplicate relative path in discovery: {f.relative_path}")
        index[f.relative_path] = i
    by_path = {f.relative_path: f for f in files}

    claimed: dict[str, str] = {}
    file_objects: dict[str, FileObjectDesc] = {}
    for r_i, result in enumerate(results):
        for ref in result.file_objects:
            if ref.path not in index:
                raise InvariantError(f"handler emitted undiscovered file: {ref.path}")
            if ref.path in claimed:
                raise InvariantError(f"file claimed twice: {ref.path}")
            claimed[ref.path] = str(r_i)
            f = by_path[ref.path]
            file_objects[ref.path] = FileObjectDesc(
                id=f"file_{index[ref.path]}",
                name=f.name,
                content_url=f.relative_path,
                content_size=str(f.byte_size),
                encoding_format=ref.encoding_format,
                sha256=f.sha256,
            )

    all_paths = [f.relative_path for f in files]
    fileset_ids: dict[str, str] = {}
    file_sets: list[tuple[int, FileSetDesc]] = []
    used_fs: set[str] = set()
    drafts = sorted(
        (fs for r in results for fs in r.file_sets),
        key=lambda fs: (min(index[m] for m in fs.members), fs.name, fs.key),
    )
    for fs in drafts:
        if fs.key in fileset_ids:
            raise InvariantError(f"duplicate file set key: {fs.key}")
        first = min(index[m] for m in fs.members)
        fid = f"fileset_{first}"
        k = 1
        while fid in used_fs:
            fid = f"fileset_{first}_{k}"
            k += 1
        used_fs.add(fid)
        fileset_ids[fs.key] = fid
        includes = covering_globs(fs.members, all_paths)
        file_sets.append((first, FileSetDesc(fid, fs.name, includes, fs.encoding_format)))

    rs_drafts = sorted(
        (rs for r in results for rs in r.record_sets),
        key=lambda rs: (index[rs.primary], rs.name),
    )
    names = _disambiguate_names([(rs.name, rs.primary) for rs in rs_drafts])
    by_primary: dict[int, int] = {}
    for rs in rs_drafts:
        by_primary[index[rs.primary]] = by_primary.get(index[rs.primary], 0) + 1

    used_ids: set[str] = set(file_objects[p].id for p in file_objects) | used_fs
    record_sets: list[RecordSetDesc] = []
    for rs, name in zip(rs_drafts, names):
        i = index[rs.primary]
        rs_id = f"recordset_{i}" if by_primary[i] == 1 else f"recordset_{i}_{sanitize_id(name)}"
        while rs_id in used_ids:
            rs_id += "_"
        used_ids.add(rs_id)
        fields = []
        for fd in rs.fields:
            src_id = _resolve_source(fd, file_objects, fileset_ids)
            fields.append(_field_from_draft(fd, src_id, rs_id, used_ids))
        record_sets.append(RecordSetDesc(rs_id, name, tuple(fields), rs.description))

    distribution: list[Distribution] = [file_objects[p] for p in sorted(file_objects, key=index.__getitem__)]
    distribution.extend(fs for _, fs in sorted(file_sets, key=lambda t: (t[0], t[1].id)))
    return CroissantDocument(distribution=tuple(distribution), record_sets=tuple(record_sets))


def _resolve_source(fd: FieldDraft, file_objects: Mapping[str, FileObjectDesc], fileset_ids: Mapping[str, str]) -> str:
    if fd.source_kind == "fileSet":
        try:
            return fileset_ids[fd.source]
        except KeyError:
            raise InvariantError(f"field {fd.name} references unknown file set {fd.source}") from None
    try:
        return file_objects[fd.source].id
    except KeyError:
        raise InvariantError(f"field {fd.name} references unclaimed file {fd.source}") from None


def _field_from_draft(fd: FieldDraft, src_id: str, rs_id: str, used: set[str]) -> FieldDesc:
    base = sanitize_id(fd.name)
    fid = f"{src_id}_{base}"
    if fid in used:
        fid = f"{rs_id}_{base}"
    candidate, k = fid, 2
    while candidate in used:
        candidate = f"{fid}_{k}"
        k += 1
    used.add(candidate)
    source = Source(src_id, fd.source_kind, fd.extract_kind, fd.locator)
    return FieldDesc(candidate, fd.name, fd.data_type, source, fd.description)


def _disambiguate_names(items: Sequence[tuple[str, str]]) -> list[str]:
    counts: dict[str, int] = {}
    for name, _ in items:
        counts[name] = counts.get(name, 0) + 1
    out = []
    for name, primary in items:
        if counts[name] > 1:
            parent = primary.rpartition("/")[0]
            out.append(f"{parent}/{name}" if parent else name)
        else:
            out.append(name)
    seen: dict[str, int] = {}
    final = []
    for name in out:
        n = seen.get(name, 0)
        seen[name] = n + 1
        final.append(name if n == 0 else f"{name}_{n}")
    return final


# --------------------------------------------------------------------------
# semantic merge


def merge_semantic(skeleton: CroissantDocument, semantic: SemanticMetadata) -> CroissantDocument:
    """Attach user-supplied semantic metadata to a structural skeleton."""
    if not skeleton.semantic.is_empty():
        raise InvariantError("skeleton already carries semantic metadata")
    if not semantic.name:
        raise UsageError("a dataset name is required")
    if semantic.date_published is not None:
        try:
            _dt.date.fromisoformat(semantic.date_published)
        except ValueError:
            raise UsageError(f"datePublished must be an ISO-8601 date: {semantic.date_published!r}") from None
    conforms = (vocab.CROISSANT_1_1,) if semantic.rai.is_empty() else (vocab.CROISSANT_1_1, vocab.RAI_1_0)
    return replace(skeleton, semantic=semantic, conforms_to=conforms)


# --------------------------------------------------------------------------
# JSON-LD writing


def _semantic_items(s: SemanticMetadata) -> list[tuple[str, Any]]:
    items: list[tuple[str, Any]] = []
    scalar = (
        ("name", s.name),
        ("description", s.description),
        ("license", s.license),
        ("version", s.version),
        ("datePublished", s.date_published),
        ("url", s.url),
    )
    items.extend((k, v) for k, v in scalar if v is not None)
    if s.creators:
        items.append(("creator", [{"@type": "sc:Person", "name": c} for c in s.creators]))
    if s.citation is not None:
        items.append(("citeAs", s.citation))
    if s.publisher is not None:
        items.append(("publisher", {"@type": "sc:Organization", "name": s.publisher}))
    if s.alternate_names:
        items.append(("alternateName", list(s.alternate_names)))
    if s.same_as:
        items.append(("sameAs", list(s.same_as)))
    if s.temporal_coverage is not None:
        items.append(("temporalCoverage", s.temporal_coverage))
    if s.usage_info is not None:
        items.append(("usageInfo", s.usage_info))
    items.extend(s.rai.items())
    return items


def _dist_to_json(d: Distribution) -> dict[str, Any]:
    if isinstance(d, FileObjectDesc):
        return {
            "@type": "cr:FileObject",
            "@id": d.id,
            "name": d.name,
            "contentSize": d.content_size,
            "contentUrl": d.content_url,
            "encodingFormat": d.encoding_format,
            "sha256": d.sha256,
        }
    includes: Any = d.includes[0] if len(d.includes) == 1 else list(d.includes)
    return {
        "@type": "cr:FileSet",
        "@id": d.id,
        "name": d.name,
        "encodingFormat": d.encoding_format,
        "includes": includes,
    }


def _field_to_json(f: FieldDesc) -> dict[str, Any]:
    out: dict[str, Any] = {"@type": "cr:Field", "@id": f.id, "name": f.name}
    if f.description is not None:
        out["description"] = f.description
    out["dataType"] = [f.data_type, *f.extra_data_types] if f.extra_data_types else f.data_type
    if f.equivalent_property:
        out["equivalentProperty"] = list(f.equivalent_property)
    if f.source is not None:
        src: dict[str, Any] = {f.source.ref_kind: {"@id": f.source.ref_id}}
        if f.source.extract_kind is not None:
            src["extract"] = {f.source.extract_kind: f.source.extract_value}
        out["source"] = src
    return out


def to_jsonld(doc: CroissantDocument) -> dict[str, Any]:
    out: dict[str, Any] = {
        "@context": dict(doc.context),
        "@type": "sc:Dataset",
        "conformsTo": list(doc.conforms_to),
    }
    out.update(_semantic_items(doc.semantic))
    out["distribution"] = [_dist_to_json(d) for d in doc.distribution]
    out["recordSet"] = []
    for rs in doc.record_sets:
        rs_json: dict[str, Any] = {"@type": "cr:RecordSet", "@id": rs.id, "name": rs.name}
        if rs.description is not None:
            rs_json["description"] = rs.description
        rs_json["field"] = [_field_to_json(f) for f in rs.fields]
        out["recordSet"].append(rs_json)
    return out


def dumps_jsonld(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def serialize_jsonld(doc: CroissantDocument) -> bytes:
    """UTF-8 JSON with a fixed key order and a trailing newline."""
    return dumps_jsonld(to_jsonld(doc))


# --------------------------------------------------------------------------
# JSON-LD reading (tolerant of third-party documents)


def _as_list(value: Any) -> list[Any]:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def _local_type(value: Any) -> str:
    t = value[0] if isinstance(value, list) and value else value
    if not isinstance(t, str):
        return ""
    return re.split(r"[:/#]", t)[-1]


def _text(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, dict):
        return _text(value.get("name") or value.get("@value") or value.get("@id"))
    if isinstance(value, list):
        return _text(value[0]) if value else None
    return str(value)


def _ref_id(value: Any) -> str | None:
    if isinstance(value, dict):
        return value.get("@id")
    if isinstance(value, str):
        return value
    return None


def _parse_source(src: Any) -> Source | None:
    if not isinstance(src, dict):
        return None
    ref_kind = ref_id = None
    for kind in ("fileObject", "fileSet", "distribution", "field", "recordSet"):
        if kind in src:
            ref_kind, ref_id = kind, _ref_id(src[kind])
            break
    if ref_id is None:
        return None
    extract_kind = extract_value = None
    extract = src.get("extract")
    if isinstance(extract, dict) and extract:
        extract_kind, raw = next(iter(extract.items()))
        extract_value = raw if isinstance(raw, str) else json.dumps(raw)
    return Source(ref_id, ref_kind, extract_kind, extract_value)


def _parse_fields(raw_fields: Any, prefix: str = "") -> list[FieldDesc]:
    out: list[FieldDesc] = []
    for f in _as_list(raw_fields):
        if not isinstance(f, dict):
            continue
        name = str(f.get("name") or f.get("@id") or "")
        full = f"{prefix}.{name}" if prefix else name
        subs = f.get("subField")
        if subs:
            out.extend(_parse_fields(subs, full))
            continue
        types = [vocab.compact_type(t) for t in _as_list(f.get("dataType")) if isinstance(t, str)]
        known = [t for t in types if t in vocab.DATA_TYPE_SET]
        primary = known[0] if known else (types[0] if types else "")
        extras = tuple(t for t in types if t != primary)
        out.append(
            FieldDesc(
                id=str(f.get("@id") or full),
                name=full,
                data_type=primary,
                source=_parse_source(f.get("source")),
                description=_text(f.get("description")),
                equivalent_property=tuple(str(x) for x in _as_list(f.get("equivalentProperty"))),
                extra_data_types=extras,
            )
        )
    return out


def from_jsonld(obj: Mapping[str, Any]) -> CroissantDocument:
    """Build a document from parsed JSON-LD.

    Accepts prefixed or full-URI type spellings, FileSet distributions and
    ``subField`` nesting, which is flattened into ``parent.child`` names.
    """
    ctx = obj.get("@context")
    context = dict(ctx) if isinstance(ctx, dict) else {}

    rai_named = {key: attr for attr, key in _RAI_NAMED}
    rai_kwargs: dict[str, str] = {}
    rai_extra: list[tuple[str, str]] = []
    for key, value in obj.items():
        if key.startswith("rai:") or key.startswith(vocab.RAI):
            short = "rai:" + key.split(":", 1)[1] if key.startswith("rai:") else "rai:" + key[len(vocab.RAI):]
            text = _text(value) or ""
            if short in rai_named:
                rai_kwargs[rai_named[short]] = text
            else:
                rai_extra.append((short, text))

    semantic = SemanticMetadata(
        name=_text(obj.get("name")),
        description=_text(obj.get("description")),
        license=_text(obj.get("license")),
        citation=_text(obj.get("citeAs") or obj.get("citation")),
        creators=tuple(t for t in (_text(c) for c in _as_list(obj.get("creator"))) if t),
        publisher=_text(obj.get("publisher")),
        version=_text(obj.get("version")),
        date_published=_text(obj.get("datePublished")),
        url=_text(obj.get("url")),
        same_as=tuple(str(x) for x in _as_list(obj.get("sameAs"))),
        alternate_names=tuple(str(x) for x in _as_list(obj.get("alternateName"))),
        temporal_coverage=_text(obj.get("temporalCoverage")),
        usage_info=_text(obj.get("usageInfo")),
        rai=RaiMetadata(**rai_kwargs, extra=tuple(sorted(rai_extra))),
    )

    distribution: list[Distribution] = []
    for d in _as_list(obj.get("distribution")):
        if not isinstance(d, dict):
            continue
        kind = _local_type(d.get("@type"))
        did = str(d.get("@id") or d.get("name") or "")
        if kind == "FileSet":
            includes = tuple(str(x) for x in _as_list(d.get("includes")))
            distribution.append(FileSetDesc(did, str(d.get("name") or did), includes, _text(d.get("encodingFormat")) or ""))
        else:
            distribution.append(
                FileObjectDesc(
                    id=did,
                    name=str(d.get("name") or did),
                    content_url=str(d.get("contentUrl") or ""),
                    content_size=str(d.get("contentSize") if d.get("contentSize") is not None else ""),
                    encoding_format=_text(d.get("encodingFormat")) or "",
                    sha256=str(d.get("sha256") or ""),
                )
            )

    record_sets = []
    for rs in _as_list(obj.get("recordSet")):
        if not isinstance(rs, dict):
            continue
        rid = str(rs.get("@id") or rs.get("name") or "")
        record_sets.append(
            RecordSetDesc(rid, str(rs.get("name") or rid), tuple(_parse_fields(rs.get("field"))), _text(rs.get("description")))
        )

    conforms = tuple(str(x) for x in _as_list(obj.get("conformsTo")))
    return CroissantDocument(semantic, tuple(distribution), tuple(record_sets), conforms, context)


def load_document(path: str | Path) -> CroissantDocument:
    with open(path, "rb") as fh:
        obj = json.loads(fh.read().decode("utf-8"))
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: top-level JSON value is not an object")
    return from_jsonld(obj)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    rule: str
    id: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}\t{self.id}\t{self.message}"


_SHA_RE = re.compile(r"[0-9a-f]{64}\Z")
_SIZE_RE = re.compile(r"\d+\Z")


def validate_document(doc: CroissantDocument) -> list[Violation]:
    """Structural checks over a document; an empty list means valid.

    Rules: ``context``, ``conforms-to``, ``missing-name``, ``duplicate-id``,
    ``bad-content-url``, ``bad-sha256``, ``bad-content-size``,
    ``empty-includes``, ``duplicate-field-name``, ``missing-source``,
    ``dangling-reference``, ``unknown-data-type``.
    """
    out: list[Violation] = []
    if dict(doc.context) != vocab.CONTEXT:
        out.append(Violation("context", "@context", "context block differs from the Croissant 1.1 context"))
    if vocab.CROISSANT_1_1 not in doc.conforms_to:
        out.append(Violation("conforms-to", "conformsTo", f"missing {vocab.CROISSANT_1_1}"))
    has_rai = not doc.semantic.rai.is_empty()
    if has_rai != (vocab.RAI_1_0 in doc.conforms_to):
        want = "present" if has_rai else "absent"
        out.append(Violation("conforms-to", "conformsTo", f"{vocab.RAI_1_0} must be {want}"))
    if not doc.semantic.name:
        out.append(Violation("missing-name", "name", "dataset name is required"))

    seen: set[str] = set()

    def claim(ident: str) -> None:
        if ident in seen:
            out.append(Violation("duplicate-id", ident, "@id is not unique"))
        seen.add(ident)

    for d in doc.distribution:
        claim(d.id)
        if isinstance(d, FileObjectDesc):
            url = d.content_url
            if not url or url.startswith("/") or "\\" in url or ".." in url.split("/") or re.match(r"[A-Za-z][\w+.-]*:", url):
                out.append(Violation("bad-content-url", d.id, f"contentUrl must be a relative forward-slash path: {url!r}"))
            if not _SHA_RE.match(d.sha256):
                out.append(Violation("bad-sha256", d.id, "sha256 must be 64 lowercase hex characters"))
            if not _SIZE_RE.match(d.content_size):
                out.append(Violation("bad-content-size", d.id, f"contentSize must be a decimal byte count: {d.content_size!r}"))
        elif not d.includes:
            out.append(Violation("empty-includes", d.id, "FileSet has no includes pattern"))

    dist_ids = {d.id for d in doc.distribution}
    for rs in doc.record_sets:
        claim(rs.id)
        names: set[str] = set()
        for f in rs.fields:
            claim(f.id)
            if f.name in names:
                out.append(Violation("duplicate-field-name", f.id, f"field name {f.name!r} repeated in {rs.name!r}"))
            names.add(f.name)
            if f.source is None:
                out.append(Violation("missing-source", f.id, "field has no source"))
            elif f.source.ref_kind in ("fileObject", "fileSet", "distribution") and f.source.ref_id not in dist_ids:
                out.append(Violation("dangling-reference", f.id, f"source names unknown distribution id {f.source.ref_id!r}"))
            if not vocab.is_known_type(f.data_type):
                out.append(Violation("unknown-data-type", f.id, f"dataType {f.data_type!r} is not in the Croissant vocabulary"))
    return out
