"""Agreement metrics between Croissant documents, packaging verification, and schema diff.

Fields are matched on the pair (record set name, field name), both
case-folded and stripped, so producer-specific ``@id`` schemes do not
matter. With ``F_r`` the reference field keys and ``M`` the matched keys::

    R_field  = |M| / |F_r|
    T_strict = |{f in M : type_g(f) == type_r(f)}| / |M|
    T_sem    = |{f in M : type_g(f) ~ type_r(f)}| / |M|

where ``~`` is equality or membership in the same numeric family.
Undefined ratios are ``None``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import vocab
from .model import CroissantDocument, FieldDesc, Violation, validate_document

__all__ = [
    "NumericFamily",
    "NormalizedType",
    "normalize_type",
    "Disagreement",
    "ComparisonReport",
    "compare_documents",
    "verify_packaging",
    "FieldChange",
    "SchemaDiff",
    "schema_diff",
    "format_ratio",
]


class NumericFamily(enum.Enum):
    INTEGER = "integer"
    FLOAT = "float"
    NONE = "none"


_INTEGER_TAGS = {"sc:Integer", "cr:Int8", "cr:Int16", "cr:Int32", "cr:Int64",
                 "cr:UInt8", "cr:UInt16", "cr:UInt32", "cr:UInt64"}
_FLOAT_TAGS = {"sc:Float", "cr:Float16", "cr:Float32", "cr:Float64"}


@dataclass(frozen=True)
class NormalizedType:
    canonical: str
    """Full URI for vocabulary types; the raw spelling otherwise."""
    numeric_family: NumericFamily = NumericFamily.NONE

    def strict_equal(self, other: NormalizedType) -> bool:
        return self.canonical == other.canonical

    def semantic_equal(self, other: NormalizedType) -> bool:
        if self.canonical == other.canonical:
            return True
        return self.numeric_family is not NumericFamily.NONE and self.numeric_family is other.numeric_family


def normalize_type(raw: str) -> NormalizedType:
    raw = raw.strip()
    tag = vocab.compact_type(raw)
    if not vocab.is_known_type(tag):
        return NormalizedType(raw)
    if tag in _INTEGER_TAGS:
        family = NumericFamily.INTEGER
    elif tag in _FLOAT_TAGS:
        family = NumericFamily.FLOAT
    else:
        family = NumericFamily.NONE
    return NormalizedType(vocab.expand_type(tag), family)


def _norm_name(name: str) -> str:
    return name.strip().casefold()


def _field_index(doc: CroissantDocument) -> dict[tuple[str, str], FieldDesc]:
    out: dict[tuple[str, str], FieldDesc] = {}
    for rs in doc.record_sets:
        for f in rs.fields:
            out.setdefault((_norm_name(rs.name), _norm_name(f.name)), f)
    return out


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def format_ratio(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


@dataclass(frozen=True)
class Disagreement:
    record_set: str
    field: str
    generated_type: str
    reference_type: str
    same_family: bool


@dataclass
class ComparisonReport:
    matched_fields: frozenset[tuple[str, str]]
    reference_total: int
    generated_total: int
    strict_matches: int
    semantic_matches: int
    matched_record_sets: frozenset[str]
    reference_record_sets: int
    disagreements: list[Disagreement] = field(default_factory=list)
    missing_fields: list[tuple[str, str]] = field(default_factory=list)
    """Reference fields with no generated counterpart."""
    extra_fields: list[tuple[str, str]] = field(default_factory=list)
    """Generated fields absent from the reference; informational only."""

    @property
    def field_recovery(self) -> float | None:
        return _ratio(len(self.matched_fields), self.reference_total)

    @property
    def strict_agreement(self) -> float | None:
        return _ratio(self.strict_matches, len(self.matched_fields))

    @property
    def semantic_agreement(self) -> float | None:
        return _ratio(self.semantic_matches, len(self.matched_fields))

    @property
    def recordset_recovery(self) -> float | None:
        return _ratio(len(self.matched_record_sets), self.reference_record_sets)

    def to_dict(self) -> dict[str, Any]:
        return {
            "field_recovery": self.field_recovery,
            "strict_agreement": self.strict_agreement,
            "semantic_agreement": self.semantic_agreement,
            "recordset_recovery": self.recordset_recovery,
            "matched_fields": len(self.matched_fields),
            "reference_fields": self.reference_total,
            "generated_fields": self.generated_total,
            "strict_matches": self.strict_matches,
            "semantic_matches": self.semantic_matches,
            "matched_record_sets": len(self.matched_record_sets),
            "reference_record_sets": self.reference_record_sets,
            "disagreements": [
                {"record_set": d.record_set, "field": d.field, "generated": d.generated_type,
                 "reference": d.reference_type, "same_family": d.same_family}
                for d in self.disagreements
            ],
            "missing_fields": [list(k) for k in self.missing_fields],
            "extra_fields": [list(k) for k in self.extra_fields],
        }

    def render(self) -> str:
        lines = [
            f"R_field\t{format_ratio(self.field_recovery)}\t({len(self.matched_fields)}/{self.reference_total})",
            f"T_strict\t{format_ratio(self.strict_agreement)}\t({self.strict_matches}/{len(self.matched_fields)})",
            f"T_sem\t{format_ratio(self.semantic_agreement)}\t({self.semantic_matches}/{len(self.matched_fields)})",
            f"recordset_recovery\t{format_ratio(self.recordset_recovery)}"
            f"\t({len(self.matched_record_sets)}/{self.reference_record_sets})",
        ]
        if self.disagreements:
            lines.append("")
            lines.append("record_set\tfield\tgenerated\treference\tsame_family")
            for d in self.disagreements:
                lines.append(f"{d.record_set}\t{d.field}\t{d.generated_type}\t{d.reference_type}\t{str(d.same_family).lower()}")
        if self.missing_fields:
            lines.append("")
            lines.append("missing from generated:")
            lines.extend(f"  {rs}\t{f}" for rs, f in self.missing_fields)
        return "\n".join(lines)


def compare_documents(generated: CroissantDocument, reference: CroissantDocument) -> ComparisonReport:
    gen = _field_index(generated)
    ref = _field_index(reference)
    matched = sorted(set(gen) & set(ref))
    strict = semantic = 0
    disagreements = []
    for key in matched:
        tg, tr = normalize_type(gen[key].data_type), normalize_type(ref[key].data_type)
        if tg.strict_equal(tr):
            strict += 1
            semantic += 1
            continue
        same = tg.semantic_equal(tr)
        semantic += same
        disagreements.append(Disagreement(key[0], key[1], gen[key].data_type, ref[key].data_type, same))
    gen_rs = {_norm_name(rs.name) for rs in generated.record_sets}
    ref_rs = {_norm_name(rs.name) for rs in reference.record_sets}
    return ComparisonReport(
        matched_fields=frozenset(matched),
        reference_total=len(ref),
        generated_total=len(gen),
        strict_matches=strict,
        semantic_matches=semantic,
        matched_record_sets=frozenset(gen_rs & ref_rs),
        reference_record_sets=len(ref_rs),
        disagreements=disagreements,
        missing_fields=sorted(set(ref) - set(gen)),
        extra_fields=sorted(set(gen) - set(ref)),
    )


# --------------------------------------------------------------------------
# packaging verification


def verify_packaging(
    document: CroissantDocument,
    root: str | os.PathLike[str],
    options=None,
    registry=None,
) -> list[Violation]:
    """Check a directory against a document's packaging contract.

    Rule codes: ``missing-file``, ``size-mismatch``, ``checksum-mismatch``,
    ``schema-drift``, plus any structural rule from :func:`validate_document`.
    Pass the same bake options (partition grouping, header mode) that produced
    the document so that re-extraction is comparable.
    """
    from .registry import extract_structure

    structural = validate_document(document)
    if structural:
        return structural

    skeleton, results, files, _ = extract_structure(Path(root), options, registry)
    on_disk = {f.relative_path: f for f in files}
    missing_components: dict[str, str] = {}
    for r in results:
        missing_components.update(r.missing)

    violations: list[Violation] = []
    missing: set[str] = set()
    drift_records: set[str] = set()
    for fo in document.file_objects:
        if fo.content_url in on_disk:
            continue
        missing.add(fo.content_url)
        record = missing_components.get(fo.content_url)
        if record is not None:
            if record not in drift_records:
                drift_records.add(record)
                violations.append(Violation(
                    "schema-drift", record,
                    f"record {record}: component {fo.content_url} is no longer present",
                ))
        else:
            violations.append(Violation("missing-file", fo.id, f"{fo.content_url} not found"))

    drifted_paths: set[str] = set()
    fresh = {_norm_name(rs.name): rs for rs in skeleton.record_sets}
    for rs in document.record_sets:
        backing = document.backing_paths(rs)
        if any(p in missing for p in backing) or rs.name in drift_records:
            continue
        current = fresh.get(_norm_name(rs.name))
        if current is None:
            violations.append(Violation("schema-drift", rs.id, f"record set {rs.name} is no longer extracted"))
            drifted_paths.update(backing)
            continue
        want = [f.name for f in rs.fields]
        have = [f.name for f in current.fields]
        if want != have:
            removed = [n for n in want if n not in have]
            added = [n for n in have if n not in want]
            parts = []
            if removed:
                parts.append("missing " + ", ".join(removed))
            if added:
                parts.append("unexpected " + ", ".join(added))
            if not parts:
                parts.append("field order changed")
            violations.append(Violation("schema-drift", rs.id, f"record set {rs.name}: {'; '.join(parts)}"))
            drifted_paths.update(backing)

    for fo in document.file_objects:
        f = on_disk.get(fo.content_url)
        if f is None or fo.content_url in drifted_paths:
            continue
        if str(f.byte_size) != fo.content_size:
            violations.append(Violation(
                "size-mismatch", fo.id, f"{fo.content_url}: {f.byte_size} bytes, expected {fo.content_size}"
            ))
        elif f.sha256 != fo.sha256:
            violations.append(Violation("checksum-mismatch", fo.id, f"{fo.content_url}: sha256 {f.sha256}"))
    return violations


# --------------------------------------------------------------------------
# schema diff


@dataclass(frozen=True)
class FieldChange:
    record_set: str
    field: str
    kind: str
    """``added`` (only in b), ``removed`` (only in a) or ``type-changed``."""
    type_a: str | None = None
    type_b: str | None = None


@dataclass
class SchemaDiff:
    only_in_a: list[str] = field(default_factory=list)
    only_in_b: list[str] = field(default_factory=list)
    field_changes: list[FieldChange] = field(default_factory=list)

    @property
    def is_empty(self) -> bool:
        return not (self.only_in_a or self.only_in_b or self.field_changes)

    def lines(self) -> list[str]:
        out = [f"- recordset\t{name}" for name in self.only_in_a]
        out += [f"+ recordset\t{name}" for name in self.only_in_b]
        for c in self.field_changes:
            if c.kind == "removed":
                out.append(f"- field\t{c.record_set}\t{c.field}\t{c.type_a}")
            elif c.kind == "added":
                out.append(f"+ field\t{c.record_set}\t{c.field}\t{c.type_b}")
            else:
                out.append(f"~ field\t{c.record_set}\t{c.field}\t{c.type_a} -> {c.type_b}")
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "only_in_a": self.only_in_a,
            "only_in_b": self.only_in_b,
            "field_changes": [c.__dict__ for c in self.field_changes],
        }


def schema_diff(doc_a: CroissantDocument, doc_b: CroissantDocument) -> SchemaDiff:
    """Record sets present on one side only, and per-field changes of shared ones."""
    a = {_norm_name(rs.name): rs for rs in doc_a.record_sets}
    b = {_norm_name(rs.name): rs for rs in doc_b.record_sets}
    diff = SchemaDiff(
        only_in_a=sorted(a[k].name for k in a.keys() - b.keys()),
        only_in_b=sorted(b[k].name for k in b.keys() - a.keys()),
    )
    for key in sorted(a.keys() & b.keys()):
        rs_name = a[key].name
        fa = {_norm_name(f.name): f for f in a[key].fields}
        fb = {_norm_name(f.name): f for f in b[key].fields}
        for k in fa:
            if k not in fb:
                diff.field_changes.append(FieldChange(rs_name, fa[k].name, "removed", fa[k].data_type))
            elif not normalize_type(fa[k].data_type).strict_equal(normalize_type(fb[k].data_type)):
                diff.field_changes.append(
                    FieldChange(rs_name, fa[k].name, "type-changed", fa[k].data_type, fb[k].data_type)
                )
        for k in fb:
            if k not in fa:
                diff.field_changes.append(FieldChange(rs_name, fb[k].name, "added", None, fb[k].data_type))
    return diff
