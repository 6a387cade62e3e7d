"""Post-inference field mappings: ``equivalentProperty`` links and extra data type URIs.

A mapping file is a JSON object keyed by field ``@id``::

    {"file_13_subject_id": {"equivalentProperty": ["https://w3id.org/..."],
                            "extraDataTypes": ["https://..."]}}

A key may instead name ``"<recordset name>::<field name>"``.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Any, Mapping

from .errors import UsageError
from .model import CroissantDocument, FieldDesc

__all__ = ["load_field_mappings", "apply_field_mappings"]

_EQUIV_KEYS = ("equivalentProperty", "equivalent_property")
_EXTRA_KEYS = ("extraDataTypes", "extra_data_types", "dataType")


def load_field_mappings(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read field mappings {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("field mappings must be a JSON object keyed by field id")
    return data


def _uris(entry: Mapping[str, Any], keys: tuple[str, ...]) -> tuple[str, ...]:
    for k in keys:
        if k in entry:
            v = entry[k]
            values = v if isinstance(v, list) else [v]
            if not all(isinstance(x, str) for x in values):
                raise UsageError(f"field mapping {k} must be a URI or list of URIs")
            return tuple(values)
    return ()


def apply_field_mappings(
    document: CroissantDocument, mappings: Mapping[str, Any]
) -> tuple[CroissantDocument, list[str]]:
    """Return a new document with mappings attached, plus warnings for unmatched keys."""
    by_key: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {}
    for key, entry in mappings.items():
        if not isinstance(entry, Mapping):
            raise UsageError(f"field mapping for {key!r} must be an object")
        by_key[key] = (_uris(entry, _EQUIV_KEYS), _uris(entry, _EXTRA_KEYS))

    used: set[str] = set()
    record_sets = []
    for rs in document.record_sets:
        fields: list[FieldDesc] = []
        for f in rs.fields:
            for key in (f.id, f"{rs.name}::{f.name}"):
                if key in by_key:
                    used.add(key)
                    equiv, extra = by_key[key]
                    f = replace(
                        f,
                        equivalent_property=tuple(dict.fromkeys(f.equivalent_property + equiv)),
                        extra_data_types=tuple(dict.fromkeys(f.extra_data_types + extra)),
                    )
            fields.append(f)
        record_sets.append(replace(rs, fields=tuple(fields)))
    warnings = [f"field mapping {k!r} matches no field" for k in by_key if k not in used]
    return replace(document, record_sets=tuple(record_sets)), warnings
