"""Namespaces, the JSON-LD context block and the Croissant data type vocabulary."""

from __future__ import annotations

SCHEMA_ORG = "https://schema.org/"
SCHEMA_ORG_HTTP = "http://schema.org/"
CROISSANT = "http://mlcommons.org/croissant/"
RAI = "http://mlcommons.org/croissant/RAI/"

CROISSANT_1_1 = "http://mlcommons.org/croissant/1.1"
RAI_1_0 = "http://mlcommons.org/croissant/RAI/1.0"

CONTEXT: dict[str, str] = {
    "@language": "en",
    "@vocab": SCHEMA_ORG,
    "cr": CROISSANT,
    "rai": RAI,
    "sc": SCHEMA_ORG,
}

DATA_TYPES: tuple[str, ...] = (
    "sc:Text",
    "sc:Boolean",
    "sc:Integer",
    "sc:Float",
    "sc:Date",
    "sc:DateTime",
    "sc:Time",
    "sc:URL",
    "sc:ImageObject",
    "cr:Int8",
    "cr:Int16",
    "cr:Int32",
    "cr:Int64",
    "cr:UInt8",
    "cr:UInt16",
    "cr:UInt32",
    "cr:UInt64",
    "cr:Float16",
    "cr:Float32",
    "cr:Float64",
)
DATA_TYPE_SET = frozenset(DATA_TYPES)

_PREFIXES = {"sc": SCHEMA_ORG, "cr": CROISSANT}


def expand_type(tag: str) -> str:
    """``sc:Integer`` -> ``https://schema.org/Integer``; full URIs pass through."""
    prefix, sep, local = tag.partition(":")
    if sep and prefix in _PREFIXES and not local.startswith("//"):
        return _PREFIXES[prefix] + local
    return tag


def compact_type(uri: str) -> str:
    """Inverse of :func:`expand_type`; also accepts the ``http://schema.org/`` spelling."""
    for base, prefix in ((SCHEMA_ORG, "sc"), (SCHEMA_ORG_HTTP, "sc"), (CROISSANT, "cr")):
        if uri.startswith(base):
            local = uri[len(base):]
            if local and "/" not in local:
                return f"{prefix}:{local}"
    return uri


def is_known_type(tag: str) -> bool:
    return compact_type(tag) in DATA_TYPE_SET
