"""Local-first Croissant 1.1 JSON-LD metadata generation.

Typical use::

    from croissant_local import SemanticMetadata, bake

    result = bake("data/mimic-iv-demo", SemanticMetadata(name="MIMIC-IV Demo"))
    open("out.json", "wb").write(result.jsonld)
"""

from __future__ import annotations

__version__ = "0.1.0"

from .discovery import DiscoveredFile, discover_files, hash_file
from .errors import (
    ConfigurationError,
    CroissantError,
    DocumentValidationError,
    InvariantError,
    NoSupportedFilesError,
    UsageError,
)
from .extraction import ExtractionResult, FieldDraft, FileRef, FileSetDraft, RecordSetDraft
from .inference import TypeLatticeState, ValueClass, classify_value, join_types, resolve_column
from .mappings import apply_field_mappings, load_field_mappings
from .metrics import (
    ComparisonReport,
    NormalizedType,
    SchemaDiff,
    compare_documents,
    normalize_type,
    schema_diff,
    verify_packaging,
)
from .model import (
    CroissantDocument,
    FieldDesc,
    FileObjectDesc,
    FileSetDesc,
    RaiMetadata,
    RecordSetDesc,
    SemanticMetadata,
    Violation,
    assign_identifiers,
    from_jsonld,
    load_document,
    merge_semantic,
    serialize_jsonld,
    to_jsonld,
    validate_document,
)
from .registry import (
    BakeOptions,
    BakeResult,
    ExtractContext,
    HandlerDescriptor,
    HandlerRegistry,
    default_registry,
    extract_structure,
    run_pipeline,
)

bake = run_pipeline

__all__ = [
    "__version__",
    "bake",
    "BakeOptions",
    "BakeResult",
    "ComparisonReport",
    "ConfigurationError",
    "CroissantDocument",
    "CroissantError",
    "DiscoveredFile",
    "DocumentValidationError",
    "ExtractContext",
    "ExtractionResult",
    "FieldDesc",
    "FieldDraft",
    "FileObjectDesc",
    "FileRef",
    "FileSetDesc",
    "FileSetDraft",
    "HandlerDescriptor",
    "HandlerRegistry",
    "InvariantError",
    "NoSupportedFilesError",
    "NormalizedType",
    "RaiMetadata",
    "RecordSetDesc",
    "RecordSetDraft",
    "SchemaDiff",
    "SemanticMetadata",
    "TypeLatticeState",
    "UsageError",
    "ValueClass",
    "Violation",
    "apply_field_mappings",
    "assign_identifiers",
    "classify_value",
    "compare_documents",
    "default_registry",
    "discover_files",
    "extract_structure",
    "from_jsonld",
    "hash_file",
    "join_types",
    "load_document",
    "load_field_mappings",
    "merge_semantic",
    "normalize_type",
    "resolve_column",
    "run_pipeline",
    "schema_diff",
    "serialize_jsonld",
    "to_jsonld",
    "validate_document",
    "verify_packaging",
]
