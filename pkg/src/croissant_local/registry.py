"""Handler registry, dispatch, and the bake pipeline.

The pipeline runs discover -> hash -> dispatch -> extract -> assemble ->
merge -> validate -> serialize. Each handler receives every file dispatched
to it in one call, so handlers that group several files into one logical
record (WFDB records, FHIR resource types, Parquet partitions, the image
summary) can do so deterministically.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence, Union

from .discovery import DiscoveredFile, discover_files
from .errors import ConfigurationError, DocumentValidationError, InvariantError, NoSupportedFilesError
from .extraction import ExtractionResult
from .fileio import read_prefix
from .model import (
    CroissantDocument,
    SemanticMetadata,
    assign_identifiers,
    merge_semantic,
    serialize_jsonld,
    validate_document,
)

__all__ = [
    "BakeOptions",
    "ExtractContext",
    "HandlerDescriptor",
    "HandlerRegistry",
    "BakeResult",
    "default_registry",
    "extract_structure",
    "run_pipeline",
]

log = logging.getLogger(__name__)

SNIFF_WINDOW = 8192


@dataclass(frozen=True)
class BakeOptions:
    sample_rows: int = 1000
    """Data rows sampled per delimited file for type inference."""
    sample_records: int = 200
    """Records sampled per JSON array / JSON Lines / NDJSON file."""
    deep_sample: bool = False
    """Scan every row/record instead of the sample budget."""
    group_partitions: bool = False
    no_header: bool = False
    max_depth: int = 32
    workers: int | None = None
    field_mappings: Mapping | Sequence | None = None

    def row_budget(self) -> int | None:
        return None if self.deep_sample else self.sample_rows

    def record_budget(self) -> int | None:
        return None if self.deep_sample else self.sample_records


@dataclass
class ExtractContext:
    root: Path
    files: Sequence[DiscoveredFile]
    options: BakeOptions = field(default_factory=BakeOptions)

    def __post_init__(self) -> None:
        self._by_path = {f.relative_path: f for f in self.files}

    def lookup(self, relative_path: str) -> DiscoveredFile | None:
        return self._by_path.get(relative_path)

    @property
    def root_name(self) -> str:
        return self.root.resolve().name or "root"


ExtractFn = Callable[[Sequence[DiscoveredFile], ExtractContext], ExtractionResult]


@dataclass(frozen=True)
class HandlerDescriptor:
    name: str
    extension_patterns: tuple[str, ...]
    extract: ExtractFn
    sniff: Callable[[bytes, DiscoveredFile], bool] | None = None
    priority: int = 0

    def matches_extension(self, filename: str) -> bool:
        low = filename.lower()
        return any(low.endswith(p) for p in self.extension_patterns)


Prefix = Union[bytes, Callable[[], bytes]]


class HandlerRegistry:
    """Ordered dispatch table: higher priority first, then registration order."""

    def __init__(self) -> None:
        self._handlers: list[tuple[int, int, HandlerDescriptor]] = []

    def register(self, descriptor: HandlerDescriptor) -> HandlerRegistry:
        if any(h.name == descriptor.name for _, _, h in self._handlers):
            raise ConfigurationError(f"handler already registered: {descriptor.name}")
        self._handlers.append((-descriptor.priority, len(self._handlers), descriptor))
        self._handlers.sort(key=lambda t: (t[0], t[1]))
        return self

    @property
    def handlers(self) -> list[HandlerDescriptor]:
        return [h for _, _, h in self._handlers]

    def get(self, name: str) -> HandlerDescriptor:
        for h in self.handlers:
            if h.name == name:
                return h
        raise KeyError(name)

    def dispatch(self, file: DiscoveredFile, prefix: Prefix) -> str | None:
        """Name of the first handler whose extension and sniff both accept ``file``."""
        cached: bytes | None = None
        for h in self.handlers:
            if not h.matches_extension(file.name):
                continue
            if h.sniff is None:
                return h.name
            if cached is None:
                cached = prefix() if callable(prefix) else prefix
            try:
                accepted = h.sniff(cached, file)
            except Exception as exc:  # a broken sniffer must not abort the bake
                log.debug("sniff %s failed on %s: %s", h.name, file.relative_path, exc)
                accepted = False
            if accepted:
                return h.name
        return None


def default_registry() -> HandlerRegistry:
    from .handlers import builtin_handlers

    registry = HandlerRegistry()
    for h in builtin_handlers():
        registry.register(h)
    return registry


@dataclass
class BakeResult:
    document: CroissantDocument
    warnings: list[str]
    results: list[ExtractionResult]
    files: list[DiscoveredFile]
    elapsed: float = 0.0

    @property
    def jsonld(self) -> bytes:
        return serialize_jsonld(self.document)


def _dispatch_all(files, registry, warnings) -> dict[str, list[DiscoveredFile]]:
    groups: dict[str, list[DiscoveredFile]] = {h.name: [] for h in registry.handlers}
    for f in files:
        name = registry.dispatch(f, lambda f=f: read_prefix(f.absolute_path, SNIFF_WINDOW, f.name))
        if name is not None:
            groups[name].append(f)
    return groups


def extract_structure(
    root: str | os.PathLike[str],
    options: BakeOptions | None = None,
    registry: HandlerRegistry | None = None,
) -> tuple[CroissantDocument, list[ExtractionResult], list[DiscoveredFile], list[str]]:
    """Discover, dispatch, extract and assemble; no semantic merge or validation."""
    options = options or BakeOptions()
    registry = registry if registry is not None else default_registry()
    warnings: list[str] = []
    files = discover_files(root, warnings, workers=options.workers)
    ctx = ExtractContext(Path(root), files, options)

    groups = _dispatch_all(files, registry, warnings)
    results: list[ExtractionResult] = []
    for h in registry.handlers:
        batch = groups[h.name]
        if not batch:
            continue
        try:
            result = h.extract(batch, ctx)
        except Exception as exc:
            # per-file failures are handled inside handlers; this is the backstop
            warnings.append(f"handler {h.name} failed: {exc}")
            continue
        warnings.extend(result.warnings)
        results.append(result)

    consumed: set[str] = set()
    for r in results:
        overlap = consumed & r.consumed_paths
        if overlap:
            raise InvariantError(f"paths claimed by two handlers: {sorted(overlap)}")
        consumed |= r.consumed_paths
    dispatched = {f.relative_path for batch in groups.values() for f in batch}
    for f in files:
        if f.relative_path not in consumed and f.relative_path not in dispatched:
            warnings.append(f"no handler for {f.relative_path}")

    skeleton = assign_identifiers(results, files)
    return skeleton, results, files, warnings


def run_pipeline(
    root: str | os.PathLike[str],
    semantic: SemanticMetadata,
    options: BakeOptions | None = None,
    registry: HandlerRegistry | None = None,
) -> BakeResult:
    """Bake a validated Croissant document for the directory ``root``.

    Raises :class:`NoSupportedFilesError` when no handler produced anything
    and :class:`DocumentValidationError` if the assembled document is invalid.
    """
    start = time.perf_counter()
    options = options or BakeOptions()
    skeleton, results, files, warnings = extract_structure(root, options, registry)
    if not skeleton.file_objects:
        raise NoSupportedFilesError()
    document = merge_semantic(skeleton, semantic)
    if options.field_mappings:
        from .mappings import apply_field_mappings

        document, mapping_warnings = apply_field_mappings(document, options.field_mappings)
        warnings.extend(mapping_warnings)
    violations = validate_document(document)
    if violations:
        raise DocumentValidationError(violations)
    return BakeResult(document, warnings, results, files, time.perf_counter() - start)
