"""Handler output types, before identifiers are assigned.

Handlers refer to files by their relative path and to file sets by a key of
their choosing; :func:`croissant_local.model.assign_identifiers` turns these
drafts into the final document with ``file_{i}``/``recordset_{i}`` ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

__all__ = ["FileRef", "FileSetDraft", "FieldDraft", "RecordSetDraft", "ExtractionResult"]


@dataclass(frozen=True)
class FileRef:
    path: str
    encoding_format: str


@dataclass(frozen=True)
class FileSetDraft:
    key: str
    name: str
    members: tuple[str, ...]
    encoding_format: str


@dataclass(frozen=True)
class FieldDraft:
    name: str
    data_type: str
    source: str
    """Relative path of the backing file, or a :class:`FileSetDraft` key."""
    source_kind: str = "fileObject"
    extract_kind: str = "column"
    extract_value: str | None = None
    description: str | None = None

    @property
    def locator(self) -> str:
        return self.extract_value if self.extract_value is not None else self.name


@dataclass(frozen=True)
class RecordSetDraft:
    name: str
    fields: tuple[FieldDraft, ...]
    primary: str
    """Relative path whose discovery index the record set id shares."""
    description: str | None = None


@dataclass
class ExtractionResult:
    file_objects: list[FileRef] = field(default_factory=list)
    file_sets: list[FileSetDraft] = field(default_factory=list)
    record_sets: list[RecordSetDraft] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    missing: dict[str, str] = field(default_factory=dict)
    """Referenced component paths absent on disk, mapped to their record name."""
    profiles: list[Any] = field(default_factory=list)
    """Handler-specific parsed structures (headers, schemas), for library users."""

    @property
    def consumed_paths(self) -> set[str]:
        return {f.path for f in self.file_objects}

    def extend(self, other: ExtractionResult) -> None:
        self.file_objects.extend(other.file_objects)
        self.file_sets.extend(other.file_sets)
        self.record_sets.extend(other.record_sets)
        self.warnings.extend(other.warnings)
        self.missing.update(other.missing)
        self.profiles.extend(other.profiles)
