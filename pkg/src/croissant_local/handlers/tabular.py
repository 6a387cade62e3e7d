"""CSV/TSV handler, including gzip, bzip2 and xz compressed variants."""

from __future__ import annotations

import csv
import logging
import lzma
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from ..fileio import inner_suffix, media_type, open_text, split_compression
from ..inference import ColumnAccumulator, TypeLatticeState, classify_value, resolve_column
from . import record_set_name

log = logging.getLogger(__name__)

csv.field_size_limit(sys.maxsize)

EXTENSIONS = tuple(
    f"{ext}{comp}" for ext in (".csv", ".tsv") for comp in ("", ".gz", ".bz2", ".xz")
)

_FORMAT_LABEL = {".csv": "CSV", ".tsv": "TSV"}


@dataclass
class TabularFileProfile:
    delimiter: str
    compression: str | None
    header: list[str]
    row_count: int = 0
    column_states: list[TypeLatticeState] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


class TabularError(ValueError):
    pass


def _unique_header(raw: list[str], warnings: list[str], rel: str) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for i, name in enumerate(raw):
        name = name.strip() or f"col_{i}"
        base, k = name, 1
        while name in seen:
            name = f"{base}_{k}"
            k += 1
        if name != base:
            warnings.append(f"{rel}: duplicate column name {base!r} renamed to {name!r}")
        seen.add(name)
        out.append(name)
    return out


def profile_tabular(
    path: str | Path,
    name: str,
    sample_rows: int | None = 1000,
    no_header: bool = False,
) -> TabularFileProfile:
    """Stream a delimited file once: count every row, classify the first ``sample_rows``."""
    inner, compression = split_compression(name)
    delimiter = "\t" if inner_suffix(inner) == ".tsv" else ","
    warnings: list[str] = []
    try:
        with open_text(path, name) as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            first = next(reader, None)
            if first is None:
                raise TabularError("file is empty")
            if no_header:
                header = [f"col_{i}" for i in range(len(first))]
                pending = [first]
            else:
                if not first or all(not c.strip() for c in first):
                    raise TabularError("header row is empty")
                header = _unique_header(first, warnings, name)
                pending = []
            width = len(header)
            accs = [ColumnAccumulator() for _ in header]
            rows = 0
            ragged = 0

            def consume(row: list[str]) -> None:
                nonlocal rows, ragged
                if not row:
                    return
                rows += 1
                if len(row) > width:
                    ragged += 1
                if sample_rows is None or rows <= sample_rows:
                    for acc, value in zip(accs, row):
                        acc.add(classify_value(value, urls=False))

            for row in pending:
                consume(row)
            for row in reader:
                consume(row)
    except UnicodeDecodeError as exc:
        raise TabularError(f"not valid UTF-8 text ({exc.reason})") from exc
    except (csv.Error, EOFError, lzma.LZMAError, OSError) as exc:
        raise TabularError(str(exc)) from exc
    if ragged:
        warnings.append(f"{name}: {ragged} row(s) have more fields than the header; extra values ignored")
    return TabularFileProfile(delimiter, compression, header, rows, [a.state() for a in accs], warnings)


def extract_tabular(file: DiscoveredFile, sample_rows: int | None = 1000, no_header: bool = False) -> ExtractionResult:
    result = ExtractionResult()
    try:
        profile = profile_tabular(file.absolute_path, file.name, sample_rows, no_header)
    except TabularError as exc:
        result.warnings.append(f"skipped {file.relative_path}: {exc}")
        return result
    result.warnings.extend(profile.warnings)
    rel = file.relative_path
    inner, compression = split_compression(file.name)
    label = _FORMAT_LABEL[inner_suffix(inner)]
    wrapper = f", {compression}-compressed" if compression else ""
    fields = tuple(
        FieldDraft(name=col, data_type=resolve_column(state), source=rel)
        for col, state in zip(profile.header, profile.column_states)
    )
    result.file_objects.append(FileRef(rel, media_type(file.name)))
    result.record_sets.append(
        RecordSetDraft(
            name=record_set_name(file.name),
            fields=fields,
            primary=rel,
            description=f"{label} table{wrapper}; rows={profile.row_count}",
        )
    )
    result.profiles.append(profile)
    return result


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    for f in files:
        out.extend(extract_tabular(f, ctx.options.row_budget(), ctx.options.no_header))
    return out
