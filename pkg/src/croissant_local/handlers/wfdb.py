"""WFDB handler: ``.hea`` headers grouped with their ``.dat`` signal and ``.atr`` annotation files.

Only the header text is read; signal samples and annotations are never decoded.
"""

from __future__ import annotations

import logging
import posixpath
from dataclasses import dataclass, field
from typing import Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from ..fileio import media_type

log = logging.getLogger(__name__)

EXTENSIONS = (".hea", ".dat", ".atr")
DEFAULT_GAIN = 200.0
DEFAULT_FREQUENCY = 250.0


class WfdbHeaderError(ValueError):
    pass


@dataclass(frozen=True)
class WfdbSignal:
    file_name: str
    format_code: str
    gain: float
    units: str | None
    description: str


@dataclass
class WfdbHeader:
    record_name: str
    num_signals: int
    sampling_frequency: float
    num_samples: int | None
    signals: list[WfdbSignal] = field(default_factory=list)
    num_segments: int | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def is_multi_segment(self) -> bool:
        return self.num_segments is not None

    @property
    def lead_names(self) -> list[str]:
        return [s.description for s in self.signals]


def _number(token: str) -> float:
    return float(token.split("/")[0].split("(")[0])


def _parse_record_line(tokens: list[str]) -> tuple[str, int | None, int, float, int | None]:
    if len(tokens) < 2:
        raise WfdbHeaderError("record line needs at least a name and a signal count")
    name, _, seg = tokens[0].partition("/")
    try:
        segments = int(seg) if seg else None
        nsig = int(tokens[1])
        fs = _number(tokens[2]) if len(tokens) > 2 else DEFAULT_FREQUENCY
        nsamp = int(tokens[3]) if len(tokens) > 3 else None
    except ValueError as exc:
        raise WfdbHeaderError(f"malformed record line: {' '.join(tokens)}") from exc
    if nsig < 0:
        raise WfdbHeaderError("negative signal count")
    if fs <= 0:
        raise WfdbHeaderError("sampling frequency must be positive")
    return name, segments, nsig, fs, nsamp


def _parse_signal_line(tokens: list[str], index: int) -> WfdbSignal:
    if len(tokens) < 2:
        raise WfdbHeaderError(f"signal line {index} needs a file name and a format")
    fmt = tokens[1].split("x")[0].split(":")[0].split("+")[0]
    gain, units = DEFAULT_GAIN, None
    if len(tokens) > 2:
        gain_tok, _, units = tokens[2].partition("/")
        try:
            gain = float(gain_tok.split("(")[0])
        except ValueError as exc:
            raise WfdbHeaderError(f"signal line {index}: bad gain {tokens[2]!r}") from exc
        units = units or None
        if gain == 0:
            gain = DEFAULT_GAIN
    description = " ".join(tokens[8:]) if len(tokens) > 8 else f"signal_{index}"
    return WfdbSignal(tokens[0], fmt, gain, units, description)


def parse_wfdb_text(text: str) -> WfdbHeader:
    """Parse header text: a record line, then one line per signal. ``#`` lines are comments."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line.split())
    if not lines:
        raise WfdbHeaderError("header has no record line")
    name, segments, nsig, fs, nsamp = _parse_record_line(lines[0])
    header = WfdbHeader(name, nsig, fs, nsamp, num_segments=segments)
    if segments is not None:
        header.warnings.append(f"record {name}: multi-segment layout; signal grouping skipped")
        return header
    body = lines[1:]
    if len(body) < nsig:
        header.warnings.append(f"record {name}: header declares {nsig} signals but lists {len(body)}")
    elif len(body) > nsig:
        header.warnings.append(f"record {name}: {len(body) - nsig} extra signal line(s) ignored")
    for i, tokens in enumerate(body[:nsig]):
        header.signals.append(_parse_signal_line(tokens, i))
    return header


def parse_wfdb_header(file: DiscoveredFile) -> WfdbHeader:
    try:
        with open(file.absolute_path, encoding="utf-8", errors="strict") as fh:
            text = fh.read()
    except (UnicodeDecodeError, OSError) as exc:
        raise WfdbHeaderError(f"cannot read header: {exc}") from exc
    return parse_wfdb_text(text)


def _unique(names: list[str]) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for n in names:
        k = seen.get(n, 0)
        seen[n] = k + 1
        out.append(n if k == 0 else f"{n}_{k + 1}")
    return out


def _fmt_num(x: float) -> str:
    return f"{x:g}"


def group_wfdb_record(
    header: WfdbHeader,
    header_path: str,
    siblings: dict[str, DiscoveredFile],
    already_claimed: set[str] | frozenset[str] = frozenset(),
) -> ExtractionResult:
    """FileObjects for the header and its component files plus one signal RecordSet.

    ``siblings`` maps relative path to file for everything discovered in the
    header's directory.
    """
    result = ExtractionResult()
    result.warnings.extend(f"{header_path}: {w}" for w in header.warnings)
    directory = posixpath.dirname(header_path)
    stem = posixpath.basename(header_path)[: -len(".hea")]

    def rel(name: str) -> str:
        return posixpath.join(directory, name) if directory else name

    result.file_objects.append(FileRef(header_path, media_type(header_path)))
    components: list[str] = []
    for sig in header.signals:
        path = rel(sig.file_name)
        if path not in components and path != header_path:
            components.append(path)
    atr = rel(f"{stem}.atr")
    if atr in siblings and atr not in components:
        components.append(atr)
    present = set()
    for path in components:
        if path in siblings:
            # a component shared with an earlier record stays with that record
            if path not in already_claimed:
                result.file_objects.append(FileRef(path, media_type(path)))
            present.add(path)
        else:
            result.missing[path] = header.record_name
            result.warnings.append(f"record {header.record_name}: referenced file {path} is missing")

    names = _unique([s.description for s in header.signals])
    fields = []
    for name, sig in zip(names, header.signals):
        source = rel(sig.file_name)
        if source not in present:
            source = header_path
        units = f" {sig.units}" if sig.units else ""
        fields.append(
            FieldDraft(
                name=name,
                data_type="sc:Float",
                source=source,
                description=(
                    f"sampling_frequency={_fmt_num(header.sampling_frequency)} Hz; "
                    f"gain={_fmt_num(sig.gain)} adu/{units.strip() or 'mV'}; format={sig.format_code}"
                ),
            )
        )
    samples = f"; samples={header.num_samples}" if header.num_samples is not None else ""
    result.record_sets.append(
        RecordSetDraft(
            name=header.record_name,
            fields=tuple(fields),
            primary=header_path,
            description=(
                f"WFDB record; signals={header.num_signals}; "
                f"sampling_frequency={_fmt_num(header.sampling_frequency)} Hz{samples}"
            ),
        )
    )
    result.profiles.append(header)
    return result


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    by_dir: dict[str, dict[str, DiscoveredFile]] = {}
    for f in ctx.files:
        by_dir.setdefault(f.parent, {})[f.relative_path] = f
    claimed: set[str] = set()
    for f in sorted(files, key=lambda f: f.relative_path):
        if not f.name.lower().endswith(".hea"):
            continue
        try:
            header = parse_wfdb_header(f)
        except WfdbHeaderError as exc:
            out.warnings.append(f"skipped {f.relative_path}: {exc}")
            continue
        record = group_wfdb_record(header, f.relative_path, by_dir.get(f.parent, {}), claimed)
        claimed |= record.consumed_paths
        out.extend(record)
    for f in files:
        if f.relative_path not in claimed:
            out.warnings.append(f"no WFDB header references {f.relative_path}")
    return out
