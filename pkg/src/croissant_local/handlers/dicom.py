"""DICOM Part 10 handler, header only.

Elements are read one at a time from an unbuffered file so that nothing past
the PixelData element header is ever requested. Explicit and implicit VR
little endian are supported; big endian and deflated transfer syntaxes are
reported and produce a FileObject without a record set.
"""

from __future__ import annotations

import io
import logging
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from ..fileio import media_type
from . import record_set_name

log = logging.getLogger(__name__)

EXTENSIONS = (".dcm", ".dicom")
PREAMBLE = 128
MAGIC = b"DICM"

IMPLICIT_LE = "1.2.840.10008.1.2"
EXPLICIT_LE = "1.2.840.10008.1.2.1"
DEFLATED_LE = "1.2.840.10008.1.2.1.99"
EXPLICIT_BE = "1.2.840.10008.1.2.2"

PIXEL_DATA = (0x7FE0, 0x0010)
ITEM = (0xFFFE, 0xE000)
ITEM_END = (0xFFFE, 0xE00D)
SEQUENCE_END = (0xFFFE, 0xE0DD)
UNDEFINED = 0xFFFFFFFF

# VRs whose explicit encoding uses 2 reserved bytes and a 32-bit length
_LONG_VRS = {b"OB", b"OD", b"OF", b"OL", b"OV", b"OW", b"SQ", b"UC", b"UN", b"UR", b"UT", b"SV", b"UV"}

# Bundled subset of the PS3.6 data dictionary: every tag this handler emits.
PS36_KEYWORDS: dict[tuple[int, int], tuple[str, str]] = {
    (0x0002, 0x0010): ("TransferSyntaxUID", "UI"),
    (0x0008, 0x0016): ("SOPClassUID", "UI"),
    (0x0008, 0x0060): ("Modality", "CS"),
    (0x0020, 0x000D): ("StudyInstanceUID", "UI"),
    (0x0020, 0x000E): ("SeriesInstanceUID", "UI"),
    (0x0028, 0x0004): ("PhotometricInterpretation", "CS"),
    (0x0028, 0x0008): ("NumberOfFrames", "IS"),
    (0x0028, 0x0010): ("Rows", "US"),
    (0x0028, 0x0011): ("Columns", "US"),
    (0x0028, 0x0100): ("BitsAllocated", "US"),
}

# emission order of the core attribute list
CORE_ATTRIBUTES = (
    (0x0008, 0x0016),
    (0x0008, 0x0060),
    (0x0028, 0x0010),
    (0x0028, 0x0011),
    (0x0028, 0x0008),
    (0x0028, 0x0100),
    (0x0028, 0x0004),
    (0x0020, 0x000D),
    (0x0020, 0x000E),
    (0x0002, 0x0010),
)
_COUNT_KEYWORDS = {"Rows", "Columns", "NumberOfFrames", "BitsAllocated"}


class DicomError(ValueError):
    pass


class UnsupportedTransferSyntax(DicomError):
    pass


def format_tag(tag: tuple[int, int]) -> str:
    return f"({tag[0]:04X},{tag[1]:04X})"


def keyword_for(tag: tuple[int, int]) -> str | None:
    entry = PS36_KEYWORDS.get(tag)
    return entry[0] if entry else None


@dataclass
class DicomProfile:
    transfer_syntax: str
    attributes: list[tuple[tuple[int, int], str, str]] = field(default_factory=list)
    """(tag, keyword, value as text) in core-list order."""
    stopped_at_pixel_data: bool = False
    bytes_read: int = 0

    def value(self, keyword: str) -> str | None:
        for _, kw, v in self.attributes:
            if kw == keyword:
                return v
        return None


class _Reader:
    """Exact-size reads over an unbuffered stream, counting consumed bytes."""

    def __init__(self, fh: BinaryIO) -> None:
        self.fh = fh
        self.pos = 0

    def read(self, n: int) -> bytes:
        chunks = []
        remaining = n
        while remaining:
            chunk = self.fh.read(remaining)
            if not chunk:
                break
            chunks.append(chunk)
            remaining -= len(chunk)
        data = b"".join(chunks)
        self.pos += len(data)
        return data

    def exact(self, n: int) -> bytes:
        data = self.read(n)
        if len(data) != n:
            raise DicomError("unexpected end of file")
        return data

    def skip(self, n: int) -> None:
        self.fh.seek(n, io.SEEK_CUR)
        self.pos += n


def _decode(raw: bytes, vr: str) -> str:
    if vr == "US":
        return str(struct.unpack("<H", raw[:2])[0]) if len(raw) >= 2 else ""
    text = raw.decode("ascii", "replace").rstrip("\x00 ").strip()
    if vr == "IS":
        return text.split("\\")[0].strip()
    return text


def _element_header(r: _Reader, explicit: bool) -> tuple[tuple[int, int], bytes | None, int] | None:
    head = r.read(4)
    if not head:
        return None
    if len(head) < 4:
        raise DicomError("truncated element tag")
    group, elem = struct.unpack("<HH", head)
    tag = (group, elem)
    if group == 0xFFFE:
        # item and delimiter tags never carry a VR
        return tag, None, struct.unpack("<I", r.exact(4))[0]
    if explicit:
        vr = r.exact(2)
        if vr in _LONG_VRS:
            r.exact(2)
            length = struct.unpack("<I", r.exact(4))[0]
        else:
            length = struct.unpack("<H", r.exact(2))[0]
        return tag, vr, length
    return tag, None, struct.unpack("<I", r.exact(4))[0]


def _skip_undefined(r: _Reader, explicit: bool, depth: int = 0) -> None:
    """Consume an undefined-length sequence or item body up to its delimiter."""
    if depth > 32:
        raise DicomError("sequence nesting too deep")
    while True:
        header = _element_header(r, explicit)
        if header is None:
            raise DicomError("unterminated sequence")
        tag, _, length = header
        if tag in (SEQUENCE_END, ITEM_END):
            return
        if length == UNDEFINED:
            _skip_undefined(r, explicit, depth + 1)
        else:
            r.skip(length)


def read_dicom_header(path) -> DicomProfile:
    """Parse file meta information and the dataset up to (not into) PixelData."""
    with open(path, "rb", buffering=0) as fh:
        r = _Reader(fh)
        pre = r.read(PREAMBLE + 4)
        if len(pre) < PREAMBLE + 4 or pre[PREAMBLE:] != MAGIC:
            raise DicomError("missing DICM magic after 128-byte preamble")

        values: dict[tuple[int, int], str] = {}
        transfer_syntax = ""
        # file meta group 0002 is always explicit VR little endian
        while True:
            mark = r.pos
            peek = r.read(2)
            if len(peek) < 2:
                raise DicomError("file ends inside file meta information")
            if struct.unpack("<H", peek)[0] != 0x0002:
                fh.seek(mark)
                r.pos = mark
                break
            fh.seek(mark)
            r.pos = mark
            tag, vr, length = _element_header(r, True)
            raw = r.exact(length)
            if tag == (0x0002, 0x0010):
                transfer_syntax = _decode(raw, "UI")
                values[tag] = transfer_syntax
        if transfer_syntax in (EXPLICIT_BE, DEFLATED_LE):
            raise UnsupportedTransferSyntax(f"transfer syntax {transfer_syntax} not supported")
        explicit = transfer_syntax != IMPLICIT_LE
        profile = DicomProfile(transfer_syntax)

        while True:
            header = _element_header(r, explicit)
            if header is None:
                break
            tag, vr, length = header
            if tag == PIXEL_DATA:
                profile.stopped_at_pixel_data = True
                break
            if length == UNDEFINED:
                _skip_undefined(r, explicit)
                continue
            if tag in PS36_KEYWORDS and tag not in values:
                values[tag] = _decode(r.exact(length), PS36_KEYWORDS[tag][1])
            else:
                r.skip(length)
        profile.bytes_read = r.pos

    for tag in CORE_ATTRIBUTES:
        if tag in values and values[tag] != "":
            profile.attributes.append((tag, PS36_KEYWORDS[tag][0], values[tag]))
    return profile


def extract_dicom(file: DiscoveredFile) -> ExtractionResult:
    result = ExtractionResult()
    rel = file.relative_path
    result.file_objects.append(FileRef(rel, media_type(file.name)))
    try:
        profile = read_dicom_header(file.absolute_path)
    except DicomError as exc:
        result.warnings.append(f"{rel}: {exc}; FileObject only")
        return result
    except (OSError, struct.error) as exc:
        result.warnings.append(f"{rel}: DICOM header unreadable ({exc}); FileObject only")
        return result
    fields = tuple(
        FieldDraft(
            name=kw,
            data_type="cr:Int64" if kw in _COUNT_KEYWORDS else "sc:Text",
            source=rel,
            description=f"{kw} {format_tag(tag)}; value={value}",
        )
        for tag, kw, value in profile.attributes
    )
    modality = profile.value("Modality") or "unknown modality"
    result.record_sets.append(
        RecordSetDraft(record_set_name(file.name), fields, rel, f"DICOM header attributes; {modality}")
    )
    result.profiles.append(profile)
    return result


def sniff(prefix: bytes, file: DiscoveredFile) -> bool:
    return len(prefix) >= PREAMBLE + 4 and prefix[PREAMBLE : PREAMBLE + 4] == MAGIC


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    for f in files:
        out.extend(extract_dicom(f))
    return out
