"""Raster image handler: header-level properties and one dataset-wide image summary.

Pillow reads the common formats lazily (no pixel decode). TIFF goes through a
small tag reader instead, because Pillow collapses scientific multi-band
TIFFs to at most four bands.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from typing import Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, FileSetDraft, RecordSetDraft
from ..fileio import media_type

log = logging.getLogger(__name__)

EXTENSIONS = (".jpg", ".jpeg", ".png", ".tif", ".tiff", ".gif", ".bmp", ".webp")
TIFF_EXTENSIONS = (".tif", ".tiff")
SUMMARY_NAME = "image_summary"
SUMMARY_KEY = "images:summary"

TAG_IMAGE_WIDTH = 256
TAG_IMAGE_LENGTH = 257
TAG_SAMPLES_PER_PIXEL = 277

# TIFF field type -> (struct code, byte size)
_TIFF_TYPES = {1: ("B", 1), 3: ("H", 2), 4: ("I", 4), 8: ("h", 2), 9: ("i", 4), 16: ("Q", 8), 17: ("q", 8)}


class ImageError(ValueError):
    pass


@dataclass(frozen=True)
class ImageProfile:
    file_name: str
    width: int
    height: int
    bands: int
    format: str


def read_tiff_tags(path, wanted: Sequence[int] = (TAG_IMAGE_WIDTH, TAG_IMAGE_LENGTH, TAG_SAMPLES_PER_PIXEL)) -> dict[int, int]:
    """First-value integer tags of the first IFD of a classic or BigTIFF file."""
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) < 8:
            raise ImageError("file too short for a TIFF header")
        order = {b"II": "<", b"MM": ">"}.get(head[:2])
        if order is None:
            raise ImageError("missing TIFF byte-order mark")
        (magic,) = struct.unpack(order + "H", head[2:4])
        if magic == 42:
            (ifd,) = struct.unpack(order + "I", head[4:8])
            count_fmt, entry_fmt, inline = "H", "HHI", 4
        elif magic == 43:
            if len(head) < 16:
                raise ImageError("truncated BigTIFF header")
            (ifd,) = struct.unpack(order + "Q", head[8:16])
            count_fmt, entry_fmt, inline = "Q", "HHQ", 8
        else:
            raise ImageError(f"unknown TIFF magic {magic}")
        fh.seek(ifd)
        raw = fh.read(struct.calcsize(order + count_fmt))
        if len(raw) < struct.calcsize(order + count_fmt):
            raise ImageError("IFD offset past end of file")
        (n,) = struct.unpack(order + count_fmt, raw)
        entry_size = struct.calcsize(order + entry_fmt) + inline
        block = fh.read(n * entry_size)
        if len(block) < n * entry_size:
            raise ImageError("truncated IFD")
    tags: dict[int, int] = {}
    head_size = struct.calcsize(order + entry_fmt)
    for i in range(n):
        entry = block[i * entry_size : (i + 1) * entry_size]
        tag, ftype, count = struct.unpack(order + entry_fmt, entry[:head_size])
        if tag not in wanted or ftype not in _TIFF_TYPES or count < 1:
            continue
        code, size = _TIFF_TYPES[ftype]
        if size > inline:
            continue
        (tags[tag],) = struct.unpack(order + code, entry[head_size : head_size + size])
    return tags


def profile_tiff(file: DiscoveredFile) -> ImageProfile:
    tags = read_tiff_tags(file.absolute_path)
    try:
        width, height = tags[TAG_IMAGE_WIDTH], tags[TAG_IMAGE_LENGTH]
    except KeyError:
        raise ImageError("TIFF lacks ImageWidth/ImageLength tags") from None
    return ImageProfile(file.name, width, height, max(1, tags.get(TAG_SAMPLES_PER_PIXEL, 1)), "TIFF")


def profile_image(file: DiscoveredFile) -> ImageProfile:
    if file.name.lower().endswith(TIFF_EXTENSIONS):
        return profile_tiff(file)
    from PIL import Image, UnidentifiedImageError

    try:
        # Image.open parses the header only; pixel data is decoded on load()
        with Image.open(file.absolute_path) as im:
            width, height = im.size
            return ImageProfile(file.name, width, height, len(im.getbands()), im.format or "unknown")
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageError(str(exc)) from exc


def _span(values: Sequence[int]) -> str:
    lo, hi = min(values), max(values)
    return f"observed {lo}" if lo == hi else f"observed {lo}..{hi}"


def build_summary(profiles: Sequence[tuple[str, ImageProfile]]) -> tuple[FileSetDraft, RecordSetDraft]:
    """The single image summary record set, backed by a FileSet of the decoded images."""
    paths = tuple(p for p, _ in profiles)
    formats = sorted({prof.format for _, prof in profiles})
    kinds = {media_type(p) for p in paths}
    encoding = kinds.pop() if len(kinds) == 1 else "application/octet-stream"
    fs = FileSetDraft(SUMMARY_KEY, "images", paths, encoding)
    profs = [prof for _, prof in profiles]

    def fd(name: str, tag: str, description: str, kind: str = "column", value: str | None = None) -> FieldDraft:
        return FieldDraft(name, tag, SUMMARY_KEY, "fileSet", kind, value, description)

    fields = (
        fd("file_name", "sc:Text", "image file name", "fileProperty", "filename"),
        fd("width", "cr:Int64", f"pixels; {_span([p.width for p in profs])}"),
        fd("height", "cr:Int64", f"pixels; {_span([p.height for p in profs])}"),
        fd("bands", "cr:Int64", f"channels per pixel; {_span([p.bands for p in profs])}"),
        fd("format", "sc:Text", f"observed {', '.join(formats)}"),
    )
    rs = RecordSetDraft(
        SUMMARY_NAME, fields, paths[0], f"image summary; rows={len(paths)}; formats={','.join(formats)}"
    )
    return fs, rs


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    result = ExtractionResult()
    decoded: list[tuple[str, ImageProfile]] = []
    for f in sorted(files, key=lambda f: f.relative_path):
        result.file_objects.append(FileRef(f.relative_path, media_type(f.name)))
        try:
            profile = profile_image(f)
        except (ImageError, OSError, struct.error) as exc:
            result.warnings.append(f"{f.relative_path}: image header not decodable ({exc}); left out of the summary")
            continue
        decoded.append((f.relative_path, profile))
        result.profiles.append(profile)
    if decoded:
        fs, rs = build_summary(decoded)
        result.file_sets.append(fs)
        result.record_sets.append(rs)
    return result
