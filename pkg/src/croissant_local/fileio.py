"""Compression-aware file opening and media type lookup."""

from __future__ import annotations

import bz2
import gzip
import io
import lzma
import os
from typing import BinaryIO

COMPRESSION_SUFFIXES = {".gz": "gzip", ".bz2": "bzip2", ".xz": "xz"}

COMPRESSED_MEDIA_TYPES = {
    "gzip": "application/gzip",
    "bzip2": "application/x-bzip2",
    "xz": "application/x-xz",
}

MEDIA_TYPES = {
    ".csv": "text/csv",
    ".tsv": "text/tab-separated-values",
    ".json": "application/json",
    ".jsonl": "application/jsonl",
    ".ndjson": "application/x-ndjson",
    ".parquet": "application/x-parquet",
    ".hea": "text/plain",
    ".dat": "application/octet-stream",
    ".atr": "application/octet-stream",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".png": "image/png",
    ".tif": "image/tiff",
    ".tiff": "image/tiff",
    ".gif": "image/gif",
    ".bmp": "image/bmp",
    ".webp": "image/webp",
    ".dcm": "application/dicom",
    ".dicom": "application/dicom",
    ".nii": "application/x-nifti",
}


def split_compression(name: str) -> tuple[str, str | None]:
    """``"a.csv.gz"`` -> ``("a.csv", "gzip")``; uncompressed names pass through."""
    low = name.lower()
    for suffix, kind in COMPRESSION_SUFFIXES.items():
        if low.endswith(suffix) and len(name) > len(suffix):
            return name[: -len(suffix)], kind
    return name, None


def inner_suffix(name: str) -> str:
    """Lower-cased format suffix after removing any compression suffix."""
    inner, _ = split_compression(name)
    _, dot, ext = inner.rpartition(".")
    return f".{ext.lower()}" if dot else ""


def media_type(name: str) -> str:
    """Outer media type: the compression wrapper wins over the inner format."""
    inner, compression = split_compression(name)
    if compression:
        return COMPRESSED_MEDIA_TYPES[compression]
    return MEDIA_TYPES.get(inner_suffix(inner), "application/octet-stream")


def open_binary(path: str | os.PathLike[str], name: str | None = None) -> BinaryIO:
    """Open ``path`` for reading, transparently decompressing by suffix."""
    _, compression = split_compression(name or os.fspath(path))
    if compression == "gzip":
        return gzip.open(path, "rb")  # type: ignore[return-value]
    if compression == "bzip2":
        return bz2.open(path, "rb")  # type: ignore[return-value]
    if compression == "xz":
        return lzma.open(path, "rb")  # type: ignore[return-value]
    return open(path, "rb")


def open_text(path: str | os.PathLike[str], name: str | None = None) -> io.TextIOWrapper:
    return io.TextIOWrapper(open_binary(path, name), encoding="utf-8-sig", newline="")


def read_prefix(path: str | os.PathLike[str], size: int = 8192, name: str | None = None) -> bytes:
    """First ``size`` bytes, decompressed when the name carries a compression suffix.

    Truncated or corrupt compressed streams yield whatever decoded cleanly.
    """
    try:
        with open_binary(path, name) as fh:
            return fh.read(size)
    except (OSError, EOFError, lzma.LZMAError, ValueError):
        return _partial_decode(path, size, name)


def _partial_decode(path, size, name) -> bytes:
    _, compression = split_compression(name or os.fspath(path))
    with open(path, "rb") as fh:
        raw = fh.read(max(size, 65536))
    if compression is None:
        return raw[:size]
    try:
        if compression == "gzip":
            import zlib

            return zlib.decompressobj(wbits=31).decompress(raw)[:size]
        if compression == "bzip2":
            return bz2.BZ2Decompressor().decompress(raw)[:size]
        return lzma.LZMADecompressor().decompress(raw)[:size]
    except Exception:
        return b""
