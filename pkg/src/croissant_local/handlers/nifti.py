"""NIfTI-1 / NIfTI-2 handler reading only the fixed-size binary header."""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from typing import Sequence

from ..discovery import DiscoveredFile
from ..extraction import ExtractionResult, FieldDraft, FileRef, RecordSetDraft
from ..fileio import media_type, open_binary
from . import record_set_name

log = logging.getLogger(__name__)

EXTENSIONS = (".nii", ".nii.gz")
V1_SIZE = 348
V2_SIZE = 540
V1_MAGICS = (b"n+1\x00", b"ni1\x00")
V2_MAGICS = (b"n+2\x00\r\n\x1a\n", b"ni2\x00\r\n\x1a\n")

# xyzt_units time codes -> seconds per unit
_TIME_SCALE = {0: 1.0, 8: 1.0, 16: 1e-3, 24: 1e-6}
_SPACE_UNITS = {0: "unknown", 1: "m", 2: "mm", 3: "um"}

# NIfTI datatype codes -> name
DATATYPE_NAMES = {
    1: "binary", 2: "uint8", 4: "int16", 8: "int32", 16: "float32", 32: "complex64",
    64: "float64", 128: "rgb24", 256: "int8", 512: "uint16", 768: "uint32",
    1024: "int64", 1280: "uint64", 1536: "float128", 1792: "complex128",
    2048: "complex256", 2304: "rgba32",
}


class NiftiError(ValueError):
    pass


@dataclass(frozen=True)
class NiftiProfile:
    version: int
    dims: tuple[int, ...]
    voxel_spacing: tuple[float, ...]
    data_type_code: int
    repetition_time: float | None
    spatial_unit: str

    @property
    def rank(self) -> int:
        return len(self.dims)


def detect_version(header: bytes) -> tuple[int, str]:
    """NIfTI version and struct byte order from the first bytes of a header."""
    if len(header) < 4:
        raise NiftiError("header too short")
    for order in ("<", ">"):
        (size,) = struct.unpack(order + "i", header[:4])
        if size == V1_SIZE:
            if header[344:348] not in V1_MAGICS:
                raise NiftiError("bad NIfTI-1 magic")
            return 1, order
        if size == V2_SIZE:
            if header[4:12] not in V2_MAGICS:
                raise NiftiError("bad NIfTI-2 magic")
            return 2, order
    raise NiftiError("sizeof_hdr is neither 348 nor 540")


def parse_nifti_header(header: bytes) -> NiftiProfile:
    version, o = detect_version(header)
    need = V1_SIZE if version == 1 else V2_SIZE
    if len(header) < need:
        raise NiftiError(f"header shorter than the declared {need} bytes")
    if version == 1:
        dim = struct.unpack_from(o + "8h", header, 40)
        (datatype,) = struct.unpack_from(o + "h", header, 70)
        pixdim = struct.unpack_from(o + "8f", header, 76)
        units = header[123]
    else:
        (datatype,) = struct.unpack_from(o + "h", header, 12)
        dim = struct.unpack_from(o + "8q", header, 16)
        pixdim = struct.unpack_from(o + "8d", header, 104)
        (units,) = struct.unpack_from(o + "i", header, 500)
    rank = dim[0]
    if not 1 <= rank <= 7:
        raise NiftiError(f"dim[0] (rank) out of range: {rank}")
    dims = tuple(int(d) for d in dim[1 : rank + 1])
    spacing = tuple(round(float(p), 6) if version == 1 else float(p) for p in pixdim[1 : rank + 1])
    tr = None
    if rank >= 4:
        scale = _TIME_SCALE.get(units & 0x38, 1.0)
        tr = float(pixdim[4]) * scale
        if version == 1:
            tr = round(tr, 6)
    return NiftiProfile(version, dims, spacing, int(datatype), tr, _SPACE_UNITS.get(units & 0x07, "unknown"))


def read_nifti_header(path, name: str | None = None) -> NiftiProfile:
    with open_binary(path, name) as fh:
        head = fh.read(V1_SIZE)
        version, _ = detect_version(head)
        if version == 2:
            head += fh.read(V2_SIZE - len(head))
    return parse_nifti_header(head)


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:g}" if isinstance(v, float) else str(v) for v in values) + "]"


def extract_nifti(file: DiscoveredFile) -> ExtractionResult:
    result = ExtractionResult()
    rel = file.relative_path
    try:
        profile = read_nifti_header(file.absolute_path, file.name)
    except (NiftiError, OSError, EOFError, struct.error) as exc:
        result.warnings.append(f"skipped {rel}: {exc}")
        return result
    dtype = DATATYPE_NAMES.get(profile.data_type_code, "unknown")

    def fd(name: str, tag: str, description: str) -> FieldDraft:
        return FieldDraft(name, tag, rel, description=description)

    fields = [
        fd("dims", "cr:Int64", f"spatial/temporal extents; value={_fmt(profile.dims)}"),
        fd("voxel_spacing", "cr:Float64", f"per-axis spacing ({profile.spatial_unit}); value={_fmt(profile.voxel_spacing)}"),
        fd("data_type_code", "cr:Int64", f"NIfTI datatype; value={profile.data_type_code} ({dtype})"),
        fd("version", "cr:Int64", f"NIfTI format version; value={profile.version}"),
    ]
    if profile.repetition_time is not None:
        fields.append(fd("repetition_time", "cr:Float64", f"seconds; value={profile.repetition_time:g}"))
    result.file_objects.append(FileRef(rel, media_type(file.name)))
    result.record_sets.append(
        RecordSetDraft(record_set_name(file.name), tuple(fields), rel,
                       f"NIfTI-{profile.version} header; shape={'x'.join(map(str, profile.dims))}")
    )
    result.profiles.append(profile)
    return result


def sniff(prefix: bytes, file: DiscoveredFile) -> bool:
    try:
        detect_version(prefix)
    except NiftiError:
        return False
    return True


def extract(files: Sequence[DiscoveredFile], ctx) -> ExtractionResult:
    out = ExtractionResult()
    for f in files:
        out.extend(extract_nifti(f))
    return out
