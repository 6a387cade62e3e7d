"""Built-in format handlers.

Each handler module exposes ``EXTENSIONS``, an ``extract(files, ctx)``
function and optionally ``sniff(prefix, file)``. :func:`builtin_handlers`
wraps them in descriptors in dispatch order.
"""

from __future__ import annotations

from ..fileio import inner_suffix, split_compression

__all__ = ["record_set_name", "builtin_handlers", "FORMAT_SUFFIXES"]

FORMAT_SUFFIXES = (
    ".csv", ".tsv", ".json", ".jsonl", ".ndjson", ".parquet", ".hea",
    ".jpg", ".jpeg", ".png", ".tif", ".tiff", ".gif", ".bmp", ".webp",
    ".dcm", ".dicom", ".nii",
)


def record_set_name(filename: str, extra_suffixes: tuple[str, ...] = ()) -> str:
    """Filename with compression and format suffixes removed (``admissions.csv.gz`` -> ``admissions``).

    Third-party handlers pass their own format suffixes in ``extra_suffixes``.
    """
    inner, _ = split_compression(filename)
    suffix = inner_suffix(inner)
    if (suffix in FORMAT_SUFFIXES or suffix in extra_suffixes) and len(inner) > len(suffix):
        inner = inner[: -len(suffix)]
    return inner


def builtin_handlers():
    from ..registry import HandlerDescriptor
    from . import dicom, imaging, nifti, parquet, semistructured, tabular, wfdb

    return [
        HandlerDescriptor("fhir", semistructured.EXTENSIONS, semistructured.extract_fhir_handler,
                          semistructured.sniff_fhir, priority=10),
        HandlerDescriptor("json", semistructured.EXTENSIONS, semistructured.extract_json),
        HandlerDescriptor("tabular", tabular.EXTENSIONS, tabular.extract),
        HandlerDescriptor("parquet", parquet.EXTENSIONS, parquet.extract, parquet.sniff),
        HandlerDescriptor("wfdb", wfdb.EXTENSIONS, wfdb.extract),
        HandlerDescriptor("image", imaging.EXTENSIONS, imaging.extract),
        HandlerDescriptor("dicom", dicom.EXTENSIONS, dicom.extract, dicom.sniff),
        HandlerDescriptor("nifti", nifti.EXTENSIONS, nifti.extract, nifti.sniff),
    ]
