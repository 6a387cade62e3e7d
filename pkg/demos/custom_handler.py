"""
Teaching the generator a new format
===================================

Handlers are plain functions registered with a descriptor that names the
file suffixes they claim. Here a handler for a toy ``.vcfx`` variant
format reads only the ``#CHROM`` header line and describes each sample
column. Everything downstream, identifiers, hashing, validation and
serialization, is shared with the built-in handlers.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import croissant_local as cl


def extract_vcfx(files, ctx):
    result = cl.ExtractionResult()
    for f in files:
        header = None
        with open(f.absolute_path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("#CHROM"):
                    header = line[1:].rstrip("\n").split("\t")
                    break
        result.file_objects.append(cl.FileRef(f.relative_path, "text/x-vcfx"))
        if header is None:
            result.warnings.append(f"{f.relative_path}: no #CHROM header line")
            continue
        fields = tuple(
            cl.FieldDraft(name=col, data_type="cr:Int64" if col == "POS" else "sc:Text", source=f.relative_path)
            for col in header
        )
        result.record_sets.append(
            cl.RecordSetDraft(name=f.name[: -len(".vcfx")], fields=fields, primary=f.relative_path,
                              description=f"variant table; samples={len(header) - 5}")
        )
    return result


registry = cl.default_registry().register(
    cl.HandlerDescriptor(name="vcfx", extension_patterns=(".vcfx",), extract=extract_vcfx)
)
print("dispatch order:", [h.name for h in registry.handlers])

###############################################################################
# A directory with one variant file next to an ordinary table.

root = Path(tempfile.mkdtemp(prefix="croissant-plugin-")) / "cohort"
root.mkdir()
(root / "chr1.vcfx").write_text(
    "##fileformat=toy\n#CHROM\tPOS\tID\tREF\tALT\tNA12878\tNA12891\n1\t10177\t.\tA\tAC\t0|1\t1|1\n"
)
(root / "samples.csv").write_text("sample,population\nNA12878,CEU\nNA12891,CEU\n")

result = cl.bake(root, cl.SemanticMetadata(name="Plugin Demo"), registry=registry)
for rs in result.document.record_sets:
    print(f"{rs.id}  {rs.name}: {', '.join(f'{f.name}:{f.data_type}' for f in rs.fields)}")

###############################################################################
# Without the registration the variant file is left out with a warning.

plain = cl.bake(root, cl.SemanticMetadata(name="Plugin Demo"))
print(len(plain.document.file_objects), "FileObject;", plain.warnings)
