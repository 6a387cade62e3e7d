"""
Baking a Croissant document for a local directory
==================================================

A small clinical-looking dataset is written to a temporary directory:
a gzip-compressed admissions table, two ECG-style waveform records and a
FHIR bulk export split across two chunks. One call to ``bake`` turns it
into a validated JSON-LD document without the data ever leaving the
machine.
"""

from __future__ import annotations

import gzip
import json
import tempfile
from pathlib import Path

import croissant_local as cl

root = Path(tempfile.mkdtemp(prefix="croissant-demo-")) / "ward"

# a compressed table with integer ids and timestamps
(root / "hosp").mkdir(parents=True)
rows = [
    "subject_id,hadm_id,admittime,admission_type",
    "10000032,22595853,2180-05-06 22:23:00,URGENT",
    "10000084,23052089,2160-11-21 01:56:00,EW EMER.",
]
(root / "hosp" / "admissions.csv.gz").write_bytes(gzip.compress(("\n".join(rows) + "\n").encode(), mtime=0))

# two waveform records: a text header plus its signal and annotation files
(root / "waves").mkdir()
for name in ("100", "101"):
    header = f"{name} 2 360 650000\n" + "".join(
        f"{name}.dat 212 200 11 1024 995 -22131 0 {lead}\n" for lead in ("MLII", "V5")
    )
    (root / "waves" / f"{name}.hea").write_text(header)
    (root / "waves" / f"{name}.dat").write_bytes(bytes(96))
    (root / "waves" / f"{name}.atr").write_bytes(b"\x00\x10\x01\xec")

# a FHIR bulk export, one resource per line, split into chunks
(root / "fhir").mkdir()
for chunk in range(2):
    lines = [
        {"resourceType": "Observation", "id": f"o{chunk}{i}", "status": "final",
         "valueQuantity": {"value": 60 + i + 0.5, "unit": "beats/min"}}
        for i in range(3)
    ]
    (root / "fhir" / f"Observation.{chunk:03d}.ndjson").write_text("".join(json.dumps(r) + "\n" for r in lines))

###############################################################################
# Structural metadata comes from the files; the semantic layer is supplied.

semantic = cl.SemanticMetadata(
    name="Ward Demo",
    description="Synthetic ward data for a walkthrough.",
    creators=("A. Researcher",),
    rai=cl.RaiMetadata(data_use_cases="Teaching"),
)
result = cl.bake(root, semantic)
doc = result.document

print(f"{len(doc.file_objects)} FileObjects, {len(doc.file_sets)} FileSets, {len(doc.record_sets)} RecordSets")
for rs in doc.record_sets:
    print(f"  {rs.id:<14} {rs.name:<12} {rs.description}")

###############################################################################
# Every field carries a data type and a pointer back to the file it came from.

for f in doc.record_set("admissions").fields:
    print(f"  {f.name:<16} {f.data_type:<12} <- {f.source.ref_id}")

###############################################################################
# The waveform header supplies lead names and the sampling rate.

for f in doc.record_set("100").fields:
    print(f"  {f.name}: {f.description}")

###############################################################################
# The serialized document is deterministic: baking twice gives the same bytes.

out = root.parent / "ward.json"
out.write_bytes(result.jsonld)
assert cl.bake(root, semantic).jsonld == out.read_bytes()
print(f"wrote {out} ({out.stat().st_size} bytes)")
print(json.dumps(json.loads(result.jsonld)["distribution"][0], indent=2))
