"""
A document as a packaging contract
==================================

Every FileObject records a size and a SHA-256 digest, and every field
names the column or signal it came from. ``verify_packaging`` walks a
directory against a document and reports what no longer matches. This
walkthrough bakes a small dataset, then damages a copy in four different
ways and shows the violation each one produces.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

import croissant_local as cl

work = Path(tempfile.mkdtemp(prefix="croissant-verify-"))
source = work / "original"
(source / "hosp").mkdir(parents=True)
(source / "hosp" / "labevents.csv").write_text(
    "subject_id,itemid,valuenum\n10000032,50912,0.9\n10000032,50971,4.1\n"
)
(source / "hosp" / "patients.tsv").write_text("subject_id\tgender\n10000032\tF\n")
for name in ("100", "101"):
    (source / f"{name}.hea").write_text(f"{name} 1 250 1000\n{name}.dat 16 200 12 0 0 0 0 II\n")
    (source / f"{name}.dat").write_bytes(bytes(2000))

doc = cl.bake(source, cl.SemanticMetadata(name="Contract Demo")).document
print("fresh copy:", cl.verify_packaging(doc, source) or "clean")

###############################################################################
# Each perturbation runs on its own copy so the failures do not mix.


def perturbed(label, damage):
    copy = work / label
    shutil.copytree(source, copy)
    damage(copy)
    print(f"\n{label}:")
    for v in cl.verify_packaging(doc, copy):
        print(f"  {v}")


def flip_byte(root):
    p = root / "hosp" / "labevents.csv"
    data = bytearray(p.read_bytes())
    data[-3] ^= 0x01  # same size, different digest
    p.write_bytes(bytes(data))


perturbed("removed", lambda r: (r / "hosp" / "patients.tsv").unlink())
perturbed("renamed-signal", lambda r: (r / "101.dat").rename(r / "101_old.dat"))
perturbed("corrupted", flip_byte)
perturbed(
    "renamed-column",
    lambda r: (r / "hosp" / "labevents.csv").write_text(
        "subject_id,itemid,value\n10000032,50912,0.9\n10000032,50971,4.1\n"
    ),
)

###############################################################################
# A renamed signal file is a structural break of the waveform record, so it
# is reported once as schema drift rather than as a pair of file errors.
# A renamed column also changes the size and digest of the file; the schema
# drift finding takes precedence so the same edit is not reported three times.
