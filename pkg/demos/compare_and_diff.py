"""
Comparing documents
===================

Two questions come up once documents exist. How close is a generated
document to a hand-curated reference, and what changed between two
releases of the same dataset? ``compare_documents`` answers the first
with recovery and type-agreement ratios; ``schema_diff`` answers the
second with a line-oriented change list.
"""

from __future__ import annotations

import tempfile
from pathlib import Path

import croissant_local as cl
from croissant_local.model import to_jsonld

work = Path(tempfile.mkdtemp(prefix="croissant-compare-"))


def release(name, labevents_header, extra_table=False):
    root = work / name
    (root / "hosp").mkdir(parents=True)
    (root / "hosp" / "admissions.csv").write_text(
        "subject_id,hadm_id,admittime\n1,11,2180-05-06 22:23:00\n2,12,2180-06-26 18:27:00\n"
    )
    (root / "hosp" / "labevents.csv").write_text(labevents_header + "\n1,50912,0.9\n2,50971,4\n")
    if extra_table:
        (root / "hosp" / "transfers.csv").write_text("subject_id,careunit\n1,MICU\n")
    return cl.bake(root, cl.SemanticMetadata(name=name)).document


v1 = release("v1", "subject_id,itemid,valuenum")
v2 = release("v2", "subject_id,itemid,value", extra_table=True)

###############################################################################
# The diff lists record sets present on one side only, then field changes.

for line in cl.schema_diff(v1, v2).lines():
    print(line)

###############################################################################
# For comparison against a reference, pretend a curator typed ``valuenum``
# as an integer, ``hadm_id`` as a generic integer, and wrote type URIs in
# their expanded form. The expanded spelling is normalized away; the Int vs
# Float disagreement is not.

obj = to_jsonld(v1)
for rs in obj["recordSet"]:
    for f in rs["field"]:
        if f["name"] in ("valuenum", "hadm_id"):
            f["dataType"] = "https://schema.org/Integer"
        elif f["dataType"].startswith("sc:"):
            f["dataType"] = "https://schema.org/" + f["dataType"][3:]
reference = cl.from_jsonld(obj)

report = cl.compare_documents(v1, reference)
print()
print(report.render())

###############################################################################
# Integer widths count as the same family under semantic agreement but not
# under strict agreement, so strict never exceeds semantic.
# ``hadm_id`` (cr:Int64 vs sc:Integer) is exactly such a case.

print(f"\nstrict={report.strict_agreement:.4f} semantic={report.semantic_agreement:.4f}")
