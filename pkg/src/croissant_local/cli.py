"""``croissant-local``: bake, compare, verify and diff Croissant documents.

Exit codes: 0 success or clean, 1 differences or violations, 2 usage error,
3 no supported files found, 4 I/O error. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import CroissantError, DocumentValidationError, UsageError
from .metrics import compare_documents, schema_diff, verify_packaging
from .model import CroissantDocument, RaiMetadata, SemanticMetadata, load_document
from .registry import BakeOptions, run_pipeline

EXIT_OK = 0
EXIT_DIFF = 1
EXIT_USAGE = 2
EXIT_NO_FILES = 3
EXIT_IO = 4

COMMANDS = ("bake", "compare", "verify", "diff")

log = logging.getLogger("croissant_local")


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _add_structure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--group-partitions", action="store_true",
                   help="merge same-directory Parquet files with identical schemas into one record set")
    p.add_argument("--no-header", action="store_true", help="treat the first CSV/TSV row as data")
    p.add_argument("--workers", type=int, default=None, help="hashing threads (default: CPU based)")


def _bake_parser(sub) -> None:
    p = sub.add_parser("bake", help="generate a Croissant document for a directory")
    p.add_argument("--input", "-i", required=True, help="dataset root directory")
    p.add_argument("--output", "-o", required=True, help="output JSON-LD path ('-' for stdout)")
    sem = p.add_argument_group("dataset metadata")
    sem.add_argument("--name", help="dataset name (required)")
    sem.add_argument("--description")
    sem.add_argument("--license")
    sem.add_argument("--citation")
    sem.add_argument("--creator", action="append", default=[], help="repeatable; order is kept")
    sem.add_argument("--publisher")
    sem.add_argument("--dataset-version")
    sem.add_argument("--date-published", help="ISO-8601 date")
    sem.add_argument("--url")
    sem.add_argument("--same-as", action="append", default=[])
    sem.add_argument("--alternate-name", action="append", default=[])
    sem.add_argument("--temporal-coverage")
    sem.add_argument("--usage-info")
    rai = p.add_argument_group("responsible AI metadata")
    rai.add_argument("--rai-data-use-cases")
    rai.add_argument("--rai-data-limitations")
    rai.add_argument("--rai-personal-sensitive-information")
    rai.add_argument("--rai", action="append", default=[], metavar="KEY=VALUE",
                     help="any other RAI attribute, e.g. dataCollection=...")
    inf = p.add_argument_group("inference")
    inf.add_argument("--sample-rows", type=int, default=1000, help="CSV/TSV rows sampled per file")
    inf.add_argument("--sample-records", type=int, default=200, help="JSON records sampled per file")
    inf.add_argument("--deep-sample", action="store_true", help="scan every row and record")
    _add_structure_flags(p)
    p.add_argument("--field-mappings", help="JSON file of equivalentProperty / extra dataType links")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress warnings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="croissant-local",
        description="Local-first Croissant 1.1 metadata: bake, compare, verify, diff.",
        epilog="Running without a subcommand but with --input/--output is the same as 'bake'.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    _bake_parser(sub)

    p = sub.add_parser("compare", help="agreement metrics of a generated document against a reference")
    p.add_argument("generated")
    p.add_argument("reference")
    p.add_argument("--json-report", metavar="PATH", help="also write the report as JSON ('-' for stdout only)")

    p = sub.add_parser("verify", help="check a directory against a document's packaging contract")
    p.add_argument("document")
    p.add_argument("root")
    _add_structure_flags(p)
    p.add_argument("--json-report", metavar="PATH")

    p = sub.add_parser("diff", help="schema diff between two documents")
    p.add_argument("doc_a")
    p.add_argument("doc_b")
    p.add_argument("--json-report", metavar="PATH")
    return parser


def _rai_pairs(values: Sequence[str]) -> tuple[tuple[str, str], ...]:
    out = []
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--rai expects KEY=VALUE, got {item!r}")
        out.append((key.strip(), value))
    return tuple(out)


def semantic_from_args(args: argparse.Namespace) -> SemanticMetadata:
    if not args.name:
        raise UsageError("--name is required")
    return SemanticMetadata(
        name=args.name,
        description=args.description,
        license=args.license,
        citation=args.citation,
        creators=tuple(args.creator),
        publisher=args.publisher,
        version=args.dataset_version,
        date_published=args.date_published,
        url=args.url,
        same_as=tuple(args.same_as),
        alternate_names=tuple(args.alternate_name),
        temporal_coverage=args.temporal_coverage,
        usage_info=args.usage_info,
        rai=RaiMetadata(
            data_use_cases=args.rai_data_use_cases,
            data_limitations=args.rai_data_limitations,
            personal_sensitive_information=args.rai_personal_sensitive_information,
            extra=_rai_pairs(args.rai),
        ),
    )


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    target = Path(path)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(target)


def _write_json_report(path: str | None, payload: dict) -> None:
    if path is None:
        return
    data = (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    _write(path, data)


def cmd_bake(args: argparse.Namespace) -> int:
    semantic = semantic_from_args(args)
    if not Path(args.input).is_dir():
        raise UsageError(f"input is not a directory: {args.input}")
    mappings = None
    if args.field_mappings:
        from .mappings import load_field_mappings

        mappings = load_field_mappings(args.field_mappings)
    if args.sample_rows < 1 or args.sample_records < 1:
        raise UsageError("sample budgets must be positive")
    options = BakeOptions(
        sample_rows=args.sample_rows,
        sample_records=args.sample_records,
        deep_sample=args.deep_sample,
        group_partitions=args.group_partitions,
        no_header=args.no_header,
        workers=args.workers,
        field_mappings=mappings,
    )
    result = run_pipeline(args.input, semantic, options)
    if not args.quiet:
        for w in result.warnings:
            _err(f"warning: {w}")
    _write(args.output, result.jsonld)
    doc = result.document
    n_fields = sum(len(rs.fields) for rs in doc.record_sets)
    _err(
        f"wrote {args.output}: {len(doc.file_objects)} FileObjects, {len(doc.file_sets)} FileSets, "
        f"{len(doc.record_sets)} RecordSets, {n_fields} fields in {result.elapsed:.2f}s"
    )
    return EXIT_OK


def _load(path: str) -> CroissantDocument:
    try:
        return load_document(path)
    except OSError:
        raise
    except (ValueError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc


def cmd_compare(args: argparse.Namespace) -> int:
    report = compare_documents(_load(args.generated), _load(args.reference))
    if args.json_report != "-":
        print(report.render())
    _write_json_report(args.json_report, report.to_dict())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    doc = _load(args.document)
    if not Path(args.root).is_dir():
        raise UsageError(f"root is not a directory: {args.root}")
    options = BakeOptions(group_partitions=args.group_partitions, no_header=args.no_header, workers=args.workers)
    violations = verify_packaging(doc, args.root, options)
    if args.json_report != "-":
        for v in violations:
            print(v)
    _write_json_report(args.json_report, {"violations": [v.__dict__ for v in violations]})
    if violations:
        _err(f"{len(violations)} violation(s)")
        return EXIT_DIFF
    _err("packaging contract holds")
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    diff = schema_diff(_load(args.doc_a), _load(args.doc_b))
    if args.json_report != "-":
        for line in diff.lines():
            print(line)
    _write_json_report(args.json_report, diff.to_dict())
    return EXIT_OK if diff.is_empty else EXIT_DIFF


_HANDLERS = {"bake": cmd_bake, "compare": cmd_compare, "verify": cmd_verify, "diff": cmd_diff}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # the bare flag form (croissant-local --input d --output o ...) means bake
    if not any(a in COMMANDS for a in argv) and any(a in ("--input", "-i") or a.startswith("--input=") for a in argv):
        i = 0
        while i < len(argv) and argv[i] in ("-v", "--verbose"):
            i += 1
        argv.insert(i, "bake")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except DocumentValidationError as exc:
        for v in exc.violations:
            _err(str(v))
        _err("error: generated document failed validation")
        return exc.exit_code
    except CroissantError as exc:
        _err(f"error: {exc}")
        return exc.exit_code
    except OSError as exc:
        _err(f"error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
