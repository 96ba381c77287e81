"""Command-line interface: ``analyze``, ``transform``, ``verify``, ``scan``.

Exit codes: 0 success or equivalent, 2 usage/input error, 3 divergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .analyzer import BranchShape, chain_for, complex_node, find_nested_ifs, shape_of_formula
from .errors import NestedIfError
from .parser import count_ifs, format_expr, nesting_depth
from .transformer import (
    DEFAULT_FLAG_TEXT,
    NoGuard,
    Orientation,
    PlacementSpec,
    WrapIfError,
    apply_plan,
    detect_latent_errors,
    plan_lookup_transform,
    plan_visibility_transform,
    recover_plan,
)
from .values import format_value
from .verifier import DEFAULT_LIMIT, EquivalenceReport, Status, compare_states, state_equivalence, structural_equivalence
from .workbook import CellAddress, Formula, Workbook, format_address, load_cell_list, parse_address, parse_literal, save_cell_list

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIVERGENT = 3


class CliError(Exception):
    """Reported on stderr with exit code 2."""


def _envelope(command: str, **payload) -> dict:
    return {"tool_version": __version__, "command": command, **payload}


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _load(path: str) -> Workbook:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return load_cell_list(text)
    except NestedIfError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _address(text: str) -> CellAddress:
    try:
        return parse_address(text)
    except NestedIfError as exc:
        raise CliError(str(exc)) from exc


# analyze


def _analyze_cell(addr: CellAddress, formula: Formula) -> dict:
    expr = formula.expr
    shape = shape_of_formula(expr)
    record = {
        "cell": format_address(addr),
        "if_count": count_ifs(expr),
        "depth": nesting_depth(expr),
        "shape": shape.value,
        "transformable": shape.transformable,
        "normalized": shape in (BranchShape.BRANCH_ON_TRUE, BranchShape.MIXED),
        "tests": [],
        "outcomes": [],
        "diagnostic": None,
        "span": None,
    }
    if shape.transformable:
        chain = chain_for(expr, addr)
        record["tests"] = [format_expr(t) for t in chain.tests]
        record["outcomes"] = [format_expr(o) for o in chain.outcomes]
    else:
        node = complex_node(expr)
        span = node.span if node is not None else expr.span
        what = "an IF with IFs in both value positions" if node is not None else "IFs embedded in a larger expression"
        record["diagnostic"] = f"Complex: lookup technique not applicable; try --mode visibility ({what})"
        record["span"] = list(span)
    return record


def _print_analysis(record: dict, out) -> None:
    print(f"{record['cell']}: {record['if_count']} IFs, depth {record['depth']}, shape {record['shape']}", file=out)
    if record["diagnostic"]:
        start, end = record["span"]
        print(f"  {record['diagnostic']}", file=out)
        print(f"  offending node at bytes {start}..{end}", file=out)
        return
    if record["normalized"]:
        print("  (branch-on-true levels reversed into branch-on-false form)", file=out)
    print(f"  tests ({len(record['tests'])}):", file=out)
    for i, t in enumerate(record["tests"], 1):
        print(f"    Test{i}: {t}", file=out)
    print(f"  outcomes ({len(record['outcomes'])}):", file=out)
    last = len(record["outcomes"])
    for i, o in enumerate(record["outcomes"], 1):
        suffix = "  (otherwise)" if i == last else ""
        print(f"    Value{i}: {o}{suffix}", file=out)


def cmd_analyze(args, out) -> int:
    wb = _load(args.file)
    if args.cell:
        addr = _address(args.cell)
        cell = wb.get_cell(addr)
        targets = [(addr, cell)] if isinstance(cell, Formula) and count_ifs(cell.expr) >= 1 else []
    else:
        targets = [(hit.address, wb.get_cell(hit.address)) for hit in find_nested_ifs(wb, args.min_ifs)]
    records = [_analyze_cell(addr, formula) for addr, formula in targets]
    if args.json:
        out.write(_dump(_envelope("analyze", records=records)))
        return EXIT_OK
    if not records:
        print("no nested-IF found", file=out)
    for record in records:
        _print_analysis(record, out)
    return EXIT_OK


# transform


def _same_file(a: str, b: str) -> bool:
    try:
        return os.path.samefile(a, b)
    except OSError:
        return Path(a).resolve() == Path(b).resolve()


def cmd_transform(args, out) -> int:
    if args.out and _same_file(args.file, args.out) and not args.force:
        raise CliError("refusing to overwrite the input file; pass --force to allow it")
    wb = _load(args.file)
    source = _address(args.cell)
    anchor = _address(args.anchor) if args.anchor else None
    if anchor is not None and not args.anchor.count("!"):
        anchor = CellAddress(source.sheet, anchor.column, anchor.row)
    placement = PlacementSpec(
        anchor=anchor,
        orientation=Orientation(args.orientation),
        use_names=args.names,
        label_column=not args.no_labels,
    )
    guard = WrapIfError(args.guard_errors) if args.guard_errors is not None else NoGuard()
    try:
        if args.mode == "lookup":
            plan = plan_lookup_transform(wb, source, placement, guard)
        else:
            plan = plan_visibility_transform(wb, source, placement, guard)
        new_wb = apply_plan(wb, plan)
    except NestedIfError as exc:
        raise CliError(f"{type(exc).__name__}: {exc}") from exc

    # without --out the document goes to stdout, so the summary becomes comment lines
    lines = plan.summary().splitlines()
    if plan.mode == "lookup":
        report = structural_equivalence(plan.chain, plan, args.limit)
        lines += f"structural check: {report.describe()}".splitlines()
    else:
        report = compare_states(wb, new_wb, source, [{}])
        lines += f"current-state check: {report.describe()}".splitlines()
    if report.status is Status.DIVERGENT:
        for line in lines:
            print(line, file=sys.stderr)
        print("not written: the transform is not equivalent", file=sys.stderr)
        return EXIT_DIVERGENT

    for e in detect_latent_errors(new_wb, plan):
        lines.append(f"latent {e.kind.value} in {format_address(e.address)} (not returned by the result)")
    document = save_cell_list(new_wb)
    if args.out:
        Path(args.out).write_text(document, encoding="utf-8")
        lines.append(f"wrote {args.out}")
        for line in lines:
            print(line, file=out)
    else:
        for line in lines:
            print(f"# {line}", file=out)
        out.write(document)
    return EXIT_OK


# verify


def _parse_drive(text: str) -> tuple[CellAddress, list]:
    addr, sep, values = text.partition("=")
    if not sep:
        raise CliError(f"--drive expects ADDR=v1,v2,...; got {text!r}")
    return _address(addr), [parse_literal(v.strip()) for v in values.split(",")]


def _overall(*reports) -> Status:
    present = [r for r in reports if r is not None]
    if any(r.status is Status.DIVERGENT for r in present):
        return Status.DIVERGENT
    if any(r.status is Status.EQUIVALENT for r in present):
        return Status.EQUIVALENT
    return Status.INCONCLUSIVE


def cmd_verify(args, out) -> int:
    original = _load(args.original)
    transformed = _load(args.transformed)
    cell = _address(args.cell)
    drivers = {}
    for spec in args.drive or []:
        addr, values = _parse_drive(spec)
        drivers.setdefault(addr, []).extend(values)

    structural = None
    formula = original.get_cell(cell)
    if not isinstance(formula, Formula):
        raise CliError(f"{format_address(cell)} in {args.original} does not hold a formula")
    if count_ifs(formula.expr) and shape_of_formula(formula.expr).transformable:
        chain = chain_for(formula.expr, cell)
        plan = recover_plan(transformed, cell, chain)
        if plan is not None:
            structural = structural_equivalence(chain, plan, args.limit)
        else:
            structural = EquivalenceReport(Status.INCONCLUSIVE, 0, reason="transformed cell is not a lookup")

    try:
        if drivers:
            states = state_equivalence(original, transformed, cell, drivers)
        elif structural is None or structural.status is Status.INCONCLUSIVE:
            states = compare_states(original, transformed, cell, [{}])
        else:
            states = None
    except NestedIfError as exc:
        raise CliError(str(exc)) from exc

    status = _overall(structural, states)
    if args.json:
        payload = {
            "status": status.value,
            "cell": format_address(cell),
            "structural": structural.to_dict() if structural else None,
            "states": states.to_dict() if states else None,
        }
        out.write(_dump(_envelope("verify", report=payload)))
    else:
        if structural is not None:
            print(f"structural: {structural.describe()}", file=out)
        if states is not None:
            print(f"states: {states.describe()}", file=out)
        print(status.value, file=out)
    return EXIT_DIVERGENT if status is Status.DIVERGENT else EXIT_OK


# scan


def _scan_file(path: str, rel: str, min_ifs: int) -> dict:
    try:
        wb = load_cell_list(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, NestedIfError) as exc:
        return {"file": rel, "error": str(exc)}
    formulas = sum(1 for _ in wb.formula_cells())
    records = [
        {
            "file": rel,
            "cell": format_address(hit.address),
            "if_count": hit.if_count,
            "depth": hit.depth,
            "shape": hit.shape.value,
            "transformable": hit.shape.transformable,
            "_order": list(hit.address.sort_key),
        }
        for hit in find_nested_ifs(wb, min_ifs)
    ]
    return {"file": rel, "formulas": formulas, "records": records}


def scan_directory(root: str, min_ifs: int = 2, jobs: int = 1) -> dict:
    base = Path(root)
    if not base.is_dir():
        raise CliError(f"{root}: not a directory")
    files = sorted(p for p in base.rglob("*.cells") if p.is_file())
    work = [(str(p), p.relative_to(base).as_posix(), min_ifs) for p in files]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_file, *zip(*work)))
    else:
        results = [_scan_file(*w) for w in work]

    records, skipped = [], []
    formulas = 0
    for res in sorted(results, key=lambda r: r["file"]):
        if "error" in res:
            skipped.append({"file": res["file"], "error": res["error"]})
            continue
        formulas += res["formulas"]
        records.extend(res["records"])
    records.sort(key=lambda r: (r["file"], r["_order"]))
    for r in records:
        del r["_order"]
    histogram = {}
    for r in records:
        histogram[r["shape"]] = histogram.get(r["shape"], 0) + 1
    aggregate = {
        "files_scanned": len(results) - len(skipped),
        "formulas_scanned": formulas,
        "nested_if_count": len(records),
        "shape_histogram": dict(sorted(histogram.items())),
        "max_depth": max((r["depth"] for r in records), default=0),
    }
    return _envelope("scan", records=records, aggregate=aggregate, skipped=skipped)


def cmd_scan(args, out) -> int:
    report = scan_directory(args.directory, args.min_ifs, args.jobs)
    text = _dump(report)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
        agg = report["aggregate"]
        print(
            f"{agg['files_scanned']} files, {agg['formulas_scanned']} formulas, "
            f"{agg['nested_if_count']} nested-IF cells, {len(report['skipped'])} skipped",
            file=out,
        )
    else:
        out.write(text)
    return EXIT_OK


# entry point


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nestedif", description="Refactor nested-IF spreadsheet formulas into lookups.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="report nested-IF cells and their branch shape")
    a.add_argument("file")
    a.add_argument("--cell")
    a.add_argument("--min-ifs", type=_positive, default=2)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    t = sub.add_parser("transform", help="rewrite one nested-IF cell")
    t.add_argument("file")
    t.add_argument("--cell", required=True)
    t.add_argument("--out", help="output file; the document is printed when omitted")
    t.add_argument("--anchor")
    t.add_argument("--orientation", choices=("v", "h"), default="v")
    t.add_argument("--mode", choices=("lookup", "visibility"), default="lookup")
    t.add_argument("--guard-errors", nargs="?", const=DEFAULT_FLAG_TEXT, default=None, metavar="TEXT")
    t.add_argument("--names", action="store_true", help="also define Test1.. / Value1.. names")
    t.add_argument("--no-labels", action="store_true", help="omit the Name/Value label strip")
    t.add_argument("--force", action="store_true", help="allow --out to overwrite the input file")
    t.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT, help="max tests for the exhaustive check")
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify", help="compare an original and a transformed workbook")
    v.add_argument("original")
    v.add_argument("transformed")
    v.add_argument("--cell", required=True)
    v.add_argument("--drive", action="append", metavar="ADDR=v1,v2,...")
    v.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="collect nested-IF metrics over a directory of .cells files")
    s.add_argument("directory")
    s.add_argument("--report")
    s.add_argument("--min-ifs", type=_positive, default=2)
    s.add_argument("--jobs", type=_positive, default=1)
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
