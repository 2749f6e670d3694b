"""Benchmark harness: run script suites, translate array problems, emit CSV."""
from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import List, Optional, Union

from .frontend import (DnfCapExceeded, ParseError, SExpr, parse_script,
                       parse_sexprs, to_branches)
from .solver import solve_branches, validate


class TranslationError(Exception):
    pass


_HEAD_MAP = {"select": "seq.nth", "store": "seq.update"}
_KNOWN_HEADS = {
    "set-logic", "set-info", "set-option", "exit", "declare-sort",
    "declare-const", "declare-fun", "assert", "check-sat", "get-model",
    "and", "or", "not", "=", "distinct", "<=", "<", ">", ">=", "+", "-",
    "as", "select", "store", "seq.empty", "seq.unit", "seq.len", "seq.nth",
    "seq.update", "seq.extract", "seq.++", "seq.concat", "Seq", "Array",
}


def _index_sorts(exprs: List[SExpr]) -> set:
    """Sort names used in the index position of some Array sort."""
    out: set = set()

    def walk(sx: SExpr):
        if sx.is_atom:
            return
        items = sx.val
        if (len(items) == 3 and items[0].is_atom
                and items[0].val == "Array" and items[1].is_atom):
            out.add(items[1].val)
        for it in items:
            walk(it)

    for sx in exprs:
        walk(sx)
    return out


def translate_arrays(text: str) -> str:
    """Rewrite an array script into the sequence language.

    Arrays become sequences, select becomes seq.nth, store becomes
    seq.update, and array index sorts become Int.  Anything outside that
    fragment is rejected.
    """
    exprs = parse_sexprs(text)
    idx_sorts = _index_sorts(exprs)
    bad: List[str] = []

    def render(sx: SExpr, sort_pos: bool = False) -> str:
        if sx.is_atom:
            s = sx.val
            if sort_pos and s in idx_sorts:
                return "Int"
            return s
        items = sx.val
        if not items or not items[0].is_atom:
            bad.append("higher-order application")
            return "()"
        head = items[0].val
        if head == "Array":
            if len(items) != 3:
                bad.append("Array sort with arity != 2")
                return "()"
            if not items[2].is_atom or items[2].val == "Array":
                bad.append("nested Array element sort")
                return "()"
            return f"(Seq {render(items[2], sort_pos=True)})"
        if head not in _KNOWN_HEADS and not head.lstrip("-").isdigit():
            bad.append(head)
        head = _HEAD_MAP.get(head, head)
        # in these forms the last argument is a sort
        sort_last = head in ("declare-const", "declare-fun", "as")
        parts = [head] + [render(a, sort_pos=sort_pos or
                                 (sort_last and a is items[-1]))
                          for a in items[1:]]
        return "(" + " ".join(parts) + ")"

    lines = [render(sx) for sx in exprs]
    if bad:
        raise TranslationError(
            "unsupported constructs: " + ", ".join(sorted(set(bad))))
    return "\n".join(lines) + "\n"


def run_file(path: Union[str, Path], mode: str,
             step_limit: int = 100000) -> dict:
    path = Path(path)
    row = {"file": path.name, "mode": mode, "verdict": "error",
           "wall_ms": 0, "rule_applications": 0, "model_validated": "-"}
    text = path.read_text()
    if path.suffix == ".arr":
        text = translate_arrays(text)
    t0 = time.perf_counter()
    try:
        script = parse_script(text)
        branches = to_branches(script.assertions)
        out = solve_branches(branches, mode=mode, step_limit=step_limit,
                             script=script)
        row["verdict"] = out.verdict
        row["rule_applications"] = out.ctx.steps if out.ctx else 0
        if out.verdict == "sat":
            row["model_validated"] = "no" if validate(script, out) else "yes"
    except (ParseError, DnfCapExceeded, TranslationError) as e:
        row["verdict"] = "error"
        row["model_validated"] = "-"
    row["wall_ms"] = round((time.perf_counter() - t0) * 1000, 2)
    return row


FIELDS = ["file", "mode", "verdict", "wall_ms", "rule_applications",
          "model_validated"]


def run_suite(paths: List[Union[str, Path]], modes=("base", "ext"),
              step_limit: int = 100000) -> List[dict]:
    rows: List[dict] = []
    for mode in modes:
        for p in paths:
            rows.append(run_file(p, mode, step_limit))
    for mode in modes:
        mine = [r for r in rows if r["mode"] == mode and
                not r["file"].startswith("summary")]
        counts = {}
        for r in mine:
            counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
        rows.append({
            "file": "summary",
            "mode": mode,
            "verdict": " ".join(f"{k}={v}" for k, v in sorted(counts.items())),
            "wall_ms": round(sum(r["wall_ms"] for r in mine), 2),
            "rule_applications": sum(r["rule_applications"] for r in mine),
            "model_validated": sum(1 for r in mine
                                   if r["model_validated"] == "yes"),
        })
    return rows


def write_csv(rows: List[dict], out) -> None:
    w = csv.DictWriter(out, fieldnames=FIELDS)
    w.writeheader()
    for r in rows:
        w.writerow(r)


def console_main() -> None:
    p = argparse.ArgumentParser(
        prog="seqsat-bench",
        description="Run a directory of problems in both modes and emit CSV.")
    p.add_argument("path", help="a problem file or a directory of .smt2/.arr "
                                "files")
    p.add_argument("--mode", choices=("base", "ext", "both"), default="both")
    p.add_argument("--step-limit", type=int, default=100000)
    p.add_argument("-o", "--out", help="CSV output file (default: stdout)")
    args = p.parse_args()

    root = Path(args.path)
    if root.is_dir():
        files = sorted(list(root.glob("*.smt2")) + list(root.glob("*.arr")))
    else:
        files = [root]
    if not files:
        print("error: no input files", file=sys.stderr)
        sys.exit(1)
    modes = ("base", "ext") if args.mode == "both" else (args.mode,)
    rows = run_suite(files, modes=modes, step_limit=args.step_limit)
    if args.out:
        with open(args.out, "w", newline="") as f:
            write_csv(rows, f)
    else:
        write_csv(rows, sys.stdout)


if __name__ == "__main__":
    console_main()
