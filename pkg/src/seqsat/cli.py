"""Command-line entry point."""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .frontend import (DnfCapExceeded, ParseError, Script, parse_script,
                       print_model, to_branches)
from .oracle import Bounds, fits_bounds, oracle_solve
from .solver import Outcome, solve_branches, validate


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="seqsat",
        description="Satisfiability solver for sequence constraints with "
                    "linear integer arithmetic.")
    p.add_argument("file", help="input file (SMT-LIB subset)")
    p.add_argument("--mode", choices=("base", "ext"), default="ext",
                   help="reasoning mode (default: ext)")
    p.add_argument("--step-limit", type=int, default=100000,
                   help="rule application budget (default: 100000)")
    p.add_argument("--validate-model", action="store_true",
                   help="on sat, check the model against the assertions")
    p.add_argument("--oracle-check", action="store_true",
                   help="cross-check the verdict against bounded enumeration")
    p.add_argument("--max-len", type=int, default=3,
                   help="oracle bound on sequence lengths (default: 3)")
    p.add_argument("--max-elem", type=int, default=3,
                   help="oracle bound on distinct elements (default: 3)")
    p.add_argument("--int-bound", type=int, default=4,
                   help="oracle bound on integer magnitude (default: 4)")
    p.add_argument("--trace", metavar="FILE",
                   help="write rule applications to FILE")
    p.add_argument("--seed", type=int, default=0,
                   help="reserved; accepted for interface stability")
    return p


def run(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        with open(args.file) as f:
            text = f.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        script = parse_script(text)
    except ParseError as e:
        print(f"error: {args.file}:{e}", file=sys.stderr)
        return 1

    trace: Optional[List[str]] = [] if args.trace else None
    try:
        branches = to_branches(script.assertions)
    except DnfCapExceeded:
        print("unknown")
        return 0

    out = solve_branches(branches, mode=args.mode, step_limit=args.step_limit,
                         trace=trace, script=script)

    if args.trace:
        try:
            with open(args.trace, "w") as f:
                f.write("\n".join(trace or []) + ("\n" if trace else ""))
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1

    print(out.verdict)
    if out.verdict == "sat" and script.get_model:
        print(print_model(script, out.values))

    if out.verdict == "sat" and args.validate_model:
        bad = validate(script, out)
        if bad:
            for msg in bad:
                print(f"error: model validation failed: {msg}",
                      file=sys.stderr)
            return 1

    if args.oracle_check:
        code = _oracle_check(script, branches, out,
                             Bounds(args.max_len, args.max_elem,
                                    args.int_bound))
        if code:
            return code
    return 0


def _oracle_check(script: Script, branches, out: Outcome,
                  bounds: Bounds) -> int:
    results = [oracle_solve(br.items, bounds) for br in branches]
    any_sat = any(r.status == "sat" for r in results)
    any_unknown = any(r.status == "unknown" for r in results)
    if out.verdict == "unsat" and any_sat:
        print("error: oracle found a model but the solver reported unsat",
              file=sys.stderr)
        return 1
    if out.verdict == "sat" and not any_sat and not any_unknown \
            and fits_bounds(out.values, bounds):
        print("error: solver model is within bounds but the oracle "
              "reported unsat", file=sys.stderr)
        return 1
    return 0


def console_main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    console_main()
