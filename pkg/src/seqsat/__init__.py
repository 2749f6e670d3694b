"""seqsat: a satisfiability solver for sequence constraints over linear
integer arithmetic, with a bounded enumeration oracle and a benchmark
harness."""
from __future__ import annotations

from .frontend import ParseError, parse_script, to_branches
from .solver import Outcome, solve_branches, validate

__all__ = ["ParseError", "parse_script", "to_branches", "Outcome",
           "solve_branches", "validate"]
__version__ = "0.1.0"
