"""Bounded brute-force satisfiability oracle.

Enumerates assignments over bounded domains (sequence length, element domain
size, integer magnitude), smallest first.  Out-of-bounds nth reads are
resolved by enumerating a value table keyed on (sequence value, index), so
reads off the same sequence at the same index agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from . import terms as tm
from .model import ElemVal, ModelError, eval_term
from .terms import Term


@dataclass
class Bounds:
    max_len: int = 3
    max_elem: int = 3
    int_bound: int = 4
    state_cap: int = 2_000_000


@dataclass
class OracleResult:
    status: str                     # "sat" | "unsat" | "unknown"
    assignment: Optional[Dict[Term, object]] = None
    nth_oob: Optional[Dict[tuple, object]] = None
    reason: str = ""


class _Budget(Exception):
    pass


# branch items: ("lit", pos, atom) or ("or2", (pos, atom), (pos, atom))
Item = tuple


def int_domain(b: int) -> List[int]:
    out = [0]
    for k in range(1, b + 1):
        out.extend((k, -k))
    return out


def elem_domain(sort: tm.Sort, k: int) -> List[object]:
    if sort.kind == "Int":
        return list(range(k))
    return [ElemVal(f"@u{i}") for i in range(k)]


def seq_domain(sort: tm.Sort, max_len: int, k: int) -> List[tuple]:
    elems = elem_domain(sort.elem, k)  # type: ignore[arg-type]
    out: List[tuple] = []
    for n in range(max_len + 1):
        out.extend(itertools.product(elems, repeat=n))
    return out


def item_vars(item: Item) -> Set[Term]:
    out: Set[Term] = set()
    for atom in _atoms(item):
        out.update(t for t in tm.subterms(atom) if t.is_var)
    return out


def _atoms(item: Item):
    if item[0] == "lit":
        return [item[2]]
    return [item[1][1], item[2][1]]


class _OobProbe(dict):
    """dict that records missed lookups (get defaults them)."""

    def __init__(self, base: dict):
        super().__init__(base)
        self.missing: Set[tuple] = set()

    def get(self, key, default=None):
        if key in self:
            return self[key]
        self.missing.add(key)
        return default


def _holds(item: Item, values, oob, default) -> bool:
    if item[0] == "lit":
        return bool(eval_term(item[2], values, oob, default)) == item[1]
    (p1, a1), (p2, a2) = item[1], item[2]
    return bool(eval_term(a1, values, oob, default)) == p1 or \
        bool(eval_term(a2, values, oob, default)) == p2


def oracle_solve(items: List[Item], bounds: Bounds = Bounds()) -> OracleResult:
    variables = sorted(set().union(*(item_vars(i) for i in items)) if items
                       else set(), key=lambda v: (v.sort.kind, v.name))
    order = {"Int": 0, "Elem": 1, "Seq": 2}
    variables.sort(key=lambda v: (order.get(v.sort.kind, 3), v.name))
    domains = []
    for v in variables:
        if v.sort == tm.INT:
            domains.append(int_domain(bounds.int_bound))
        elif v.sort.kind == "Elem":
            domains.append(elem_domain(v.sort, bounds.max_elem))
        elif v.sort.kind == "Seq":
            domains.append(seq_domain(v.sort, bounds.max_len, bounds.max_elem))
        else:
            return OracleResult("unknown", reason=f"unsupported sort {v.sort}")

    # check an item as soon as all its variables are assigned
    when: Dict[int, List[Item]] = {}
    for item in items:
        need = item_vars(item)
        last = -1
        for k, v in enumerate(variables):
            if v in need:
                last = k
        when.setdefault(last, []).append(item)

    states = [0]
    default = lambda sort: (0 if sort.kind == "Int" else ElemVal("@u!"))

    def spend():
        states[0] += 1
        if states[0] > bounds.state_cap:
            raise _Budget

    oob_domains: Dict[str, List[object]] = {}

    def oob_dom(sort: tm.Sort) -> List[object]:
        key = sort.kind if sort.kind == "Int" else (sort.name or "Elem")
        if key not in oob_domains:
            oob_domains[key] = elem_domain(sort, bounds.max_elem)
        return oob_domains[key]

    def check_full(values) -> Optional[dict]:
        """All variables assigned: resolve out-of-bounds reads."""
        def go(oob: dict) -> Optional[dict]:
            spend()
            probe = _OobProbe(oob)
            ok = True
            for item in items:
                if not _holds(item, values, probe, default):
                    ok = False
                    if not probe.missing:
                        return None
            if not probe.missing:
                return dict(oob) if ok else None
            key = sorted(probe.missing, key=repr)[0]
            # element sort of the read: recover it from any nth atom
            sort = _oob_sort(items, key)
            for val in oob_dom(sort):
                got = go({**oob, key: val})
                if got is not None:
                    return got
            return None
        return go({})

    def assign(k: int, values) -> Optional[Tuple[dict, dict]]:
        if k == len(variables):
            oob = check_full(values)
            return (dict(values), oob) if oob is not None else None
        v = variables[k]
        for val in domains[k]:
            spend()
            values[v] = val
            ok = True
            for item in when.get(k, ()):
                probe = _OobProbe({})
                if not _holds(item, values, probe, default) and not probe.missing:
                    ok = False
                    break
            if ok:
                got = assign(k + 1, values)
                if got is not None:
                    return got
        values.pop(v, None)
        return None

    try:
        got = assign(0, {})
    except _Budget:
        return OracleResult("unknown", reason="state cap exceeded")
    if got is None:
        return OracleResult("unsat")
    return OracleResult("sat", assignment=got[0], nth_oob=got[1])


def _oob_sort(items: List[Item], key: tuple) -> tm.Sort:
    for item in items:
        for atom in _atoms(item):
            for t in tm.subterms(atom):
                if t.op == tm.NTH:
                    return t.sort
    return tm.INT


def fits_bounds(values: Dict[Term, object], bounds: Bounds) -> bool:
    """Whether a model assignment lies within the oracle's search space."""
    elems: Set[object] = set()
    for v, val in values.items():
        if isinstance(val, tuple):
            if len(val) > bounds.max_len:
                return False
            elems.update(val)
        elif isinstance(val, int):
            if not v.is_var or v.sort != tm.INT:
                continue
            if abs(val) > bounds.int_bound:
                return False
    ints = {e for e in elems if isinstance(e, int)}
    others = {e for e in elems if not isinstance(e, int)}
    if ints and (min(ints) < 0 or max(ints) >= bounds.max_elem):
        return False
    if len(others) > bounds.max_elem:
        return False
    return True
