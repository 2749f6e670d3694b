"""Solver configurations: flat literal sets S, arithmetic constraint sets A.

A configuration keeps the two constraint sets of a search node plus the
bookkeeping that flattening needs (defining variables for non-variable terms,
length variables for sequence variables).  Integer (dis)equalities live in both
S and A; inequalities and binary disjunctions live only in A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from . import terms as tm
from .terms import Term


@dataclass(frozen=True)
class Literal:
    pos: bool
    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        op = "=" if self.pos else "!="
        return f"({op} {self.lhs!r} {self.rhs!r})"


def _simple(t: Term) -> bool:
    return t.is_var or t.op == tm.CONST or \
        (t.op == tm.NEG and t.args[0].op == tm.CONST)


def literal(pos: bool, a: Term, b: Term) -> Literal:
    # canonical orientation: variables and numerals go left, function
    # applications right; ties broken by term id
    if _simple(a) and not _simple(b):
        return Literal(pos, a, b)
    if _simple(b) and not _simple(a):
        return Literal(pos, b, a)
    if b.id < a.id:
        a, b = b, a
    return Literal(pos, a, b)


# ---------------------------------------------------------------------------
# linear arithmetic atoms

REL_LE = "<="
REL_EQ = "=="
REL_NE = "!="


@dataclass(frozen=True)
class LinAtom:
    """sum(c*x) rel rhs over integer variables."""
    coeffs: Tuple[Tuple[Term, int], ...]
    rel: str
    rhs: int

    def __repr__(self) -> str:
        lhs = " + ".join(f"{c}*{x.name}" for x, c in self.coeffs) or "0"
        return f"({lhs} {self.rel} {self.rhs})"

    @property
    def key(self):
        k = getattr(self, "_key", None)
        if k is None:
            k = (tuple((x.id, c) for x, c in self.coeffs),
                 self.rel, self.rhs)
            object.__setattr__(self, "_key", k)
        return k


Clause = Tuple[LinAtom, LinAtom]


def lin_atom(coeffs: Dict[Term, int], rel: str, rhs: int) -> LinAtom:
    items = sorted(((x, c) for x, c in coeffs.items() if c != 0),
                   key=lambda p: p[0].id)
    if items:
        g = 0
        for _, c in items:
            g = math.gcd(g, abs(c))
        if rel == REL_LE and g > 1:
            items = [(x, c // g) for x, c in items]
            rhs //= g  # floor: sound tightening for integer solutions
        elif rel in (REL_EQ, REL_NE) and g > 1 and rhs % g == 0:
            items = [(x, c // g) for x, c in items]
            rhs //= g
        if rel in (REL_EQ, REL_NE) and items[0][1] < 0:
            items = [(x, -c) for x, c in items]
            rhs = -rhs
    return LinAtom(tuple(items), rel, rhs)


def negate_atom(a: LinAtom) -> List[List[LinAtom]]:
    """Negation as a list of conjunctions (DNF); used by entailment checks."""
    co = dict(a.coeffs)
    if a.rel == REL_LE:  # not(e <= c)  ==  -e <= -c-1
        return [[lin_atom({x: -c for x, c in co.items()}, REL_LE, -a.rhs - 1)]]
    if a.rel == REL_EQ:
        return [[lin_atom(co, REL_LE, a.rhs - 1)],
                [lin_atom({x: -c for x, c in co.items()}, REL_LE, -a.rhs - 1)]]
    return [[lin_atom(co, REL_EQ, a.rhs)]]


def mk_clause(a: LinAtom, b: LinAtom) -> Clause:
    if b.key < a.key:
        a, b = b, a
    return (a, b)


def linearize(t: Term) -> Tuple[Dict[Term, int], int]:
    """Decompose a pure LIA term into coefficients and a constant."""
    coeffs: Dict[Term, int] = {}
    const = 0

    def walk(u: Term, sign: int):
        nonlocal const
        if u.op == tm.CONST:
            const += sign * u.value  # type: ignore[operator]
        elif u.op == tm.VAR:
            coeffs[u] = coeffs.get(u, 0) + sign
        elif u.op == tm.NEG:
            walk(u.args[0], -sign)
        elif u.op == tm.ADD:
            for a in u.args:
                walk(a, sign)
        else:
            raise tm.SortError(f"not a linear term: {u!r}")

    walk(t, 1)
    return coeffs, const


def eq_atom(a: Term, b: Term, pos: bool) -> LinAtom:
    ca, ka = linearize(a)
    cb, kb = linearize(b)
    for x, c in cb.items():
        ca[x] = ca.get(x, 0) - c
    return lin_atom(ca, REL_EQ if pos else REL_NE, kb - ka)


def le_atom(a: Term, b: Term) -> LinAtom:
    ca, ka = linearize(a)
    cb, kb = linearize(b)
    for x, c in cb.items():
        ca[x] = ca.get(x, 0) - c
    return lin_atom(ca, REL_LE, kb - ka)


# ---------------------------------------------------------------------------
# fresh variables, shared across the branches of one solve

class SolveCtx:
    def __init__(self, trace: Optional[List[str]] = None):
        self.counter = 0
        self.witness: Dict[tuple, tuple] = {}
        self.steps = 0
        self.rule_counts: Dict[str, int] = {}
        self.trace = trace

    def fresh(self, sort: tm.Sort) -> Term:
        pref = {"Int": "_i", "Seq": "_k"}.get(sort.kind, "_e")
        v = tm.var(f"{pref}{self.counter}", sort)
        self.counter += 1
        return v

    def witnessed(self, key: tuple, sorts: Tuple[tm.Sort, ...]) -> tuple:
        got = self.witness.get(key)
        if got is None:
            got = tuple(self.fresh(s) for s in sorts)
            self.witness[key] = got
        return got


_ARITH_OPS = (tm.VAR, tm.CONST, tm.ADD, tm.NEG)


class Configuration:
    """One search node's constraint state."""

    def __init__(self, ctx: SolveCtx):
        self.ctx = ctx
        self.s: Dict[Literal, None] = {}
        self.a_atoms: Dict[LinAtom, None] = {}
        self.a_clauses: Dict[Clause, None] = {}
        self.len_var: Dict[Term, Term] = {}
        self.defs: Dict[Term, Term] = {}
        self.treated: Set[tuple] = set()
        self.csplit_depth: Dict[int, int] = {}
        # models of A learned while refuting candidate propagations;
        # inherited by children and re-validated against new atoms only
        self.amodels: List[Dict[int, int]] = []
        self.aseen_atoms = 0
        self.aseen_clauses = 0
        self.lm: Optional[Dict[Term, int]] = None
        self.cc = None            # last closure, reused incrementally
        self.cc_n = 0             # literals of s it covers

    def copy(self) -> "Configuration":
        c = Configuration.__new__(Configuration)
        c.ctx = self.ctx
        c.s = dict(self.s)
        c.a_atoms = dict(self.a_atoms)
        c.a_clauses = dict(self.a_clauses)
        c.len_var = dict(self.len_var)
        c.defs = dict(self.defs)
        c.treated = set(self.treated)
        c.csplit_depth = dict(self.csplit_depth)
        c.amodels = list(self.amodels)
        c.aseen_atoms = self.aseen_atoms
        c.aseen_clauses = self.aseen_clauses
        c.lm = self.lm
        c.cc = self.cc
        c.cc_n = self.cc_n
        return c

    # -- membership -------------------------------------------------------
    def has_lit(self, pos: bool, a: Term, b: Term) -> bool:
        return literal(pos, a, b) in self.s

    def has_atom(self, a: LinAtom) -> bool:
        return a in self.a_atoms

    # -- insertion --------------------------------------------------------
    def add_atom(self, a: LinAtom) -> bool:
        if a in self.a_atoms:
            return False
        self.a_atoms[a] = None
        return True

    def add_clause(self, a: LinAtom, b: LinAtom) -> bool:
        cl = mk_clause(a, b)
        if cl in self.a_clauses:
            return False
        self.a_clauses[cl] = None
        return True

    def _insert(self, lit: Literal) -> bool:
        if lit in self.s:
            return False
        self.s[lit] = None
        # integer (dis)equalities over LIA terms belong to A as well
        if lit.lhs.sort == tm.INT and lit.lhs.op in _ARITH_OPS and lit.rhs.op in _ARITH_OPS:
            self.add_atom(eq_atom(lit.lhs, lit.rhs, lit.pos))
        if lit.pos and lit.lhs.is_var and not lit.rhs.is_var and lit.rhs.op != tm.CONST:
            self.defs.setdefault(lit.rhs, lit.lhs)
        return True

    def ensure_len(self, x: Term) -> Term:
        """The designated length variable of a sequence variable."""
        lv = self.len_var.get(x)
        if lv is None:
            (lv,) = self.ctx.witnessed(("len", x.id), (tm.INT,))
            self.len_var[x] = lv
            self._insert(literal(True, lv, tm.length(x)))
        return lv

    def name_term(self, t: Term) -> Term:
        """A variable (or numeral) naming t, introducing defining literals."""
        if t.is_var:
            if t.sort.kind == "Seq":
                self.ensure_len(t)
            return t
        if t.op == tm.CONST:
            return t
        if t.op == tm.LEN:
            return self.ensure_len(self.name_term(t.args[0]))
        if t.op == tm.NEG and t.args[0].op == tm.CONST:
            # negative numeral: keep as a term, linearize handles it
            return t
        flat = tm.mk(t.op, [self.name_term(a) for a in t.args], t.sort) \
            if t.args else t
        if flat.is_var or flat.op == tm.CONST:
            return self.name_term(flat) if flat.is_var else flat
        v = self.defs.get(flat)
        if v is None:
            (v,) = self.ctx.witnessed(("flat", flat.id), (flat.sort,))
            self.defs[flat] = v
            if v.sort.kind == "Seq":
                self.ensure_len(v)
            self._insert(literal(True, v, flat))
        return v

    def arith_term(self, t: Term) -> Term:
        """Rewrite an Int term into the LIA language, naming foreign parts."""
        if t.op == tm.CONST or t.is_var:
            return t
        if t.op == tm.ADD:
            return tm.add(*[self.arith_term(a) for a in t.args])
        if t.op == tm.NEG:
            return tm.neg(self.arith_term(t.args[0]))
        if t.op == tm.LEN:
            return self.ensure_len(self.name_term(t.args[0]))
        return self.name_term(t)

    def add_eq(self, a: Term, b: Term, pos: bool = True) -> bool:
        """Flatten and insert an equality or disequality."""
        if a.sort != b.sort:
            raise tm.SortError(f"(dis)equality over {a.sort} and {b.sort}")
        if not pos:
            return self._insert(literal(False, self.name_term(a), self.name_term(b)))
        a_flat = not a.is_var and a.op != tm.CONST
        b_flat = not b.is_var and b.op != tm.CONST
        if a_flat and b_flat:
            return self.add_eq(self.name_term(a), b, True)
        if a_flat:
            a, b = b, a
        if b.is_var or b.op == tm.CONST:
            a2, b2 = self.name_term(a), self.name_term(b)
            if a2 is b2:
                return False
            return self._insert(literal(True, a2, b2))
        # b is a function term: name its arguments, keep the application
        if b.op == tm.LEN:
            return self.add_eq(a, self.name_term(b), True)
        flat = tm.mk(b.op, [self.name_term(x) for x in b.args], b.sort) \
            if b.args else b
        if flat.is_var or flat.op == tm.CONST:
            return self.add_eq(a, flat, True)
        av = self.name_term(a)
        if av.sort.kind == "Seq":
            self.ensure_len(av)
        return self._insert(literal(True, av, flat))

    # -- views ------------------------------------------------------------
    def seq_vars(self) -> List[Term]:
        return sorted(self.len_var.keys(), key=lambda v: v.id)

    def int_vars_in_a(self) -> Set[Term]:
        out: Set[Term] = set()
        for at in self.a_atoms:
            out.update(x for x, _ in at.coeffs)
        for c1, c2 in self.a_clauses:
            out.update(x for x, _ in c1.coeffs)
            out.update(x for x, _ in c2.coeffs)
        return out

    def int_vars_in_s(self) -> Set[Term]:
        out: Set[Term] = set()
        for lit in self.s:
            for t in (lit.lhs, lit.rhs):
                for u in tm.subterms(t):
                    if u.is_var and u.sort == tm.INT:
                        out.add(u)
        return out
