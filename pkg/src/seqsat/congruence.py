"""Congruence closure over the flat literal set S."""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Set, Tuple

from . import terms as tm
from .config import Literal
from .terms import Term


class Closure:
    def __init__(self, lits: Iterable[Literal]):
        self.parent: Dict[Term, Term] = {}
        self.members: Dict[Term, List[Term]] = {}
        self.diseqs: List[Literal] = []
        self.conflict: Optional[Literal] = None
        terms: List[Term] = []
        eqs: List[Tuple[Term, Term]] = []
        for lit in lits:
            for side in (lit.lhs, lit.rhs):
                terms.extend(tm.subterms(side))
            if lit.pos:
                eqs.append((lit.lhs, lit.rhs))
            else:
                self.diseqs.append(lit)
        for t in terms:
            if t not in self.parent:
                self.parent[t] = t
                self.members[t] = [t]
        self._close(eqs)
        for lit in self.diseqs:
            if self.find(lit.lhs) is self.find(lit.rhs):
                self.conflict = lit
                break

    @classmethod
    def extend(cls, prev: "Closure", new_lits: Iterable[Literal]) -> "Closure":
        """Closure of the previous literal set plus new literals.

        Cheaper than rebuilding: reuses the union-find and signature
        table, which stay valid because literal sets only grow.
        """
        c = cls.__new__(cls)
        c.parent = dict(prev.parent)
        c.members = {r: list(ms) for r, ms in prev.members.items()}
        c.diseqs = list(prev.diseqs)
        c.conflict = None
        terms: List[Term] = []
        eqs: List[Tuple[Term, Term]] = []
        for lit in new_lits:
            for side in (lit.lhs, lit.rhs):
                terms.extend(tm.subterms(side))
            if lit.pos:
                eqs.append((lit.lhs, lit.rhs))
            else:
                c.diseqs.append(lit)
        sigs = dict(prev.sigs)
        pending = eqs
        for t in terms:
            if t in c.parent:
                continue
            c.parent[t] = t
            c.members[t] = [t]
            if t.args:
                key = (t.op, tuple(c.find(a).id for a in t.args))
                other = sigs.get(key)
                if other is None:
                    sigs[key] = t
                elif c.find(other) is not c.find(t):
                    pending.append((other, t))
        c._close(pending, sigs)
        for lit in c.diseqs:
            if c.find(lit.lhs) is c.find(lit.rhs):
                c.conflict = lit
                break
        return c

    # union-find ----------------------------------------------------------
    def find(self, t: Term) -> Term:
        p = self.parent
        while p[t] is not t:
            p[t] = p[p[t]]  # path halving
            t = p[t]
        return t

    def _union(self, a: Term, b: Term) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra is rb:
            return False
        # keep the lower interning id as representative: deterministic
        if rb.id < ra.id:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.members[ra].extend(self.members.pop(rb))
        return True

    def _close(self, eqs: List[Tuple[Term, Term]],
               sigs: Optional[Dict[tuple, Term]] = None) -> None:
        pending = list(eqs)
        while True:
            changed = False
            for a, b in pending:
                if self._union(a, b):
                    changed = True
            if not changed and sigs is not None:
                self.sigs = sigs
                return
            # merges invalidate the signature table; rebuild it and
            # collect induced congruences
            pending = []
            sigs = {}
            for t in self.parent:
                if not t.args:
                    continue
                key = (t.op, tuple(self.find(a).id for a in t.args))
                other = sigs.get(key)
                if other is None:
                    sigs[key] = t
                elif self.find(other) is not self.find(t):
                    pending.append((other, t))
            if not pending:
                self.sigs = sigs
                return

    # queries -------------------------------------------------------------
    def same(self, a: Term, b: Term) -> bool:
        if a not in self.parent or b not in self.parent:
            return a is b
        return self.find(a) is self.find(b)

    def has(self, t: Term) -> bool:
        return t in self.parent

    def class_of(self, t: Term) -> List[Term]:
        return self.members[self.find(t)]

    def classes(self) -> List[List[Term]]:
        return [self.members[r] for r in sorted(self.members, key=lambda t: t.id)]

    def alpha(self, t: Term) -> Term:
        """Chosen class representative: the lowest-id variable in the class."""
        best = None
        for m in self.class_of(t):
            if m.is_var and (best is None or m.id < best.id):
                best = m
        if best is None:
            raise ValueError(f"class of {t!r} has no variable")
        return best

    def disequal(self, a: Term, b: Term) -> bool:
        for lit in self.diseqs:
            if (self.same(lit.lhs, a) and self.same(lit.rhs, b)) or \
               (self.same(lit.lhs, b) and self.same(lit.rhs, a)):
                return True
        return False
