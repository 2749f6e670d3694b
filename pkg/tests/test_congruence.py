"""Congruence closure against a naive fixpoint oracle."""
from __future__ import annotations

import random
from typing import Dict, List, Set, Tuple

from seqsat import terms as tm
from seqsat.config import Literal, literal
from seqsat.congruence import Closure
from seqsat.terms import Term

E = tm.elem_sort("E")
SQ = tm.seq_sort(E)


# ---------------------------------------------------------------------------
# oracle: relation over term ids closed under equivalence + congruence

def naive_classes(lits: List[Literal]) -> Tuple[Dict[int, int], bool]:
    """id -> class representative id, plus a disequality-conflict flag."""
    univ: Dict[int, Term] = {}
    for lit in lits:
        for side in (lit.lhs, lit.rhs):
            for s in tm.subterms(side):
                univ[s.id] = s
    rep = {i: i for i in univ}

    def find(i: int) -> int:
        while rep[i] != i:
            i = rep[i]
        return i

    def union(i: int, j: int):
        ri, rj = find(i), find(j)
        if ri != rj:
            rep[ri] = rj

    for lit in lits:
        if lit.pos:
            union(lit.lhs.id, lit.rhs.id)
    while True:  # congruence to fixpoint, quadratic and obviously correct
        changed = False
        ts = list(univ.values())
        for a in ts:
            for b in ts:
                if a.id >= b.id or not a.args or not b.args:
                    continue
                if a.op != b.op or len(a.args) != len(b.args):
                    continue
                if find(a.id) == find(b.id):
                    continue
                if all(find(x.id) == find(y.id)
                       for x, y in zip(a.args, b.args)):
                    union(a.id, b.id)
                    changed = True
        if not changed:
            break
    conflict = any(not lit.pos and find(lit.lhs.id) == find(lit.rhs.id)
                   for lit in lits)
    return {i: find(i) for i in univ}, conflict


def rand_lits(rng: random.Random, n: int) -> List[Literal]:
    seqs = [tm.var(f"cs{i}", SQ) for i in range(3)]
    elems = [tm.var(f"ce{i}", E) for i in range(2)]
    ints = [tm.var(f"ci{i}", tm.INT) for i in range(2)]

    def seq_term(depth: int) -> Term:
        r = rng.random()
        if depth >= 2 or r < 0.4:
            return rng.choice(seqs)
        if r < 0.6:
            return tm.concat(seq_term(depth + 1), seq_term(depth + 1))
        if r < 0.8:
            return tm.update(seq_term(depth + 1), rng.choice(ints),
                             rng.choice(elems))
        return tm.unit(rng.choice(elems))

    def term() -> Term:
        r = rng.random()
        if r < 0.55:
            return seq_term(0)
        if r < 0.75:
            return rng.choice(elems) if rng.random() < 0.5 else \
                tm.nth(seq_term(1), rng.choice(ints))
        return rng.choice(ints) if rng.random() < 0.5 else \
            tm.length(seq_term(1))

    out = []
    while len(out) < n:
        a = term()
        b = term()
        if a.sort != b.sort:
            continue
        out.append(literal(rng.random() < 0.8, a, b))
    return out


def assert_matches_oracle(lits: List[Literal]):
    cc = Closure(lits)
    rep, conflict = naive_classes(lits)
    assert (cc.conflict is not None) == conflict
    univ = {s for lit in lits for side in (lit.lhs, lit.rhs)
            for s in tm.subterms(side)}
    for a in univ:
        for b in univ:
            if a.sort != b.sort:
                continue
            assert cc.same(a, b) == (rep[a.id] == rep[b.id]), (a, b)


def test_fixpoint_oracle_fuzz():
    rng = random.Random(31337)
    for _ in range(200):
        assert_matches_oracle(rand_lits(rng, rng.randint(1, 8)))


def test_extend_equals_scratch():
    rng = random.Random(99)
    for _ in range(150):
        lits = rand_lits(rng, rng.randint(2, 8))
        cut = rng.randint(1, len(lits) - 1)
        base = Closure(lits[:cut])
        if base.conflict is not None:
            continue
        inc = Closure.extend(base, lits[cut:])
        ref = Closure(lits)
        assert (inc.conflict is None) == (ref.conflict is None)
        univ = {s for lit in lits for side in (lit.lhs, lit.rhs)
                for s in tm.subterms(side)}
        for a in univ:
            for b in univ:
                if a.sort == b.sort:
                    assert inc.same(a, b) == ref.same(a, b)


def test_basic_congruence():
    a, b = tm.var("a", SQ), tm.var("b", SQ)
    i = tm.var("i", tm.INT)
    lits = [literal(True, a, b)]
    cc = Closure(lits + [literal(True, tm.nth(a, i), tm.nth(a, i))])
    assert cc.same(tm.nth(a, i), tm.nth(a, i))
    cc = Closure([literal(True, a, b),
                  literal(False, tm.length(a), tm.length(b))])
    assert cc.conflict is not None


def test_disequal_reports_asserted_pairs():
    a, b = tm.var("a", SQ), tm.var("b", SQ)
    cc = Closure([literal(False, a, b)])
    assert cc.disequal(a, b)
    assert not cc.disequal(a, a)
