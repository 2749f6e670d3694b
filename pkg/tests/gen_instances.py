"""Seeded generators and independent oracles shared by the tests."""
from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Tuple

from seqsat import terms as tm
from seqsat.config import Clause, LinAtom, lin_atom, REL_EQ, REL_LE, REL_NE
from seqsat.terms import Term

# ---------------------------------------------------------------------------
# fixed instances

SWAP = """
(declare-const a (Seq Int))
(declare-const b (Seq Int))
(declare-const c (Seq Int))
(declare-const i Int)
(declare-const j Int)
(assert (<= 0 i))
(assert (< i (seq.len a)))
(assert (<= 0 j))
(assert (< j (seq.len a)))
(assert (= b (seq.update a i (seq.nth a j))))
(assert (= c (seq.update b j (seq.nth a i))))
(assert (not (and (= (seq.nth c i) (seq.nth a j))
                  (= (seq.nth c j) (seq.nth a i)))))
(check-sat)
"""

CYCLIC = """
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const y (Seq E))
(declare-const z (Seq E))
(declare-const v (Seq E))
(declare-const w (Seq E))
(declare-const u E)
(assert (= x (seq.++ y z)))
(assert (= z (seq.++ v x w)))
(assert (= v (seq.unit u)))
(check-sat)
"""

UPDATE_SPLIT = """
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const y (Seq E))
(declare-const y1 (Seq E))
(declare-const y2 (Seq E))
(declare-const a E)
(declare-const i Int)
(assert (= y (seq.update x i a)))
(assert (= y (seq.++ y1 y2)))
(assert (<= 0 i))
(assert (< i (seq.len y1)))
(assert (< 0 (seq.len y1)))
(assert (< 0 (seq.len y2)))
(check-sat)
(get-model)
"""

# ---------------------------------------------------------------------------
# random linear-arithmetic systems

def rand_lia(rng: random.Random, max_vars: int = 5, coeff: int = 4
             ) -> Tuple[List[LinAtom], List[Clause], List[Term]]:
    xs = [tm.var(f"lv{i}", tm.INT) for i in range(rng.randint(1, max_vars))]

    def atom(rels) -> LinAtom:
        n = rng.randint(1, min(3, len(xs)))
        co = {x: rng.choice([c for c in range(-coeff, coeff + 1) if c])
              for x in rng.sample(xs, n)}
        return lin_atom(co, rng.choice(rels), rng.randint(-6, 6))

    atoms = [atom([REL_LE, REL_LE, REL_EQ, REL_NE])
             for _ in range(rng.randint(1, 6))]
    clauses = []
    for _ in range(rng.randint(0, 2)):
        # clause alternatives never carry disequalities (engine contract)
        a, b = atom([REL_LE, REL_EQ]), atom([REL_LE, REL_EQ])
        if a.key != b.key:
            clauses.append((a, b) if a.key <= b.key else (b, a))
    return atoms, clauses, xs


def atom_holds(a: LinAtom, m: Dict[Term, int]) -> bool:
    v = sum(c * m[x] for x, c in a.coeffs)
    if a.rel == REL_LE:
        return v <= a.rhs
    if a.rel == REL_EQ:
        return v == a.rhs
    return v != a.rhs


def grid_models(atoms: List[LinAtom], clauses: List[Clause], xs: List[Term],
                bound: int) -> List[Dict[Term, int]]:
    """All solutions with every variable in [-bound, bound]."""
    out = []
    for vals in itertools.product(range(-bound, bound + 1), repeat=len(xs)):
        m = dict(zip(xs, vals))
        if all(atom_holds(a, m) for a in atoms) and \
                all(any(atom_holds(a, m) for a in cl) for cl in clauses):
            out.append(m)
    return out


# ---------------------------------------------------------------------------
# random sequence scripts (SMT-LIB subset text)

def rand_script(rng: random.Random) -> str:
    nseq = rng.choice([1, 2, 2, 2, 3, 3, 3, 4])
    nelem = rng.randint(1, 2)
    nint = rng.randint(0, 2)
    seqs = [f"s{i}" for i in range(nseq)]
    elems = [f"e{i}" for i in range(nelem)]
    ints = [f"i{i}" for i in range(nint)]
    budget = [3]  # composite sequence operations allowed in total

    def int_term() -> str:
        r = rng.random()
        if ints and r < 0.4:
            return rng.choice(ints)
        return str(rng.randint(0, 3))

    def elem_term(depth: int) -> str:
        if budget[0] > 0 and depth < 2 and rng.random() < 0.3:
            budget[0] -= 1
            return f"(seq.nth {seq_term(depth + 1)} {int_term()})"
        return rng.choice(elems)

    def seq_term(depth: int) -> str:
        r = rng.random()
        if budget[0] > 0 and depth < 2 and r < 0.5:
            budget[0] -= 1
            op = rng.choice(["++", "update", "extract"])
            if op == "++":
                return f"(seq.++ {seq_term(depth + 1)} {seq_term(depth + 1)})"
            if op == "update":
                return (f"(seq.update {seq_term(depth + 1)} {int_term()} "
                        f"{elem_term(depth + 1)})")
            return (f"(seq.extract {seq_term(depth + 1)} {int_term()} "
                    f"{int_term()})")
        if r < 0.58:
            return f"(seq.unit {elem_term(depth + 1)})"
        return rng.choice(seqs)

    def flat_lit() -> str:
        r = rng.random()
        if r < 0.45:
            s, n = rng.choice(seqs), rng.randint(0, 3)
            rel = rng.choice(["<=", "=", ">="])
            if rel == ">=":
                return f"(<= {n} (seq.len {s}))"
            return f"({rel} (seq.len {s}) {n})"
        if r < 0.7 and len(elems) > 1:
            a, b = rng.sample(elems, 2)
            lit = f"(= {a} {b})"
        elif ints:
            lit = f"(= {rng.choice(ints)} {rng.randint(0, 3)})"
        else:
            s = rng.choice(seqs)
            lit = f"(= (seq.len {s}) {rng.randint(0, 3)})"
        return lit if rng.random() < 0.6 else f"(not {lit})"

    def assertion() -> str:
        r = rng.random()
        if r < 0.45:
            lit = f"(= {seq_term(0)} {seq_term(0)})"
            return lit if rng.random() < 0.75 else f"(not {lit})"
        if r < 0.6:
            lit = f"(= {elem_term(0)} {elem_term(0)})"
            return lit if rng.random() < 0.7 else f"(not {lit})"
        if r < 0.75:
            return f"(or {flat_lit()} {flat_lit()})"
        return flat_lit()

    lines = ["(declare-sort E 0)"]
    lines += [f"(declare-const {s} (Seq E))" for s in seqs]
    lines += [f"(declare-const {e} E)" for e in elems]
    lines += [f"(declare-const {i} Int)" for i in ints]
    lines += [f"(assert {assertion()})" for _ in range(rng.randint(2, 5))]
    lines.append("(check-sat)")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# random terms plus an independent normal-form oracle over plain tuples

def _rand_seq(rng: random.Random, elem: tm.Sort, depth: int) -> Term:
    sq = tm.seq_sort(elem)
    r = rng.random()
    if depth >= 4 or r < 0.3:
        return rng.choice([tm.var("a", sq), tm.var("b", sq), tm.empty(elem),
                           tm.unit(tm.var("u", elem))])
    if r < 0.6:
        n = rng.randint(2, 3)
        return tm.concat(*[_rand_seq(rng, elem, depth + 1) for _ in range(n)])
    if r < 0.8:
        return tm.update(_rand_seq(rng, elem, depth + 1),
                         _rand_int(rng, elem, depth + 1), tm.var("u", elem))
    return tm.extract(_rand_seq(rng, elem, depth + 1),
                      _rand_int(rng, elem, depth + 1), tm.var("j", tm.INT))


def _rand_int(rng: random.Random, elem: tm.Sort, depth: int) -> Term:
    if depth < 4 and rng.random() < 0.4:
        return tm.length(_rand_seq(rng, elem, depth + 1))
    return rng.choice([tm.var("i", tm.INT), tm.const(rng.randint(0, 2))])


def rand_term(rng: random.Random) -> Term:
    """Random Seq- or Int-sorted term, biased toward rewritable shapes."""
    elem = tm.elem_sort("E")
    if rng.random() < 0.3:
        return tm.length(_rand_seq(rng, elem, 0))
    return _rand_seq(rng, elem, 0)


def to_tuple(t: Term):
    if t.is_var:
        return ("var", t.name)
    if t.op == tm.CONST:
        return ("const", t.value)
    return (t.op, tuple(to_tuple(a) for a in t.args))


def _tup_redex(t) -> Optional[object]:
    """Rewrite the root once, or return None."""
    op = t[0]
    if op == tm.LEN:
        (s,) = t[1]
        if s[0] == tm.EMPTY:
            return ("const", 0)
        if s[0] == tm.UNIT:
            return ("const", 1)
        if s[0] == tm.UPDATE:
            return (tm.LEN, (s[1][0],))
        if s[0] == tm.CONCAT:
            out = (tm.LEN, (s[1][0],))
            for c in s[1][1:]:
                out = (tm.ADD, (out, (tm.LEN, (c,))))
            return out
    if op == tm.CONCAT and any(c[0] in (tm.EMPTY, tm.CONCAT) for c in t[1]):
        kids = []
        for c in t[1]:
            if c[0] == tm.EMPTY:
                continue
            kids.extend(c[1] if c[0] == tm.CONCAT else [c])
        if not kids:
            return (tm.EMPTY, ())
        if len(kids) == 1:
            return kids[0]
        return (tm.CONCAT, tuple(kids))
    return None


def _tup_positions(t, pos=()):
    yield pos, t
    if t[0] not in ("var", "const"):
        for k, c in enumerate(t[1]):
            yield from _tup_positions(c, pos + (k,))


def _tup_replace(t, pos, new):
    if not pos:
        return new
    kids = list(t[1])
    kids[pos[0]] = _tup_replace(kids[pos[0]], pos[1:], new)
    return (t[0], tuple(kids))


def oracle_nf(t, rng: random.Random, max_steps: int):
    """Fixpoint of the rules applied one redex at a time in random order."""
    steps = 0
    while True:
        redexes = [(p, r) for p, s in _tup_positions(t)
                   if (r := _tup_redex(s)) is not None]
        if not redexes:
            return t, steps
        pos, new = rng.choice(redexes)
        t = _tup_replace(t, pos, new)
        steps += 1
        assert steps <= max_steps, "rewriting exceeded the step bound"


def flatten_adds(t):
    """Canonical view modulo associativity and the unit 0 of +."""
    if t[0] in ("var", "const"):
        return t
    kids = tuple(flatten_adds(c) for c in t[1])
    if t[0] == tm.ADD:
        out = []
        for c in kids:
            out.extend(c[1] if c[0] == tm.ADD else [c])
        out = [c for c in out if c != ("const", 0)]
        if not out:
            return ("const", 0)
        if len(out) == 1:
            return out[0]
        return (tm.ADD, tuple(out))
    return (t[0], kids)


def term_size(t: Term) -> int:
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t: Term) -> int:
    return 1 + max((term_depth(a) for a in t.args), default=0)


# ---------------------------------------------------------------------------
# handcrafted array-style instances (translated to sequences by the bench)

def _chain(depth: int, probe: int, want_stored: bool) -> str:
    """Read-over-write chain with distinct constant indices 0..depth-1."""
    t = "a"
    for k in range(depth):
        t = f"(store {t} {k} {100 + k})"
    lines = ["(declare-const a (Array Int Int))"]
    if want_stored:
        # probing a written cell for the wrong value: unsat
        lines.append(f"(assert (<= {depth} (seq.len a)))")
        lines.append(f"(assert (not (= (select {t} {probe}) {100 + probe})))")
    else:
        # probing an untouched in-bounds cell: sat
        lines.append(f"(assert (<= {depth + 1} (seq.len a)))")
        lines.append(f"(assert (= (select {t} {depth}) 7))")
    lines.append("(check-sat)")
    return "\n".join(lines)


def array_suite() -> List[Tuple[str, str]]:
    """(name, source) pairs; every index is asserted in bounds."""
    out: List[Tuple[str, str]] = []

    def inb(v, arr="a"):
        return f"(assert (<= 0 {v})) (assert (< {v} (seq.len {arr})))"

    base = "(declare-const a (Array Int Int))\n" \
           "(declare-const b (Array Int Int))\n" \
           "(declare-const i Int)\n(declare-const j Int)\n" \
           "(declare-const v Int)\n(declare-const w Int)\n"

    out.append(("row-same", base + inb("i") +
                "(assert (not (= (select (store a i v) i) v)))\n(check-sat)"))
    out.append(("row-diff", base + inb("i") + inb("j") +
                "(assert (not (= i j)))\n"
                "(assert (not (= (select (store a i v) j) (select a j))))\n"
                "(check-sat)"))
    out.append(("row-sat", base + inb("i") +
                "(assert (= (select (store a i v) i) v))\n(check-sat)"))
    out.append(("store-id", base + inb("i") +
                "(assert (= b (store a i (select a i))))\n"
                "(assert (not (= (select b i) (select a i))))\n(check-sat)"))
    out.append(("store-commute", base + inb("i") + inb("j") +
                "(assert (not (= i j)))\n"
                "(assert (not (= (select (store (store a i v) j w) i) v)))\n"
                "(check-sat)"))
    out.append(("store-overwrite", base + inb("i") +
                "(assert (not (= (select (store (store a i v) i w) i) w)))\n"
                "(check-sat)"))
    out.append(("store-eq-len", base + inb("i") +
                "(assert (= b (store a i v)))\n"
                "(assert (not (= (seq.len b) (seq.len a))))\n(check-sat)"))
    out.append(("store-sat-ne", base + inb("i") +
                "(assert (= b (store a i v)))\n"
                "(assert (not (= (select b i) (select a i))))\n(check-sat)"))
    out.append(("two-cells", base + inb("i") + inb("j") +
                "(assert (not (= i j)))\n"
                "(assert (= b (store (store a i v) j w)))\n"
                "(assert (not (and (= (select b i) v) (= (select b j) w))))\n"
                "(check-sat)"))
    out.append(("swap-cells", base + inb("i") + inb("j") +
                "(assert (= b (store (store a i (select a j)) j (select a i))))\n"
                "(assert (= i j))\n"
                "(assert (not (= (select b i) (select a i))))\n(check-sat)"))
    for d in (2, 4, 8, 20):
        out.append((f"chain-hit-{d}", _chain(d, d // 2, True)))
    for d in (2, 3, 4, 5):
        out.append((f"chain-sat-{d}", _chain(d, d // 2, False)))
    out.append(("chain-last-20", _chain(20, 19, True)))
    out.append(("chain-first-20", _chain(20, 0, True)))
    assert len(out) == 20
    return out
