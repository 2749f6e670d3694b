"""Bounded brute-force enumeration oracle."""
from __future__ import annotations

import random

from gen_instances import rand_script
from seqsat import terms as tm
from seqsat.frontend import parse_script, to_branches
from seqsat.oracle import (Bounds, elem_domain, fits_bounds, int_domain,
                           oracle_solve, seq_domain)

E = tm.elem_sort("E")


def items_of(text: str):
    sc = parse_script(text)
    brs = to_branches(sc.assertions)
    assert len(brs) == 1
    return sc, brs[0].items


def test_domains():
    assert set(int_domain(2)) == {-2, -1, 0, 1, 2}
    assert len(elem_domain(E, 3)) == 3
    dom = seq_domain(tm.seq_sort(E), 2, 2)
    # lengths 0..2 over 2 elements: 1 + 2 + 4
    assert len(dom) == 7
    assert () in dom


def test_known_sat():
    sc, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const e E)
(assert (= x (seq.unit e)))
(check-sat)
""")
    r = oracle_solve(items)
    assert r.status == "sat"
    x = r.assignment[sc.decls["x"]]
    e = r.assignment[sc.decls["e"]]
    assert x == (e,)


def test_known_unsat():
    _, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const e E)
(assert (= x (seq.unit e)))
(assert (= (seq.len x) 2))
(check-sat)
""")
    assert oracle_solve(items).status == "unsat"


def test_update_oob_identity_semantics():
    _, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const e E)
(declare-const i Int)
(assert (<= (seq.len x) i))
(assert (not (= x (seq.update x i e))))
(check-sat)
""")
    assert oracle_solve(items).status == "unsat"


def test_nth_oob_is_free():
    # an out-of-bounds read can take any value, so requiring two distinct
    # out-of-bounds reads of the same cell to differ is unsatisfiable,
    # while distinct cells remain free
    _, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const e E)
(assert (= (seq.len x) 0))
(assert (not (= (seq.nth x 3) (seq.nth x 3))))
(check-sat)
""")
    assert oracle_solve(items).status == "unsat"
    sc, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(assert (= (seq.len x) 0))
(assert (not (= (seq.nth x 3) (seq.nth x 4))))
(check-sat)
""")
    r = oracle_solve(items)
    assert r.status == "sat"


def test_extract_semantics():
    _, items = items_of("""
(declare-sort E 0)
(declare-const x (Seq E))
(declare-const y (Seq E))
(assert (= (seq.len x) 3))
(assert (= y (seq.extract x 1 5)))
(assert (not (= (seq.len y) 2)))
(check-sat)
""")
    assert oracle_solve(items).status == "unsat"


def test_or2_items():
    _, items = items_of("""
(declare-const s (Seq Int))
(assert (or (<= (seq.len s) 0) (<= 2 (seq.len s))))
(assert (= (seq.len s) 1))
(check-sat)
""")
    assert oracle_solve(items).status == "unsat"


def test_budget_gives_unknown():
    _, items = items_of("""
(declare-sort E 0)
(declare-const a (Seq E))
(declare-const b (Seq E))
(declare-const c (Seq E))
(declare-const d (Seq E))
(assert (not (= a b)))
(assert (not (= c d)))
(check-sat)
""")
    r = oracle_solve(items, Bounds(state_cap=50))
    assert r.status == "unknown" and r.reason


def test_fits_bounds():
    e = tm.var("fe", E)
    s = tm.var("fs", tm.seq_sort(E))
    i = tm.var("fi", tm.INT)
    b = Bounds(max_len=2, max_elem=2, int_bound=3)
    assert fits_bounds({i: 3, s: ("a", "b")}, b)
    assert not fits_bounds({i: 4}, b)
    assert not fits_bounds({s: ("a", "b", "c")}, b)


def test_oracle_model_satisfies_instance():
    rng = random.Random(919)
    sats = 0
    for _ in range(40):
        sc = parse_script(rand_script(rng))
        for br in to_branches(sc.assertions):
            r = oracle_solve(br.items)
            if r.status == "sat":
                sats += 1
                assert fits_bounds(r.assignment, Bounds())
                break
    assert sats > 10
