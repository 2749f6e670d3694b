"""Integer arithmetic kernel against grid enumeration."""
from __future__ import annotations

import random

from gen_instances import atom_holds, grid_models, rand_lia
from seqsat import arith, terms as tm
from seqsat.config import (Clause, LinAtom, lin_atom, REL_EQ, REL_LE, REL_NE)

GRID = 5   # enumeration radius; solver models may lie outside it


def check_against_grid(atoms, clauses, xs):
    grid = grid_models(atoms, clauses, xs, GRID)
    m = arith.lia_check(atoms, clauses)
    if m is None:
        assert not grid, f"solver unsat but grid model exists: {grid[0]}"
        return None
    # solver models must really satisfy the system (vars the solver never
    # saw are unconstrained and read as 0)
    full = {x: m.get(x, 0) for x in xs}
    assert all(atom_holds(a, full) for a in atoms)
    assert all(any(atom_holds(a, full) for a in cl) for cl in clauses)
    return full


def test_grid_fuzz():
    rng = random.Random(4242)
    hits = 0
    for _ in range(120):
        atoms, clauses, xs = rand_lia(rng)
        if check_against_grid(atoms, clauses, xs) is not None:
            hits += 1
    assert hits > 25  # the generator produces a healthy sat/unsat mix


def test_entailment_against_grid():
    rng = random.Random(777)
    checked = 0
    while checked < 120:
        atoms, clauses, xs = rand_lia(rng)
        base = arith.lia_check(atoms, clauses)
        if base is None:
            continue  # entailment queries require a satisfiable base
        co = {x: rng.choice([-2, -1, 1, 2])
              for x in rng.sample(xs, rng.randint(1, len(xs)))}
        atom = lin_atom(co, rng.choice([REL_LE, REL_EQ]), rng.randint(-6, 6))
        cm = arith.entails_or_model(atoms, clauses, atom)
        grid = grid_models(atoms, clauses, xs, GRID)
        if cm is None:
            # entailed: every enumerated model of the base satisfies it
            assert all(atom_holds(atom, g) for g in grid)
        else:
            # refuted: completing the slice countermodel with the base
            # model yields a base model violating the atom
            full = dict(base) | {x: v for x in xs
                                 for i, v in cm.items() if x.id == i}
            fx = {x: full.get(x, 0) for x in xs}
            assert all(atom_holds(a, fx) for a in atoms)
            assert all(any(atom_holds(a, fx) for a in cl) for cl in clauses)
            assert not atom_holds(atom, fx)
        checked += 1


def test_restrict_to_keeps_connected_atoms():
    xs = [tm.var(f"rv{i}", tm.INT) for i in range(4)]
    a0 = lin_atom({xs[0]: 1, xs[1]: 1}, REL_LE, 3)
    a1 = lin_atom({xs[1]: 1}, REL_EQ, 2)
    a2 = lin_atom({xs[2]: 1, xs[3]: -1}, REL_LE, 0)
    q = lin_atom({xs[0]: 1}, REL_LE, 5)
    keep, cls = arith.restrict_to([a0, a1, a2], [], q)
    assert a0 in keep and a1 in keep and a2 not in keep
    assert cls == []


def test_unsat_core_shapes():
    x, y = tm.var("ux", tm.INT), tm.var("uy", tm.INT)
    assert arith.lia_check([lin_atom({x: 1}, REL_LE, 0),
                            lin_atom({x: -1}, REL_LE, -1)], []) is None
    assert arith.lia_check([lin_atom({x: 2}, REL_EQ, 1)], []) is None
    # 0 <= x <= 1 with x != 0 and x != 1
    assert arith.lia_check([lin_atom({x: -1}, REL_LE, 0),
                            lin_atom({x: 1}, REL_LE, 1),
                            lin_atom({x: 1}, REL_NE, 0),
                            lin_atom({x: 1}, REL_NE, 1)], []) is None
    m = arith.lia_check([lin_atom({x: 1, y: 1}, REL_EQ, 3),
                         lin_atom({x: 1, y: -1}, REL_EQ, 1)], [])
    assert m is not None and m[x] == 2 and m[y] == 1


def test_clause_alternatives():
    x = tm.var("cx", tm.INT)
    lo = lin_atom({x: -1}, REL_LE, -5)   # x >= 5
    hi = lin_atom({x: 1}, REL_LE, -5)    # x <= -5
    m = arith.lia_check([], [(hi, lo) if lo.key > hi.key else (lo, hi)])
    assert m is not None and (m.get(x, 0) >= 5 or m.get(x, 0) <= -5)


def test_substitution_keeps_models_valid():
    # regression: chained equality elimination once mutated substitution
    # entries in place, producing "models" violating their own equations
    rng = random.Random(2024)
    for _ in range(200):
        xs = [tm.var(f"sv{i}", tm.INT) for i in range(6)]
        atoms = []
        for _ in range(rng.randint(3, 8)):
            co = {x: rng.choice([-1, 1])
                  for x in rng.sample(xs, rng.randint(2, 3))}
            atoms.append(lin_atom(co, REL_EQ, rng.randint(-3, 3)))
        m = arith.lia_check(atoms, [])
        if m is None:
            continue
        full = {x: m.get(x, 0) for x in xs}
        assert all(atom_holds(a, full) for a in atoms), (atoms, full)


def test_lia_check_is_cached():
    x = tm.var("kx", tm.INT)
    a = lin_atom({x: 1}, REL_EQ, 4)
    m1 = arith.lia_check([a], [])
    m2 = arith.lia_check([a], [])
    assert m1 == m2 and m1[x] == 4
