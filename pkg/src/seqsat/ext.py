"""Extended rules: distributing nth/update over normal forms, and
read-over-write reasoning on atomic sequences."""
from __future__ import annotations

import itertools
from typing import Iterator, List, Optional, Set, Tuple

from . import terms as tm
from .config import Configuration
from .congruence import Closure
from .seqcore import (App, Branch, NormalForms, ONE, ZERO, a_eq, a_le, a_lt,
                      a_ne)
from .terms import Term


def _unit_of(cc: Closure, y: Term) -> Optional[Term]:
    units = sorted((m for m in cc.class_of(y) if m.op == tm.UNIT),
                   key=lambda t: t.id)
    return units[0] if units else None


def _shift_idx(engine, key: tuple, k: int, i: Term, prefix: List[Term]):
    """Index into the k-th component: i minus the preceding lengths.

    Returns (index term for S, defining atoms for A)."""
    if not prefix:
        return i, []
    (v,) = engine.ctx.witnessed(key + (k,), (tm.INT,))
    shift = tm.add(i, *[tm.neg(l) for l in prefix])
    return v, [a_eq(v, shift)]


def distribute_apps(engine, cfg: Configuration, cc: Closure,
                    nfs: NormalForms, marked: Set[int]) -> Iterator[App]:
    for x, t in engine._op_lits(cfg, tm.NTH, marked):
        y, i = t.args
        u = _unit_of(cc, y)
        if u is not None:
            key = ("NthU", x.id, t.id)
            if key in cfg.treated:
                continue
            b1 = Branch(clauses=[(a_lt(i, ZERO), a_lt(ZERO, i))])
            b2 = Branch(atoms=[a_eq(i, ZERO)], lits=[(True, x, u.args[0])])
            yield App("Nth-Unit", (x.id, t.id), [b1, b2], treat_key=key)
            continue
        vec = nfs.canon(y)
        if vec is None or len(vec) < 2:
            continue
        key = ("NthC", x.id, t.id, tuple(w.id for w in vec))
        if key in cfg.treated:
            continue
        ly = engine._lv(cfg, y)
        branches = [Branch(clauses=[(a_lt(i, ZERO), a_le(ly, i))])]
        lens = [engine._lv(cfg, w) for w in vec]
        for k, w in enumerate(vec):
            idx, defs = _shift_idx(engine, ("NthC-i", x.id, t.id), k, i, lens[:k])
            lo = tm.add(ZERO, *lens[:k]) if k else ZERO
            hi = tm.add(*lens[:k + 1])
            branches.append(Branch(
                atoms=[a_le(lo, i), a_lt(i, hi)] + defs,
                lits=[(True, x, tm.nth(w, idx))]))
        yield App("Nth-Concat", (x.id, t.id), branches, treat_key=key)

    for x, t in engine._op_lits(cfg, tm.UPDATE, marked):
        y, i, v = t.args
        u = _unit_of(cc, y)
        if u is not None:
            key = ("UpU", x.id, t.id)
            if key in cfg.treated:
                continue
            b1 = Branch(clauses=[(a_lt(i, ZERO), a_lt(ZERO, i))],
                        lits=[(True, x, tm.unit(u.args[0]))])
            b2 = Branch(atoms=[a_eq(i, ZERO)], lits=[(True, x, tm.unit(v))])
            yield App("Update-Unit", (x.id, t.id), [b1, b2], treat_key=key)
            continue
        vec = nfs.canon(y)
        if vec is not None and len(vec) >= 2:
            key = ("UpC", x.id, t.id, tuple(w.id for w in vec))
            if key not in cfg.treated:
                lens = [engine._lv(cfg, w) for w in vec]
                zs = [engine.ctx.witnessed(("UpC-z", x.id, t.id, k), (y.sort,))[0]
                      for k in range(len(vec))]
                lits = [(True, x, tm.concat(*zs))]
                atoms = []
                for k, w in enumerate(vec):
                    idx, defs = _shift_idx(engine, ("UpC-i", x.id, t.id),
                                           k, i, lens[:k])
                    atoms.extend(defs)
                    lits.append((True, zs[k], tm.update(w, idx, v)))
                yield App("Update-Concat", (x.id, t.id),
                          [Branch(lits=lits, atoms=atoms)], treat_key=key)
        vec = nfs.canon(x)
        if vec is not None and len(vec) >= 2:
            key = ("UpCI", x.id, t.id, tuple(w.id for w in vec))
            if key not in cfg.treated:
                lens = [engine._lv(cfg, w) for w in vec]
                zs = [engine.ctx.witnessed(("UpCI-z", x.id, t.id, k), (y.sort,))[0]
                      for k in range(len(vec))]
                lits = [(True, y, tm.concat(*zs))]
                atoms = []
                for k, w in enumerate(vec):
                    idx, defs = _shift_idx(engine, ("UpCI-i", x.id, t.id),
                                           k, i, lens[:k])
                    atoms.extend(defs)
                    lits.append((True, w, tm.update(zs[k], idx, v)))
                yield App("Update-Concat-Inv", (x.id, t.id),
                          [Branch(lits=lits, atoms=atoms)], treat_key=key)


def array_apps(engine, cfg: Configuration, cc: Closure,
               marked: Set[int]) -> Iterator[App]:
    updates = list(engine._op_lits(cfg, tm.UPDATE, marked))
    nths = list(engine._op_lits(cfg, tm.NTH, marked))

    for x, t in updates:
        y, i, v = t.args
        key = ("NthI", x.id, t.id)
        if key in cfg.treated:
            continue
        lits = []
        esort = y.sort.elem if y.sort.elem.kind == "Elem" else tm.INT
        e1, e2 = engine.ctx.witnessed(("Nth-Intro", x.id, t.id), (esort, esort))
        if not cc.has(tm.nth(y, i)):
            lits.append((True, e1, tm.nth(y, i)))
        if not cc.has(tm.nth(x, i)):
            lits.append((True, e2, tm.nth(x, i)))
        if not lits:
            cfg.treated.add(key)
            continue
        yield App("Nth-Intro", (x.id, t.id), [Branch(lits=lits)], treat_key=key)

    for _, nt in nths:
        xs, j = nt.args
        for x, t in updates:
            y, i, v = t.args
            if not (cc.same(xs, x) or cc.same(xs, y)):
                continue
            key = ("NU", nt.id, x.id, t.id)
            if key in cfg.treated:
                continue
            lx = engine._lv(cfg, xs)
            b1 = Branch(clauses=[(a_lt(j, ZERO), a_le(lx, j))])
            b2 = Branch(atoms=[a_eq(i, j), a_le(ZERO, j), a_lt(j, lx)],
                        lits=[(True, tm.nth(x, j), v)])
            b3 = Branch(atoms=[a_ne(i, j), a_le(ZERO, j), a_lt(j, lx)],
                        lits=[(True, tm.nth(x, j), tm.nth(y, j))])
            yield App("Nth-Update", (nt.id, t.id), [b1, b2, b3], treat_key=key)

    # case split on each update last: nth reasoning usually settles the
    # probe first, keeping the 2-way trees out of the common path
    for x, t in updates:
        y, i, v = t.args
        key = ("UB", x.id, t.id)
        if key in cfg.treated:
            continue
        ly = engine._lv(cfg, y)
        b1 = Branch(atoms=[a_le(ZERO, i), a_lt(i, ly)],
                    lits=[(False, tm.nth(y, i), v)])
        b2 = Branch(lits=[(True, x, y)])
        yield App("Update-Bound", (x.id, t.id), [b1, b2], treat_key=key)

    for (_, n1), (_, n2) in itertools.combinations(nths, 2):
        x1, i1 = n1.args
        x2, i2 = n2.args
        if x1 is x2 or cc.same(x1, x2):
            continue
        if not (i1 is i2 or a_eq(i1, i2) in cfg.a_atoms):
            continue
        if engine._lit_holds(cfg, cc, False, x1, x2):
            continue
        yield App("Nth-Split", (n1.id, n2.id),
                  [Branch(lits=[(True, x1, x2)]),
                   Branch(lits=[(False, x1, x2)])])
