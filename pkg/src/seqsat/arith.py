"""Integer linear arithmetic: satisfiability, models, entailment.

Pipeline: split disequalities and binary disjunctions by case, substitute out
variables with unit coefficients in equalities, eliminate the rest by
Fourier-Motzkin with GCD tightening of every derived inequality, then search
for an integer assignment by back-substitution with bounded enumeration.
Budget overruns raise LiaBudget (surfaced as unknown by the caller).
"""
from __future__ import annotations

import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .config import Clause, LinAtom, REL_EQ, REL_LE, REL_NE, lin_atom, negate_atom
from .terms import Term

VAR_CAND_CAP = 64
NODE_CAP = 200_000
CONSTRAINT_CAP = 20_000


class LiaBudget(Exception):
    pass


class ContractError(Exception):
    pass


Row = Tuple[Dict[int, int], int]  # sum(c*v) <= rhs over var ids


def _tighten(coeffs: Dict[int, int], rhs: int) -> Row:
    g = 0
    for c in coeffs.values():
        g = math.gcd(g, abs(c))
    if g > 1:
        coeffs = {v: c // g for v, c in coeffs.items()}
        rhs //= g
    return coeffs, rhs


def _solve_conj(eqs: List[Row], les: List[Row]) -> Optional[Dict[int, int]]:
    """Model for a conjunction of equalities and <= rows, or None."""
    subst: List[Tuple[int, Dict[int, int], int]] = []  # x = rhs - sum(c*v)
    eqrows = [[dict(c), r] for c, r in eqs]
    lerows = [[dict(c), r] for c, r in les]
    occ: Dict[int, List[list]] = {}
    for row in eqrows:
        for v in row[0]:
            occ.setdefault(v, []).append(row)
    for row in lerows:
        for v in row[0]:
            occ.setdefault(v, []).append(row)

    # substitute out unit-coefficient equality variables
    while True:
        nxt = None
        for row in eqrows:
            co, rhs = row
            if not co:
                if rhs != 0:
                    return None
                continue
            g = 0
            for c in co.values():
                g = math.gcd(g, abs(c))
            if rhs % g != 0:
                return None
            unit = [v for v, c in co.items() if abs(c) == 1]
            if unit:
                nxt = (row, min(unit))
                break
        if nxt is None:
            break
        row0, x = nxt
        eqrows.remove(row0)
        sign = row0[0][x]
        co = {v: (c if sign == 1 else -c)
              for v, c in row0[0].items() if v != x}
        rhs = row0[1] if sign == 1 else -row0[1]
        # x = rhs - sum(co); frozen copy -- later substitutions must not
        # reach it through stale occurrence entries
        subst.append((x, co, rhs))
        row0[0] = {}
        row0[1] = 0
        for row in occ.pop(x, ()):
            if row is row0:
                continue
            rc = row[0]
            a = rc.pop(x, 0)
            if not a:
                continue  # stale index entry
            for v, c in co.items():
                prev = rc.get(v, 0)
                nv = prev - a * c
                if nv == 0:
                    if prev:
                        del rc[v]
                else:
                    if not prev:
                        occ.setdefault(v, []).append(row)
                    rc[v] = nv
            row[1] -= a * rhs

    # remaining equalities (no unit coefficient) become inequality pairs
    les = [(co, rhs) for co, rhs in lerows]
    for co, rhs in eqrows:
        if not co:
            if rhs != 0:
                return None
            continue
        les.append((dict(co), rhs))
        les.append(({v: -c for v, c in co.items()}, -rhs))

    # Fourier-Motzkin elimination
    rows = []
    seen = set()
    for co, rhs in les:
        co, rhs = _tighten(co, rhs)
        if not co:
            if rhs < 0:
                return None
            continue
        key = (tuple(sorted(co.items())), rhs)
        if key not in seen:
            seen.add(key)
            rows.append((co, rhs))

    stages: List[Tuple[int, List[Row]]] = []
    while True:
        vars_here: Dict[int, Tuple[int, int]] = {}
        for co, _ in rows:
            for v, c in co.items():
                p, n = vars_here.get(v, (0, 0))
                vars_here[v] = (p + (c > 0), n + (c < 0))
        if not vars_here:
            break
        x = min(vars_here, key=lambda v: (vars_here[v][0] * vars_here[v][1], v))
        with_x = [(co, r) for co, r in rows if x in co]
        rest = [(co, r) for co, r in rows if x not in co]
        stages.append((x, with_x))
        pos = [(co, r) for co, r in with_x if co[x] > 0]
        neg = [(co, r) for co, r in with_x if co[x] < 0]
        seen = {(tuple(sorted(co.items())), r) for co, r in rest}
        for cp, rp in pos:
            for cn, rn in neg:
                a, b = cp[x], -cn[x]
                co = {}
                for v, c in cp.items():
                    if v != x:
                        co[v] = co.get(v, 0) + b * c
                for v, c in cn.items():
                    if v != x:
                        co[v] = co.get(v, 0) + a * c
                co = {v: c for v, c in co.items() if c != 0}
                co, rhs = _tighten(co, b * rp + a * rn)
                if not co:
                    if rhs < 0:
                        return None
                    continue
                key = (tuple(sorted(co.items())), rhs)
                if key not in seen:
                    seen.add(key)
                    rest.append((co, rhs))
                    if len(rest) > CONSTRAINT_CAP:
                        raise LiaBudget("too many derived constraints")
        rows = rest

    # variables that occur in stage rows but dropped out of every resolvent
    # are unconstrained; give them stages so they are assigned first
    staged = {x for x, _ in stages}
    free = set()
    for _, cons in stages:
        for co, _ in cons:
            free.update(v for v in co if v not in staged)
    stages.extend((v, []) for v in sorted(free))

    # integer back-substitution search, last-eliminated variable first
    model: Dict[int, int] = {}
    budget = [NODE_CAP]

    def candidates(lo: Optional[int], hi: Optional[int]):
        if lo is not None and hi is not None:
            start = min(max(0, lo), hi)
            out = [start]
            d = 1
            while len(out) < VAR_CAND_CAP:
                above, below = start + d, start - d
                if above > hi and below < lo:
                    break
                if above <= hi:
                    out.append(above)
                if below >= lo and len(out) < VAR_CAND_CAP:
                    out.append(below)
                d += 1
            return out
        out = []
        if lo is None and hi is None:
            base = 0
            for k in range(VAR_CAND_CAP):
                out.append(base + (k + 1) // 2 * (1 if k % 2 else -1) if k else 0)
            return out
        if hi is not None:
            start = min(hi, 0)
            return [start - k for k in range(VAR_CAND_CAP)]
        start = max(lo, 0)  # type: ignore[arg-type]
        return [start + k for k in range(VAR_CAND_CAP)]

    def assign(idx: int) -> bool:
        if idx < 0:
            return True
        x, cons = stages[idx]
        lo: Optional[int] = None
        hi: Optional[int] = None
        for co, rhs in cons:
            a = co[x]
            rest = sum(c * model[v] for v, c in co.items() if v != x)
            if a > 0:
                b = (rhs - rest) // a
                hi = b if hi is None else min(hi, b)
            else:
                b = -((rhs - rest) // (-a))
                lo = b if lo is None else max(lo, b)
        if lo is not None and hi is not None and lo > hi:
            return False
        # prefer values other variables do not already take: spurious value
        # coincidences trigger avoidable equality reasoning downstream
        used_now = set(model.values())
        for c in sorted(candidates(lo, hi), key=lambda v: v in used_now):
            budget[0] -= 1
            if budget[0] < 0:
                raise LiaBudget("assignment search budget exhausted")
            model[x] = c
            if assign(idx - 1):
                return True
        model.pop(x, None)
        return False

    if not assign(len(stages) - 1):
        return None
    for x, co, rhs in reversed(subst):
        model[x] = rhs - sum(c * model.get(v, 0) for v, c in co.items())
    return model


def _split(atoms: List[LinAtom], clauses: List[Clause],
           vids: Dict[int, Term]) -> Optional[Dict[int, int]]:
    """DPLL over binary disjunctions and disequalities."""
    eqs: List[Row] = []
    les: List[Row] = []
    pending: List[Tuple[LinAtom, LinAtom]] = []
    for a in atoms:
        co = {x.id: c for x, c in a.coeffs}
        for x, _ in a.coeffs:
            vids[x.id] = x
        if a.rel == REL_EQ:
            eqs.append((co, a.rhs))
        elif a.rel == REL_LE:
            les.append((co, a.rhs))
        else:  # disequality: strictly below or strictly above
            lt = lin_atom({x: c for x, c in a.coeffs}, REL_LE, a.rhs - 1)
            gt = lin_atom({x: -c for x, c in a.coeffs}, REL_LE, -a.rhs - 1)
            pending.append((lt, gt))
    for c1, c2 in clauses:
        for x, _ in c1.coeffs:
            vids[x.id] = x
        for x, _ in c2.coeffs:
            vids[x.id] = x
        pending.append((c1, c2))

    def holds(alt: LinAtom, m: Dict[int, int]) -> bool:
        v = sum(c * m.get(x.id, 0) for x, c in alt.coeffs)
        return v == alt.rhs if alt.rel == REL_EQ else v <= alt.rhs

    def go(idx: int, eqs: List[Row], les: List[Row],
           m: Optional[Dict[int, int]]) -> Optional[Dict[int, int]]:
        # m is a model of the rows accumulated so far, if one is known
        if m is None:
            m = _solve_conj(eqs, les)
            if m is None:
                return None  # infeasible prefix: skip the whole subtree
        if all(any(holds(alt, m) for alt in pair) for pair in pending[idx:]):
            return m
        for alt in pending[idx]:
            co = {x.id: c for x, c in alt.coeffs}
            for x, _ in alt.coeffs:
                vids[x.id] = x
            keep = m if holds(alt, m) else None
            if alt.rel == REL_EQ:
                r = go(idx + 1, eqs + [(co, alt.rhs)], les, keep)
            elif alt.rel == REL_LE:
                r = go(idx + 1, eqs, les + [(co, alt.rhs)], keep)
            else:
                raise ContractError("disequality inside a disjunction")
            if r is not None:
                return r
        return None

    return go(0, eqs, les, None)


_cache: Dict[tuple, Optional[Dict[Term, int]]] = {}
_pool: List[Dict[int, int]] = []   # recent models, keyed by variable id
POOL_CAP = 128


def clear_cache() -> None:
    _cache.clear()
    del _pool[:]


def _atom_holds(a: LinAtom, m: Dict[int, int]) -> bool:
    val = sum(c * m.get(x.id, 0) for x, c in a.coeffs)
    if a.rel == REL_LE:
        return val <= a.rhs
    if a.rel == REL_EQ:
        return val == a.rhs
    return val != a.rhs


def atom_holds_model(a: LinAtom, m: Dict[Term, int]) -> bool:
    val = sum(c * m.get(x, 0) for x, c in a.coeffs)
    if a.rel == REL_LE:
        return val <= a.rhs
    if a.rel == REL_EQ:
        return val == a.rhs
    return val != a.rhs


def pool_models(atoms, clauses, cap: int = 16, scan: int = 48) -> List[Dict[int, int]]:
    """Recent solver models that happen to satisfy the given constraints.

    Cheap countermodel source: a pooled model separating two variables
    refutes their candidate equality without a solver call.
    """
    ats = list(atoms)
    cls = list(clauses)
    out: List[Dict[int, int]] = []
    for m in reversed(_pool[-scan:]):
        if all(_atom_holds(a, m) for a in ats) \
                and all(_atom_holds(c1, m) or _atom_holds(c2, m)
                        for c1, c2 in cls):
            out.append(m)
            if len(out) >= cap:
                break
    return out




def lia_check(atoms: Iterable[LinAtom],
              clauses: Iterable[Clause] = ()) -> Optional[Dict[Term, int]]:
    """A model of the constraints (deterministic), or None if unsatisfiable."""
    fa = frozenset(atoms)
    fc = frozenset(clauses)
    key = (fa, fc)
    if key in _cache:
        return _cache[key]
    vids: Dict[int, Term] = {}
    m = _split(sorted(fa, key=lambda a: a.key),
               sorted(fc, key=lambda c: (c[0].key, c[1].key)), vids)
    out = None if m is None else \
        {vids[v]: val for v, val in sorted(m.items()) if v in vids}
    _cache[key] = out
    if out is not None:
        _pool.append({t.id: v for t, v in out.items()})
        if len(_pool) > POOL_CAP:
            del _pool[0]
    return out


def lia_model(atoms: Iterable[LinAtom],
              clauses: Iterable[Clause] = ()) -> Dict[Term, int]:
    m = lia_check(atoms, clauses)
    if m is None:
        raise ContractError("lia_model called on unsatisfiable constraints")
    return m


def restrict_to(atoms, clauses, atom) -> Tuple[List[LinAtom], List[Clause]]:
    """Constraints sharing variables, transitively, with the given atom.

    When the full constraint set is satisfiable, it entails the atom iff
    this connected slice does: the rest touches none of its variables.
    """
    parent: Dict[int, int] = {}

    def find(i: int) -> int:
        r = i
        while parent[r] != r:
            r = parent[r]
        while parent[i] != r:
            parent[i], i = r, parent[i]
        return r

    def link(ids: List[int]) -> None:
        for i in ids:
            parent.setdefault(i, i)
        for i in ids[1:]:
            parent[find(ids[0])] = find(i)

    ats = list(atoms)
    cls = list(clauses)
    for a in ats:
        link([x.id for x, _ in a.coeffs])
    for c1, c2 in cls:
        link([x.id for x, _ in c1.coeffs] + [x.id for x, _ in c2.coeffs])
    link([x.id for x, _ in atom.coeffs])
    roots = {find(x.id) for x, _ in atom.coeffs}
    sub_a = [a for a in ats
             if any(find(x.id) in roots for x, _ in a.coeffs)]
    sub_c = [c for c in cls
             if any(find(x.id) in roots for x, _ in c[0].coeffs)
             or any(find(x.id) in roots for x, _ in c[1].coeffs)]
    return sub_a, sub_c


def lia_entails(atoms: Iterable[LinAtom], clauses: Iterable[Clause],
                atom: LinAtom) -> bool:
    """Whether satisfiable constraints entail the atom.

    Callers guarantee satisfiability (they hold a model), which makes the
    connected-slice restriction sound.
    """
    return entails_or_model(atoms, clauses, atom) is None


def entails_or_model(atoms: Iterable[LinAtom], clauses: Iterable[Clause],
                     atom: LinAtom) -> Optional[Dict[int, int]]:
    """None when satisfiable constraints entail atom, else a countermodel.

    The countermodel is keyed by variable id and covers only the slice of
    the constraints connected to the atom; completing it with any model
    of the rest yields a full countermodel.
    """
    base, cls = restrict_to(atoms, clauses, atom)
    for conj in negate_atom(atom):
        m = lia_check(base + conj, cls)
        if m is not None:
            return {t.id: v for t, v in m.items()}
    return None
