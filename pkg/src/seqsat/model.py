"""Model construction from a saturated configuration, and term evaluation.

Values: integers for Int, `ElemVal` for uninterpreted elements, tuples for
sequences.  Out-of-bounds nth reads are looked up in a per-model table keyed
by (sequence value, index); unlisted reads get a designated default.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

from . import terms as tm
from .config import Configuration
from .congruence import Closure
from .seqcore import NormalForms
from .terms import Term


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class ElemVal:
    name: str

    def __repr__(self) -> str:
        return self.name


class Model:
    def __init__(self):
        self.values: Dict[Term, object] = {}
        self.nth_oob: Dict[Tuple[tuple, int], object] = {}
        self.defaults: Dict[str, object] = {"Int": 0}

    def default_elem(self, sort: tm.Sort):
        key = sort.kind if sort.kind == "Int" else (sort.name or "Elem")
        if key not in self.defaults:
            self.defaults[key] = ElemVal(f"@u!{key}")
        return self.defaults[key]

    def value(self, v: Term):
        if v not in self.values:
            raise ModelError(f"no value for {v!r}")
        return self.values[v]


def build_model(cfg: Configuration, cc: Closure, nfs: NormalForms,
                lm: Dict[Term, int]) -> Model:
    m = Model()
    elem_counter = [0]

    def fresh_uelem(sort: tm.Sort) -> ElemVal:
        v = ElemVal(f"@u{elem_counter[0]}")
        elem_counter[0] += 1
        return v

    # integer variables: the arithmetic model, completed class-by-class
    int_vars: Set[Term] = set(cfg.int_vars_in_s()) | cfg.int_vars_in_a()
    int_vars.update(cfg.len_var.values())
    int_val: Dict[Term, int] = {}
    for v in sorted(int_vars, key=lambda t: t.id):
        if v in lm:
            int_val[v] = lm[v]
    used = set(int_val.values())
    fresh_int = [max(used) + 1 if used else 1]

    def next_int() -> int:
        while fresh_int[0] in used:
            fresh_int[0] += 1
        used.add(fresh_int[0])
        return fresh_int[0]

    class_int: Dict[Term, int] = {}
    for v in sorted(int_vars, key=lambda t: t.id):
        if v in int_val:
            continue
        r = cc.find(v) if cc.has(v) else v
        if r in class_int:
            int_val[v] = class_int[r]
            continue
        val = None
        if cc.has(v):
            for mem in cc.class_of(v):
                if mem.op == tm.CONST:
                    val = mem.value
                    break
                if mem in int_val:
                    val = int_val[mem]
                    break
        if val is None:
            val = next_int()
        class_int[r] = val
        int_val[v] = val

    def ival(t: Term) -> int:
        if t.op == tm.CONST:
            return t.value  # type: ignore[return-value]
        if t.op == tm.NEG:
            return -ival(t.args[0])
        if t.op == tm.ADD:
            return sum(ival(a) for a in t.args)
        if t in int_val:
            return int_val[t]
        raise ModelError(f"unvalued integer term {t!r}")

    # element classes
    elem_class: Dict[Term, ElemVal] = {}
    roots_seen: Set[Term] = set()
    for t in sorted(cc.parent, key=lambda t: t.id):
        if t.sort.kind == "Elem":
            r = cc.find(t)
            if r not in roots_seen:
                roots_seen.add(r)
                elem_class[r] = fresh_uelem(t.sort)

    def elem_value(t: Term):
        if t.sort == tm.INT:
            return ival(t)
        r = cc.find(t) if cc.has(t) else None
        if r is not None and r in elem_class:
            return elem_class[r]
        raise ModelError(f"unvalued element term {t!r}")

    # sequence classes
    seq_roots = sorted({cc.find(t) for t in cc.parent
                        if t.is_var and t.sort.kind == "Seq"},
                       key=lambda t: t.id)

    def class_len(r: Term) -> int:
        for mem in cc.members[r]:
            if mem.is_var and mem in cfg.len_var:
                return ival(cfg.len_var[mem])
        raise ModelError(f"class of {r!r} has no length variable")

    atomic_roots = []
    unit_val: Dict[Term, tuple] = {}
    for r in seq_roots:
        vec = nfs.canon(r)
        if vec is None:
            raise ModelError("normal form unavailable in model construction")
        if len(vec) == 1 and cc.find(vec[0]) is r:
            units = sorted((mem for mem in cc.members[r] if mem.op == tm.UNIT),
                           key=lambda t: t.id)
            if units:
                unit_val[r] = (elem_value(units[0].args[0]),)
            else:
                atomic_roots.append(r)

    # weak equivalence graph over atomic classes: an update literal with an
    # in-bounds index k links the two classes, and the link preserves every
    # position other than k
    adj: Dict[Term, Dict[Term, Set[int]]] = {}
    aset = set(atomic_roots)
    for lit in cfg.s:
        if lit.pos and lit.rhs.op == tm.UPDATE:
            rx = cc.find(lit.lhs)
            ry = cc.find(lit.rhs.args[0])
            if rx in aset and ry in aset and rx is not ry:
                k = ival(lit.rhs.args[1])
                if 0 <= k < class_len(rx) and class_len(rx) == class_len(ry):
                    adj.setdefault(rx, {}).setdefault(ry, set()).add(k)
                    adj.setdefault(ry, {}).setdefault(rx, set()).add(k)

    def weak_component(r: Term, i: int) -> List[Term]:
        seen = {r}
        queue = [r]
        while queue:
            cur = queue.pop()
            for nb, ks in adj.get(cur, {}).items():
                if nb not in seen and ks - {i}:
                    seen.add(nb)
                    queue.append(nb)
        return sorted(seen, key=lambda t: t.id)

    nth_by_class: Dict[Term, List[Tuple[Term, Term]]] = {}
    for lit in sorted(cfg.s, key=lambda l: (l.lhs.id, l.rhs.id)):
        if lit.pos and lit.rhs.op == tm.NTH:
            r = cc.find(lit.rhs.args[0])
            nth_by_class.setdefault(r, []).append((lit.lhs, lit.rhs.args[1]))

    shared_fresh: Dict[Tuple[int, int], object] = {}

    def fresh_pos(sort: tm.Sort):
        if sort.kind == "Int":
            return next_int()
        return fresh_uelem(sort)

    atomic_val: Dict[Term, tuple] = {}
    for r in atomic_roots:
        n = class_len(r)
        esort = r.sort.elem
        out = []
        for i in range(n):
            comp = weak_component(r, i)
            picked = None
            for cr in comp:
                for w, y in nth_by_class.get(cr, ()):
                    if ival(y) == i:
                        picked = elem_value(w)
                        break
                if picked is not None:
                    break
            if picked is None:
                key = (comp[0].id, i)
                if key not in shared_fresh:
                    shared_fresh[key] = fresh_pos(esort)
                picked = shared_fresh[key]
            out.append(picked)
        atomic_val[r] = tuple(out)

    def seq_value(r: Term) -> tuple:
        if r in atomic_val:
            return atomic_val[r]
        if r in unit_val:
            return unit_val[r]
        vec = nfs.canon(r)
        out: List[object] = []
        for w in vec:  # type: ignore[union-attr]
            out.extend(seq_value(cc.find(w)))
        return tuple(out)

    # write variable values
    for t in sorted(cc.parent, key=lambda t: t.id):
        if not t.is_var:
            continue
        if t.sort.kind == "Seq":
            m.values[t] = seq_value(cc.find(t))
        elif t.sort.kind == "Elem":
            m.values[t] = elem_class[cc.find(t)]
        elif t.sort == tm.INT:
            m.values[t] = ival(t)
    for v, val in int_val.items():
        m.values.setdefault(v, val)

    # out-of-bounds nth reads
    for r, pairs in sorted(nth_by_class.items(), key=lambda kv: kv[0].id):
        sval = seq_value(r)
        for w, y in pairs:
            iv = ival(y)
            if not (0 <= iv < len(sval)):
                m.nth_oob.setdefault((sval, iv), elem_value(w))
    return m


# ---------------------------------------------------------------------------
# evaluation under a model-like environment

def eval_term(t: Term, values: Dict[Term, object],
              nth_oob: Dict[Tuple[tuple, int], object],
              default_elem) -> object:
    def ev(u: Term):
        if u.is_var:
            if u not in values:
                raise ModelError(f"no value for {u!r}")
            return values[u]
        if u.op == tm.CONST:
            return u.value
        if u.op == tm.NEG:
            return -ev(u.args[0])
        if u.op == tm.ADD:
            return sum(ev(a) for a in u.args)
        if u.op == tm.EMPTY:
            return ()
        if u.op == tm.UNIT:
            return (ev(u.args[0]),)
        if u.op == tm.LEN:
            return len(ev(u.args[0]))
        if u.op == tm.NTH:
            s, i = ev(u.args[0]), ev(u.args[1])
            if 0 <= i < len(s):
                return s[i]
            got = nth_oob.get((s, i))
            return default_elem(u.sort) if got is None else got
        if u.op == tm.UPDATE:
            s, i, v = (ev(a) for a in u.args)
            if 0 <= i < len(s):
                return s[:i] + (v,) + s[i + 1:]
            return s
        if u.op == tm.CONCAT:
            out = ()
            for a in u.args:
                out = out + ev(a)
            return out
        if u.op == tm.EXTRACT:
            s, i, j = (ev(a) for a in u.args)
            if i < 0 or i >= len(s) or j <= 0:
                return ()
            return s[i:i + j]
        if u.op == tm.EQ:
            return ev(u.args[0]) == ev(u.args[1])
        if u.op == tm.LEQ:
            return ev(u.args[0]) <= ev(u.args[1])
        raise ModelError(f"cannot evaluate {u!r}")
    return ev(t)


def eval_with_model(m: Model, t: Term) -> object:
    return eval_term(t, m.values, m.nth_oob, m.default_elem)


def model_satisfies(m: Model, lits) -> bool:
    """lits: iterable of (pos, lhs, rhs) term pairs."""
    for pos, a, b in lits:
        va = eval_with_model(m, a)
        vb = eval_with_model(m, b)
        if (va == vb) != pos:
            return False
    return True
