"""Derivation engine for the sequence calculus.

A configuration is expanded by the first applicable rule under the strategy
order; branches are explored depth-first, left to right.  The BASE strategy
reduces nth/update to concatenations; the EXT strategy distributes them over
normal forms and adds array-style reasoning on atomic sequences.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from . import arith, terms as tm
from .arith import LiaBudget
from .config import (Clause, Configuration, LinAtom, Literal, REL_EQ,
                     SolveCtx, eq_atom, le_atom, literal)
from .congruence import Closure
from .terms import Term

ZERO = tm.const(0)
ONE = tm.const(1)

CSPLIT_DEPTH_CAP = 64
NF_CAND_CAP = 16


def a_le(a: Term, b: Term) -> LinAtom:
    return le_atom(a, b)


def a_lt(a: Term, b: Term) -> LinAtom:
    return le_atom(tm.add(a, ONE), b)


def a_eq(a: Term, b: Term) -> LinAtom:
    return eq_atom(a, b, True)


def a_ne(a: Term, b: Term) -> LinAtom:
    return eq_atom(a, b, False)


# ---------------------------------------------------------------------------
# atomicity and normal forms

class NFSkip(Exception):
    """Normal form not computable for a class right now (cycle or blowup)."""


def entailed_empty(cc: Closure, t: Term) -> bool:
    if not cc.has(t):
        return False
    return any(m.op == tm.EMPTY for m in cc.class_of(t))


def singular(cc: Closure, c: Term) -> bool:
    return sum(1 for w in c.args if not entailed_empty(cc, w)) <= 1


def is_atomic(cc: Closure, x: Term) -> bool:
    """Atomic: not entailed empty, and all concatenations in the class are
    singular (equal to one of their components up to empty parts)."""
    if entailed_empty(cc, x):
        return False
    return all(singular(cc, m) for m in cc.class_of(x) if m.op == tm.CONCAT)


class NormalForms:
    """Candidate component vectors per sequence equivalence class."""

    def __init__(self, cc: Closure):
        self.cc = cc
        self.cands: Dict[Term, Tuple[Tuple[Term, ...], ...]] = {}
        self.skipped: Set[Term] = set()
        self._memo: Dict[Term, Tuple[Tuple[Term, ...], ...]] = {}
        roots = {cc.find(t) for t in cc.parent
                 if t.is_var and t.sort.kind == "Seq"}
        for r in sorted(roots, key=lambda t: t.id):
            try:
                self.cands[r] = self._class_cands(r, set())
            except NFSkip:
                self.skipped.add(r)

    def _comp_opts(self, r: Term, stack: Set[Term]) -> Tuple[Tuple[Term, ...], ...]:
        cc = self.cc
        r = cc.find(r)
        if r in stack:
            raise NFSkip
        got = self._memo.get(r)
        if got is not None:
            # success is stack-independent: a cycle below r would have
            # been found the first time as well
            return got
        stack = stack | {r}
        opts: Set[Tuple[Term, ...]] = set()
        empt = any(m.op == tm.EMPTY for m in cc.members[r])
        nsc = sorted((m for m in cc.members[r]
                      if m.op == tm.CONCAT and not singular(cc, m)),
                     key=lambda t: t.id)
        if empt:
            opts.add(())
        for c in nsc:
            for vec in self._expand(c.args, stack):
                opts.add(vec)
        if not empt and not nsc:
            opts.add((cc.alpha(r),))
        if len(opts) > NF_CAND_CAP:
            raise NFSkip
        out = tuple(sorted(opts, key=_vec_key))
        self._memo[r] = out
        return out

    def _expand(self, args, stack) -> List[Tuple[Term, ...]]:
        per = [self._comp_opts(w, stack) for w in args]
        out = []
        for combo in itertools.product(*per):
            out.append(tuple(itertools.chain.from_iterable(combo)))
            if len(out) > NF_CAND_CAP:
                raise NFSkip
        return out

    def _class_cands(self, r: Term, stack: Set[Term]) -> Tuple[Tuple[Term, ...], ...]:
        cc = self.cc
        out: Set[Tuple[Term, ...]] = set(self._comp_opts(r, stack))
        concats = sorted((m for m in cc.members[r] if m.op == tm.CONCAT),
                         key=lambda t: t.id)
        for c in concats:
            for vec in self._expand(c.args, stack | {cc.find(r)}):
                out.add(vec)
        if len(out) > NF_CAND_CAP:
            raise NFSkip
        return tuple(sorted(out, key=_vec_key))

    def canon(self, t: Term) -> Optional[Tuple[Term, ...]]:
        r = self.cc.find(t)
        cs = self.cands.get(r)
        if not cs:
            return None
        return cs[0]


def _vec_key(v: Tuple[Term, ...]):
    return (len(v), tuple(t.id for t in v))


def concat_normal_form(cfg: Configuration, x: Term) -> Optional[List[Term]]:
    """The canonical component vector of x's class, if computable."""
    cc = Closure(cfg.s)
    v = NormalForms(cc).canon(x)
    return None if v is None else list(v)


# ---------------------------------------------------------------------------
# rule applications

@dataclass
class Branch:
    lits: List[Tuple[bool, Term, Term]] = field(default_factory=list)
    atoms: List[LinAtom] = field(default_factory=list)
    clauses: List[Tuple[LinAtom, LinAtom]] = field(default_factory=list)


@dataclass
class App:
    rule: str
    premises: Tuple[int, ...]
    branches: List[Branch]
    treat_key: Optional[tuple] = None
    csplit_class: Optional[int] = None


@dataclass
class Result:
    status: str                       # "sat" | "unsat" | "unknown"
    config: Optional[Configuration] = None
    cc: Optional[Closure] = None
    nfs: Optional[NormalForms] = None
    lia: Optional[Dict[Term, int]] = None
    reason: str = ""


class Engine:
    def __init__(self, mode: str = "ext", step_limit: int = 100_000,
                 ctx: Optional[SolveCtx] = None):
        if mode not in ("base", "ext"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.step_limit = step_limit
        self.ctx = ctx or SolveCtx()

    # -- bookkeeping ------------------------------------------------------
    def _count(self, rule: str) -> bool:
        ctx = self.ctx
        ctx.steps += 1
        ctx.rule_counts[rule] = ctx.rule_counts.get(rule, 0) + 1
        return ctx.steps <= self.step_limit

    def _trace(self, rule: str, premises, k: int, n: int) -> None:
        if self.ctx.trace is not None:
            ids = ",".join(str(p) for p in premises)
            self.ctx.trace.append(f"RULE {rule} PREMISES {ids} BRANCH {k}/{n}")

    def _lv(self, cfg: Configuration, x: Term) -> Term:
        lv = cfg.len_var.get(x)
        if lv is None:
            (lv,) = self.ctx.witnessed(("len", x.id), (tm.INT,))
        return lv

    # -- top-level search -------------------------------------------------
    def solve(self, cfg: Configuration) -> Result:
        unknown_reason = ""
        work = [cfg]
        while work:
            node = work.pop()
            try:
                out = self._expand(node)
            except LiaBudget:
                unknown_reason = "arithmetic budget exceeded"
                continue
            if out[0] == "steps":
                return Result("unknown", reason="step limit exceeded")
            if out[0] == "unsat":
                continue
            if out[0] == "unknown":
                unknown_reason = out[1]
                continue
            if out[0] == "sat":
                _, cc, nfs, lm = out
                return Result("sat", node, cc, nfs, lm)
            app = out[1]
            children = []
            n = len(app.branches)
            for k, br in enumerate(app.branches):
                child = node.copy()
                if app.treat_key is not None:
                    child.treated.add(app.treat_key)
                if app.csplit_class is not None:
                    d = child.csplit_depth.get(app.csplit_class, 0)
                    child.csplit_depth[app.csplit_class] = d + 1
                for at in br.atoms:
                    child.add_atom(at)
                for c1, c2 in br.clauses:
                    child.add_clause(c1, c2)
                for pos, a, b in br.lits:
                    child.add_eq(a, b, pos)
                self._trace(app.rule, app.premises, k + 1, n)
                children.append(child)
            if not self._count(app.rule):
                return Result("unknown", reason="step limit exceeded")
            work.extend(reversed(children))
        if unknown_reason:
            return Result("unknown", reason=unknown_reason)
        return Result("unsat")

    # -- node expansion ---------------------------------------------------
    def _expand(self, cfg: Configuration):
        # an inherited model that still satisfies A avoids a solver call
        lm = cfg.lm
        dirty = lm is None or not self._lm_holds(cfg, lm, 0, 0)
        while True:
            while True:
                cc = self._closure_of(cfg)
                if cc.conflict is not None:
                    lit = cc.conflict
                    self._trace("S-Conf", (lit.lhs.id, lit.rhs.id), 1, 1)
                    self._count("S-Conf")
                    return ("unsat",)
                na = len(cfg.a_atoms)
                nc = len(cfg.a_clauses)
                changed = self._s_prop(cfg, cc)
                changed = self._lintro(cfg) or changed
                if len(cfg.a_atoms) != na or len(cfg.a_clauses) != nc:
                    if dirty or lm is None \
                            or not self._lm_holds(cfg, lm, na, nc):
                        dirty = True
                if changed:
                    if self.ctx.steps > self.step_limit:
                        return ("steps",)
                    continue
                if dirty:
                    lm = arith.lia_check(cfg.a_atoms, cfg.a_clauses)
                    dirty = False
                    if lm is None:
                        self._trace("A-Conf", (), 1, 1)
                        self._count("A-Conf")
                        return ("unsat",)
                    cfg.lm = lm
                # A-Prop only adds entailed atoms, so lm stays a model of A
                if self._a_prop(cfg, cc, lm):
                    if self.ctx.steps > self.step_limit:
                        return ("steps",)
                    continue
                break
            app, pressure = self._scan(cfg, cc, lm)
            if app is not None:
                return ("app", app)
            if pressure:
                return ("unknown", "suppressed split at saturation")
            nfs = self._nfs_of(cc)
            if nfs.skipped:
                return ("unknown", "normal form unavailable at saturation")
            # an inherited model may lack fresh variables; model
            # construction needs a complete one
            lm = arith.lia_model(cfg.a_atoms, cfg.a_clauses)
            return ("sat", cc, nfs, lm)

    @staticmethod
    def _closure_of(cfg: Configuration) -> Closure:
        lits = list(cfg.s)
        if cfg.cc is None:
            cc = Closure(lits)
        elif cfg.cc_n == len(lits):
            return cfg.cc
        else:
            cc = Closure.extend(cfg.cc, lits[cfg.cc_n:])
        cfg.cc = cc
        cfg.cc_n = len(lits)
        return cc

    @staticmethod
    def _lm_holds(cfg: Configuration, lm, na: int, nc: int) -> bool:
        """Whether the model satisfies atoms and clauses from index on."""
        ats = list(cfg.a_atoms)
        cls = list(cfg.a_clauses)
        return all(arith.atom_holds_model(a, lm) for a in ats[na:]) \
            and all(arith.atom_holds_model(c1, lm)
                    or arith.atom_holds_model(c2, lm)
                    for c1, c2 in cls[nc:])

    def _s_prop(self, cfg: Configuration, cc: Closure) -> bool:
        added = False
        for cls in cc.classes():
            anchor = None
            for m in cls:
                if m.sort == tm.INT and (m.is_var or m.op == tm.CONST):
                    if anchor is None:
                        anchor = m
                    else:
                        at = a_eq(anchor, m)
                        if cfg.add_atom(at):
                            self._trace("S-Prop", (anchor.id, m.id), 1, 1)
                            self._count("S-Prop")
                            added = True
        return added

    @staticmethod
    def _carry_models(cfg: Configuration) -> List[Dict[int, int]]:
        """Re-validate inherited models of A against atoms added since.

        A violated new equation is first repaired by recomputing its
        newest unit-coefficient variable (fresh definitions, e.g. lengths
        of split pieces); repaired models are checked against all of A.
        """
        ats = list(cfg.a_atoms)
        cls = list(cfg.a_clauses)
        if cfg.aseen_atoms == len(ats) and cfg.aseen_clauses == len(cls):
            return cfg.amodels
        newa = ats[cfg.aseen_atoms:]
        newc = cls[cfg.aseen_clauses:]
        kept: List[Dict[int, int]] = []
        for m in cfg.amodels:
            h = m
            touched = False
            ok = True
            for _ in range(8):
                changed = False
                for a in newa:
                    if arith._atom_holds(a, h):
                        continue
                    units = [(x, c) for x, c in a.coeffs if abs(c) == 1]
                    if a.rel != REL_EQ or not units:
                        ok = False
                        break
                    x, c = max(units, key=lambda xc: xc[0].id)
                    if h is m:
                        h = dict(m)
                        touched = True
                    rest = sum(cf * h.get(y.id, 0)
                               for y, cf in a.coeffs if y is not x)
                    h[x.id] = (a.rhs - rest) * c
                    changed = True
                if not ok or not changed:
                    break
            if not ok:
                continue
            chk_a = ats if touched else newa
            chk_c = cls if touched else newc
            if all(arith._atom_holds(a, h) for a in chk_a) \
                    and all(arith._atom_holds(c1, h) or arith._atom_holds(c2, h)
                            for c1, c2 in chk_c):
                kept.append(h)
        cfg.amodels = kept
        cfg.aseen_atoms = len(ats)
        cfg.aseen_clauses = len(cls)
        return kept

    def _a_prop(self, cfg: Configuration, cc: Closure, lm) -> bool:
        shared = sorted(cfg.int_vars_in_s() & cfg.int_vars_in_a(),
                        key=lambda v: v.id)
        byval: Dict[int, List[Term]] = {}
        for v in shared:
            if v in lm:
                byval.setdefault(lm[v], []).append(v)
        # inherited models of A refute most candidate equalities without
        # touching the arithmetic solver
        pms = self._carry_models(cfg)

        def separated(x: Term, val: int) -> bool:
            return any(m.get(x.id, 0) != val for m in pms)

        lmbase = {t.id: v for t, v in lm.items()}

        def learn(cm: Dict[int, int]) -> None:
            # countermodels cover only a slice of A; completing with the
            # guiding model yields a full model of A
            full = dict(lmbase)
            full.update(cm)
            pms.append(full)
            if len(pms) > 32:
                del pms[0]

        added = False
        for val, group in sorted(byval.items()):
            base = group[0]
            for other in group[1:]:
                if cc.same(base, other):
                    continue
                if any(m.get(base.id, 0) != m.get(other.id, 0) for m in pms):
                    continue
                cm = arith.entails_or_model(cfg.a_atoms, cfg.a_clauses,
                                            a_eq(base, other))
                if cm is not None:
                    learn(cm)
                elif cfg.add_eq(base, other, True):
                    self._trace("A-Prop", (base.id, other.id), 1, 1)
                    self._count("A-Prop")
                    added = True
            c = tm.const(val)
            if val >= 0 and cc.has(c):
                for v in group:
                    if cc.same(v, c) or separated(v, val):
                        continue
                    cm = arith.entails_or_model(cfg.a_atoms, cfg.a_clauses,
                                                a_eq(v, c))
                    if cm is not None:
                        learn(cm)
                    elif cfg.add_eq(v, c, True):
                        self._trace("A-Prop", (v.id, c.id), 1, 1)
                        self._count("A-Prop")
                        added = True
        return added

    @staticmethod
    def _nfs_of(cc: Closure) -> NormalForms:
        nfs = getattr(cc, "_nfs", None)
        if nfs is None:
            nfs = NormalForms(cc)
            cc._nfs = nfs  # type: ignore[attr-defined]
        return nfs

    # -- strategy ---------------------------------------------------------
    def _scan(self, cfg: Configuration, cc: Closure, lm):
        pressure = False
        marked = self._marks(cfg, cc)
        app = self._step_extract(cfg, cc)
        if app is None:
            app, pressure = self._step_split(cfg, cc, lm)
        if app is None:
            app = self._step_ceq(cfg, cc)
        if app is None:
            app = self._step_deq(cfg, cc)
        if app is None:
            if self.mode == "ext":
                app = self._step_distribute(cfg, cc, marked)
                if app is None:
                    app = self._step_arrays(cfg, cc, marked)
            else:
                app = self._step_reduce(cfg, cc, marked)
        if app is None:
            app = self._step_sa(cfg, cc, lm)
        if app is None:
            app = self._step_lvalid(cfg, cc, lm)
        return app, pressure

    def _lit_holds(self, cfg, cc, pos, a, b) -> bool:
        if literal(pos, a, b) in cfg.s:
            return True
        if cc.has(a) and cc.has(b):
            return cc.same(a, b) if pos else cc.disequal(a, b)
        return False

    def _redundant(self, cfg, cc, app: App) -> bool:
        from .config import mk_clause
        for br in app.branches:
            if all(self._lit_holds(cfg, cc, *l) for l in br.lits) and \
               all(at in cfg.a_atoms for at in br.atoms) and \
               all(mk_clause(c1, c2) in cfg.a_clauses for c1, c2 in br.clauses):
                return True
        return False

    def _pick(self, cfg, cc, apps):
        """First non-redundant application; redundant ones become treated."""
        for app in apps:
            if self._redundant(cfg, cc, app):
                if app.treat_key is not None:
                    cfg.treated.add(app.treat_key)
                continue
            return app
        return None

    def _sorted_lits(self, cfg):
        return sorted(cfg.s, key=lambda l: (l.lhs.id, l.rhs.id, not l.pos))

    # step 1: length constraints
    def _lintro(self, cfg) -> bool:
        """Length equations for defined sequence terms; deterministic, so
        applied eagerly instead of through the worklist."""
        added = False
        for lit in list(cfg.s):
            if not lit.pos or lit.rhs.op not in \
                    (tm.EMPTY, tm.UNIT, tm.UPDATE, tm.CONCAT):
                continue
            key = ("LI", lit)
            if key in cfg.treated:
                continue
            cfg.treated.add(key)
            x, t = lit.lhs, lit.rhs
            lv = self._lv(cfg, x)
            if t.op == tm.EMPTY:
                rhs: Term = ZERO
            elif t.op == tm.UNIT:
                rhs = ONE
            elif t.op == tm.UPDATE:
                rhs = self._lv(cfg, t.args[0])
            else:
                rhs = tm.add(*[self._lv(cfg, w) for w in t.args])
            if cfg.add_eq(lv, rhs, True):
                self._trace("L-Intro", (x.id, t.id), 1, 1)
                self._count("L-Intro")
                added = True
        return added

    def _step_lvalid(self, cfg, cc, lm) -> Optional[App]:
        def gen():
            for x in cfg.seq_vars():
                key = ("LV", x.id)
                if key in cfg.treated:
                    continue
                lv = self._lv(cfg, x)
                nonempty = a_le(ONE, lv)
                # skip the split when the length sign is already decided
                if lm.get(lv, 0) >= 1 and \
                        arith.lia_entails(cfg.a_atoms, cfg.a_clauses, nonempty):
                    continue
                eps = tm.empty(x.sort.elem)
                if lm.get(lv, 0) <= 0 and \
                        arith.lia_entails(cfg.a_atoms, cfg.a_clauses,
                                          a_le(lv, ZERO)):
                    yield App("L-Valid", (x.id,),
                              [Branch(lits=[(True, x, eps)])], treat_key=key)
                    continue
                yield App("L-Valid", (x.id,),
                          [Branch(lits=[(True, x, eps)]),
                           Branch(atoms=[nonempty])], treat_key=key)
        return self._pick(cfg, cc, gen())

    # step 2: congruent nth/update terms are represented by one member
    def _marks(self, cfg, cc) -> Set[int]:
        groups: Dict[tuple, List[Term]] = {}
        for lit in cfg.s:
            t = lit.rhs
            if lit.pos and t.op in (tm.NTH, tm.UPDATE):
                key = (t.op, tuple(cc.find(a).id for a in t.args))
                groups.setdefault(key, []).append(t)
        marked: Set[int] = set()
        for group in groups.values():
            group = sorted(set(group), key=lambda t: t.id)
            marked.update(t.id for t in group[1:])
        return marked

    def _op_lits(self, cfg, op, marked: Set[int]):
        """One defining literal per unmarked op-term, in id order."""
        seen: Set[int] = set()
        for lit in self._sorted_lits(cfg):
            t = lit.rhs
            if lit.pos and t.op == op and t.id not in marked and t.id not in seen:
                seen.add(t.id)
                yield lit.lhs, t

    # step 3: reduce extract
    def _step_extract(self, cfg, cc) -> Optional[App]:
        def gen():
            for x, t in self._op_lits(cfg, tm.EXTRACT, set()):
                key = ("RX", x.id, t.id)
                if key in cfg.treated:
                    continue
                y, i, j = t.args
                ly, lx = self._lv(cfg, y), self._lv(cfg, x)
                k1, k2 = self.ctx.witnessed(("R-Extract", x.id, t.id),
                                            (y.sort, y.sort))
                lk1 = self.ctx.witnessed(("len", k1.id), (tm.INT,))[0]
                lk2 = self.ctx.witnessed(("len", k2.id), (tm.INT,))[0]
                eps = tm.empty(y.sort.elem)
                oob1 = Branch(lits=[(True, x, eps)],
                              clauses=[(a_lt(i, ZERO), a_le(ly, i))])
                oob2 = Branch(lits=[(True, x, eps)], atoms=[a_le(j, ZERO)])
                rest = tm.add(ly, tm.neg(i))          # l_y - i
                inb = Branch(
                    lits=[(True, y, tm.concat(k1, x, k2))],
                    atoms=[a_le(ZERO, i), a_lt(i, ly), a_lt(ZERO, j),
                           a_eq(lk1, i),
                           a_le(lx, j), a_le(lx, rest),
                           a_eq(lk2, tm.add(ly, tm.neg(lx), tm.neg(i)))],
                    clauses=[(a_eq(lx, j), a_eq(lx, rest))])
                yield App("R-Extract", (x.id, t.id), [oob1, oob2, inb],
                          treat_key=key)
        return self._pick(cfg, cc, gen())

    def _entailed(self, cfg, lm, at) -> bool:
        # an entailed atom must hold under the current model; checking that
        # first avoids most full entailment queries
        if not arith.atom_holds_model(at, lm):
            return False
        return arith.lia_entails(cfg.a_atoms, cfg.a_clauses, at)

    # step 4: normal forms, U-Eq / C-Split
    def _step_split(self, cfg, cc, lm) -> Tuple[Optional[App], bool]:
        for cls in cc.classes():
            units = sorted((m for m in cls if m.op == tm.UNIT),
                           key=lambda t: t.id)
            for u1, u2 in itertools.combinations(units, 2):
                if not cc.same(u1.args[0], u2.args[0]):
                    app = App("U-Eq", (u1.id, u2.id),
                              [Branch(lits=[(True, u1.args[0], u2.args[0])])])
                    return app, False
        nfs = self._nfs_of(cc)
        pressure = bool(nfs.skipped)
        for r in sorted(nfs.cands, key=lambda t: cc.alpha(t).id):
            cands = nfs.cands[r]
            if len(cands) < 2:
                continue
            got = self._make_split(cfg, cc, r, cands, lm)
            if got == "pressure":
                pressure = True
            elif got is not None:
                return got, pressure
        return None, pressure

    def _make_split(self, cfg, cc, r, cands, lm):
        blocked = False
        for v1, v2 in itertools.combinations(cands, 2):
            pick = None
            p = 0
            while p < len(v1) and p < len(v2) and v1[p] is v2[p]:
                p += 1
            if p < len(v1) and p < len(v2):
                y, y2 = v1[p], v2[p]
                if y not in v2[p + 1:] and y2 not in v1[p + 1:]:
                    pick = (y, y2)
                else:
                    # matching in reverse may dodge the loop guard
                    q = 0
                    while q < len(v1) and q < len(v2) and v1[-1 - q] is v2[-1 - q]:
                        q += 1
                    if q < len(v1) and q < len(v2):
                        y, y2 = v1[len(v1) - 1 - q], v2[len(v2) - 1 - q]
                        if y not in v2[:len(v2) - 1 - q] and \
                                y2 not in v1[:len(v1) - 1 - q]:
                            pick = (y, y2)
                        else:
                            blocked = True
            if pick is None:
                continue
            y, y2 = pick
            alpha_id = cc.alpha(r).id
            if cfg.csplit_depth.get(alpha_id, 0) >= CSPLIT_DEPTH_CAP:
                return "pressure"
            ly, ly2 = self._lv(cfg, y), self._lv(cfg, y2)
            (k1,) = self.ctx.witnessed(("C-Split", y.id, y2.id, 1), (y.sort,))
            (k2,) = self.ctx.witnessed(("C-Split", y.id, y2.id, 2), (y.sort,))
            branches = []
            if not self._entailed(cfg, lm, a_le(ly, ly2)):
                branches.append(Branch(atoms=[a_lt(ly2, ly)],
                                       lits=[(True, y, tm.concat(y2, k1))]))
            if not self._entailed(cfg, lm, a_le(ly2, ly)):
                branches.append(Branch(atoms=[a_lt(ly, ly2)],
                                       lits=[(True, y2, tm.concat(y, k2))]))
            if not self._entailed(cfg, lm, a_ne(ly, ly2)):
                branches.append(Branch(atoms=[a_eq(ly, ly2)],
                                       lits=[(True, y, y2)]))
            app = App("C-Split", (y.id, y2.id), branches, csplit_class=alpha_id)
            if self._redundant(cfg, cc, app):
                continue
            return app
        return "pressure" if blocked else None

    # step 5: merge classes with equal normal forms
    def _step_ceq(self, cfg, cc) -> Optional[App]:
        nfs = self._nfs_of(cc)
        byvec: Dict[tuple, List[Term]] = {}
        for r in sorted(nfs.cands, key=lambda t: cc.alpha(t).id):
            for vec in nfs.cands[r]:
                byvec.setdefault(vec, []).append(r)
        def gen():
            for vec, classes in sorted(byvec.items(),
                                       key=lambda kv: _vec_key(kv[0])):
                if len(classes) < 2:
                    continue
                base = classes[0]
                for other in classes[1:]:
                    yield App("C-Eq", (cc.alpha(base).id, cc.alpha(other).id),
                              [Branch(lits=[(True, cc.alpha(base),
                                             cc.alpha(other))])])
        return self._pick(cfg, cc, gen())

    # step 6: extensionality for sequence disequalities
    def _step_deq(self, cfg, cc) -> Optional[App]:
        def gen():
            for lit in self._sorted_lits(cfg):
                if lit.pos or lit.lhs.sort.kind != "Seq":
                    continue
                key = ("Deq", lit)
                if key in cfg.treated:
                    continue
                x, y = lit.lhs, lit.rhs
                lx, ly = self._lv(cfg, x), self._lv(cfg, y)
                es = x.sort.elem
                wsort = es if es.kind == "Elem" else tm.INT
                i, w1, w2 = self.ctx.witnessed(
                    ("Deq-Ext", lit), (tm.INT, wsort, wsort))
                b1 = Branch(lits=[(False, lx, ly)])
                b2 = Branch(atoms=[a_eq(lx, ly), a_le(ZERO, i), a_lt(i, lx)],
                            lits=[(True, w1, tm.nth(x, i)),
                                  (True, w2, tm.nth(y, i)),
                                  (False, w1, w2)])
                yield App("Deq-Ext", (x.id, y.id), [b1, b2], treat_key=key)
        return self._pick(cfg, cc, gen())

    # step 7 (ext): distribute nth/update over unit and concatenation forms
    def _step_distribute(self, cfg, cc, marked) -> Optional[App]:
        from . import ext
        nfs = self._nfs_of(cc)
        return self._pick(cfg, cc, ext.distribute_apps(self, cfg, cc, nfs, marked))

    # step 8 (ext): array reasoning on atomic sequences
    def _step_arrays(self, cfg, cc, marked) -> Optional[App]:
        from . import ext
        return self._pick(cfg, cc, ext.array_apps(self, cfg, cc, marked))

    # step 7 (base): reduce nth/update to concatenations
    def _step_reduce(self, cfg, cc, marked) -> Optional[App]:
        def gen():
            for x, t in self._op_lits(cfg, tm.NTH, marked):
                key = ("RN", x.id, t.id)
                if key in cfg.treated:
                    continue
                y, i = t.args
                ly = self._lv(cfg, y)
                k1, k2 = self.ctx.witnessed(("R-Nth", x.id, t.id),
                                            (y.sort, y.sort))
                lk1 = self.ctx.witnessed(("len", k1.id), (tm.INT,))[0]
                b1 = Branch(clauses=[(a_lt(i, ZERO), a_le(ly, i))])
                b2 = Branch(atoms=[a_le(ZERO, i), a_lt(i, ly), a_eq(lk1, i)],
                            lits=[(True, y, tm.concat(k1, tm.unit(x), k2))])
                yield App("R-Nth", (x.id, t.id), [b1, b2], treat_key=key)
            for x, t in self._op_lits(cfg, tm.UPDATE, marked):
                key = ("RU", x.id, t.id)
                if key in cfg.treated:
                    continue
                y, i, v = t.args
                ly = self._lv(cfg, y)
                k1, k2, k3 = self.ctx.witnessed(
                    ("R-Update", x.id, t.id), (y.sort, y.sort, y.sort))
                lk1 = self.ctx.witnessed(("len", k1.id), (tm.INT,))[0]
                lk2 = self.ctx.witnessed(("len", k2.id), (tm.INT,))[0]
                b1 = Branch(clauses=[(a_lt(i, ZERO), a_le(ly, i))],
                            lits=[(True, x, y)])
                b2 = Branch(atoms=[a_le(ZERO, i), a_lt(i, ly),
                                   a_eq(lk1, i), a_eq(lk2, ONE)],
                            lits=[(True, y, tm.concat(k1, k2, k3)),
                                  (True, x, tm.concat(k1, tm.unit(v), k3))])
                yield App("R-Update", (x.id, t.id), [b1, b2], treat_key=key)
        return self._pick(cfg, cc, gen())

    # step 9: arrangements for shared arithmetic variables
    def _step_sa(self, cfg, cc, lm) -> Optional[App]:
        shared = sorted(cfg.int_vars_in_s() & cfg.int_vars_in_a(),
                        key=lambda v: v.id)
        byval: Dict[int, List[Term]] = {}
        for v in shared:
            if v in lm:
                byval.setdefault(lm[v], []).append(v)
        def gen():
            for val, group in sorted(byval.items()):
                for x, y in itertools.combinations(group, 2):
                    e, d = a_eq(x, y), a_ne(x, y)
                    if e in cfg.a_atoms or d in cfg.a_atoms:
                        continue
                    yield App("S-A", (x.id, y.id),
                              [Branch(atoms=[e]), Branch(atoms=[d])])
        return self._pick(cfg, cc, gen())
