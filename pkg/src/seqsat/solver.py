"""Branch orchestration: preprocessing output in, verdict and model out."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import terms as tm
from .config import (Configuration, SolveCtx, le_atom, lin_atom, linearize,
                     mk_clause, REL_LE)
from .frontend import ParsedBranch, Script
from .model import ElemVal, Model, build_model, eval_term
from .seqcore import Engine, ONE, Result
from .terms import Term, add


def _le(cfg: Configuration, a: Term, b: Term):
    return le_atom(cfg.arith_term(a), cfg.arith_term(b))


def _lt(cfg: Configuration, a: Term, b: Term):
    return le_atom(add(cfg.arith_term(a), ONE), cfg.arith_term(b))


def _eq_lin(cfg: Configuration, a: Term, b: Term, pos: bool):
    ca, ka = linearize(cfg.arith_term(a))
    cb, kb = linearize(cfg.arith_term(b))
    coeffs = dict(ca)
    for v, c in cb.items():
        coeffs[v] = coeffs.get(v, 0) - c
    return lin_atom(coeffs, "==" if pos else "!=", kb - ka)


def _clause_atom(cfg: Configuration, pos: bool, atom: Term):
    a, b = atom.args
    if atom.op == tm.LEQ:
        return _le(cfg, a, b) if pos else _lt(cfg, b, a)
    return _eq_lin(cfg, a, b, pos)


def build_config(items, ctx: SolveCtx) -> Configuration:
    cfg = Configuration(ctx=ctx)
    for it in items:
        if it[0] == "lit":
            _, pos, atom = it
            a, b = atom.args
            if atom.op == tm.EQ:
                cfg.add_eq(a, b, pos)
            elif pos:
                cfg.add_atom(_le(cfg, a, b))
            else:
                cfg.add_atom(_lt(cfg, b, a))
        else:
            _, l1, l2 = it
            c1 = _clause_atom(cfg, *l1)
            c2 = _clause_atom(cfg, *l2)
            cfg.add_clause(c1, c2)
    return cfg


@dataclass
class Outcome:
    verdict: str                      # "sat" | "unsat" | "unknown"
    model: Optional[Model] = None
    values: Dict[Term, object] = field(default_factory=dict)
    reason: str = ""
    ctx: Optional[SolveCtx] = None


def _fill_defaults(sc: Script, values: Dict[Term, object], model: Model):
    for v in sc.decls.values():
        if v in values:
            continue
        if v.sort == tm.BOOL:
            values[v] = False
        elif v.sort == tm.INT:
            values[v] = 0
        elif v.sort.kind == "Elem":
            values[v] = model.default_elem(v.sort)
        else:
            values[v] = ()


def solve_branches(branches: List[ParsedBranch], mode: str = "ext",
                   step_limit: int = 100000,
                   trace: Optional[List[str]] = None,
                   script: Optional[Script] = None) -> Outcome:
    if not branches:
        return Outcome("unsat")
    ctx = SolveCtx(trace=trace)
    unknown_reason = ""
    saw_unknown = False
    for br in branches:
        cfg = build_config(br.items, ctx)
        eng = Engine(mode=mode, step_limit=step_limit, ctx=ctx)
        res = eng.solve(cfg)
        if res.status == "sat":
            model = build_model(res.config, res.cc, res.nfs, res.lia)
            values = dict(model.values)
            for v, b in br.bools.items():
                values[v] = b
            if script is not None:
                _fill_defaults(script, values, model)
            return Outcome("sat", model=model, values=values, ctx=ctx)
        if res.status == "unknown":
            saw_unknown = True
            unknown_reason = unknown_reason or res.reason
    if saw_unknown:
        return Outcome("unknown", reason=unknown_reason, ctx=ctx)
    return Outcome("unsat", ctx=ctx)


def eval_formula(f, values: Dict[Term, object], model: Optional[Model]) -> bool:
    tag = f[0]
    if tag == "true":
        return True
    if tag == "false":
        return False
    if tag == "and":
        return all(eval_formula(g, values, model) for g in f[1])
    if tag == "or":
        return any(eval_formula(g, values, model) for g in f[1])
    if tag == "not":
        return not eval_formula(f[1], values, model)
    if tag == "bvar":
        return bool(values.get(f[1], False))
    if model is not None:
        nth_oob, default = model.nth_oob, model.default_elem
    else:
        nth_oob, default = {}, lambda sort: ElemVal("@u!?") \
            if sort.kind == "Elem" else 0
    return bool(eval_term(f[1], values, nth_oob, default))


def validate(script: Script, out: Outcome) -> List[str]:
    """Return a list of assertion indices (as messages) the model violates."""
    bad = []
    for k, a in enumerate(script.assertions):
        if not eval_formula(a, out.values, out.model):
            bad.append(f"assertion {k + 1} evaluates to false under the model")
    return bad
