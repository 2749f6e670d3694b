"""Sorts and hash-consed terms for the sequence solver.

Terms are interned: structurally equal terms are the same object, so identity
comparison and id-based ordering are meaningful everywhere else in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple


class SortError(Exception):
    pass


@dataclass(frozen=True)
class Sort:
    kind: str                      # "Int" | "Bool" | "Elem" | "Seq"
    name: Optional[str] = None     # uninterpreted element sort name
    elem: Optional["Sort"] = None  # element sort of a sequence sort

    def __str__(self) -> str:
        if self.kind == "Elem":
            return self.name or "Elem"
        if self.kind == "Seq":
            return f"(Seq {self.elem})"
        return self.kind


INT = Sort("Int")
BOOL = Sort("Bool")


def elem_sort(name: str) -> Sort:
    return Sort("Elem", name=name)


def seq_sort(elem: Sort) -> Sort:
    if elem.kind not in ("Int", "Elem"):
        raise SortError(f"sequences over {elem} are not supported")
    return Sort("Seq", elem=elem)


# operator tags
VAR = "var"
CONST = "const"          # integer numeral
ADD = "+"
NEG = "-"
LEQ = "<="
EQ = "="
EMPTY = "seq.empty"
UNIT = "seq.unit"
LEN = "seq.len"
NTH = "seq.nth"
UPDATE = "seq.update"
EXTRACT = "seq.extract"
CONCAT = "seq.++"


class Term:
    __slots__ = ("id", "op", "args", "sort", "name", "value")

    def __init__(self, tid: int, op: str, args: Tuple["Term", ...], sort: Sort,
                 name: Optional[str], value: Optional[int]):
        self.id = tid
        self.op = op
        self.args = args
        self.sort = sort
        self.name = name
        self.value = value

    @property
    def is_var(self) -> bool:
        return self.op == VAR

    def __repr__(self) -> str:
        return to_str(self)

    # interned: identity semantics
    def __hash__(self) -> int:
        return self.id

    def __eq__(self, other) -> bool:
        return self is other


_table: Dict[tuple, Term] = {}
_next_id = [0]


def _intern(op: str, args: Tuple[Term, ...], sort: Sort,
            name: Optional[str] = None, value: Optional[int] = None) -> Term:
    key = (op, name, value, tuple(a.id for a in args), sort)
    t = _table.get(key)
    if t is None:
        t = Term(_next_id[0], op, args, sort, name, value)
        _next_id[0] += 1
        _table[key] = t
    return t


def var(name: str, sort: Sort) -> Term:
    return _intern(VAR, (), sort, name=name)


def const(n: int) -> Term:
    if n < 0:
        return neg(const(-n))
    return _intern(CONST, (), INT, value=n)


def _want(t: Term, kind: str, what: str) -> None:
    if t.sort.kind != kind:
        raise SortError(f"{what} expects {kind}, got {t.sort} in {t!r}")


def add(*ts: Term) -> Term:
    if len(ts) < 1:
        raise SortError("+ needs at least one argument")
    for t in ts:
        _want(t, "Int", "+")
    out = ts[0]
    for t in ts[1:]:
        out = _intern(ADD, (out, t), INT)
    return out


def neg(t: Term) -> Term:
    _want(t, "Int", "-")
    return _intern(NEG, (t,), INT)


def leq(a: Term, b: Term) -> Term:
    _want(a, "Int", "<=")
    _want(b, "Int", "<=")
    return _intern(LEQ, (a, b), BOOL)


def eq(a: Term, b: Term) -> Term:
    if a.sort != b.sort:
        raise SortError(f"= over different sorts: {a.sort} vs {b.sort}")
    if b.id < a.id:
        a, b = b, a
    return _intern(EQ, (a, b), BOOL)


def empty(elem: Sort) -> Term:
    return _intern(EMPTY, (), seq_sort(elem))


def unit(t: Term) -> Term:
    if t.sort.kind not in ("Int", "Elem"):
        raise SortError(f"seq.unit over {t.sort} is not supported")
    return _intern(UNIT, (t,), seq_sort(t.sort))


def length(s: Term) -> Term:
    _want(s, "Seq", "seq.len")
    return _intern(LEN, (s,), INT)


def nth(s: Term, i: Term) -> Term:
    _want(s, "Seq", "seq.nth")
    _want(i, "Int", "seq.nth")
    return _intern(NTH, (s, i), s.sort.elem)  # type: ignore[arg-type]


def update(s: Term, i: Term, v: Term) -> Term:
    _want(s, "Seq", "seq.update")
    _want(i, "Int", "seq.update")
    if v.sort != s.sort.elem:
        raise SortError(f"seq.update value sort {v.sort} != element sort {s.sort.elem}")
    return _intern(UPDATE, (s, i, v), s.sort)


def extract(s: Term, i: Term, j: Term) -> Term:
    _want(s, "Seq", "seq.extract")
    _want(i, "Int", "seq.extract")
    _want(j, "Int", "seq.extract")
    return _intern(EXTRACT, (s, i, j), s.sort)


def concat(*ss: Term) -> Term:
    if len(ss) < 2:
        raise SortError("seq.++ needs at least two arguments")
    sort = ss[0].sort
    for s in ss:
        if s.sort != sort:
            raise SortError("seq.++ over mixed sequence sorts")
        _want(s, "Seq", "seq.++")
    return _intern(CONCAT, tuple(ss), sort)


def mk(op: str, args: Iterable[Term], sort: Sort) -> Term:
    """Rebuild a non-leaf term of the same operator with new arguments."""
    args = tuple(args)
    if op == CONCAT:
        # vector convention: zero components is the empty sequence,
        # a single component is that component
        if len(args) == 0:
            return empty(sort.elem)  # type: ignore[arg-type]
        if len(args) == 1:
            return args[0]
        return concat(*args)
    if op == ADD:
        return _intern(ADD, args, INT)
    if op == NEG:
        return neg(args[0])
    if op == LEQ:
        return leq(args[0], args[1])
    if op == EQ:
        return eq(args[0], args[1])
    if op == UNIT:
        return unit(args[0])
    if op == LEN:
        return length(args[0])
    if op == NTH:
        return nth(args[0], args[1])
    if op == UPDATE:
        return update(args[0], args[1], args[2])
    if op == EXTRACT:
        return extract(args[0], args[1], args[2])
    raise SortError(f"cannot rebuild {op}")


def _step_top(t: Term) -> Optional[Term]:
    """One top-level rewrite, or None when no rule applies at the root."""
    if t.op == LEN:
        s = t.args[0]
        if s.op == EMPTY:
            return const(0)
        if s.op == UNIT:
            return const(1)
        if s.op == UPDATE:
            return length(s.args[0])
        if s.op == CONCAT:
            return add(*[length(c) for c in s.args])
    if t.op == CONCAT:
        if any(c.op in (EMPTY, CONCAT) for c in t.args):
            out = []
            for c in t.args:
                if c.op == EMPTY:
                    continue
                if c.op == CONCAT:
                    out.extend(c.args)
                else:
                    out.append(c)
            return mk(CONCAT, out, t.sort)
    return None


def nf(t: Term, _memo: Optional[Dict[Term, Term]] = None) -> Term:
    """Normal form under the length/concatenation rewrite rules."""
    if _memo is None:
        _memo = {}
    got = _memo.get(t)
    if got is not None:
        return got
    out = t
    if out.args:
        new_args = tuple(nf(a, _memo) for a in out.args)
        if new_args != out.args:
            out = mk(out.op, new_args, out.sort)
    while True:
        nxt = _step_top(out)
        if nxt is None:
            break
        out = nf(nxt, _memo)
    _memo[t] = out
    return out


_subterms_memo: dict = {}


def subterms(t: Term):
    """All subterms, each once, children before parents."""
    cached = _subterms_memo.get(t.id)
    if cached is not None:
        return cached
    seen = set()
    order = []

    def walk(u: Term):
        if u.id in seen:
            return
        seen.add(u.id)
        for a in u.args:
            walk(a)
        order.append(u)

    walk(t)
    out = tuple(order)
    _subterms_memo[t.id] = out
    return out


def to_str(t: Term) -> str:
    if t.op == VAR:
        return t.name  # type: ignore[return-value]
    if t.op == CONST:
        return str(t.value)
    if t.op == EMPTY:
        return f"(as seq.empty {t.sort})"
    if t.op == NEG:
        return f"(- {to_str(t.args[0])})"
    return "(" + t.op + "".join(" " + to_str(a) for a in t.args) + ")"
