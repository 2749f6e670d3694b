"""SMT-LIB subset frontend: parsing, preprocessing to branches, printing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from . import terms as tm
from .model import ElemVal, Model
from .terms import Term

DNF_CAP = 4096


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


class DnfCapExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# s-expressions

@dataclass
class SExpr:
    val: Union[str, List["SExpr"]]
    line: int
    col: int

    @property
    def is_atom(self) -> bool:
        return isinstance(self.val, str)


def tokenize(text: str):
    line, col = 1, 0
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 0
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield (c, line, col)
            col += 1
            i += 1
        else:
            j = i
            while j < n and text[j] not in " \t\r\n();":
                j += 1
            yield (text[i:j], line, col)
            col += j - i
            i = j


def parse_sexprs(text: str) -> List[SExpr]:
    stack: List[SExpr] = []
    out: List[SExpr] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append(SExpr([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            done = stack.pop()
            (stack[-1].val if stack else out).append(done)  # type: ignore
        else:
            atom = SExpr(tok, line, col)
            (stack[-1].val if stack else out).append(atom)  # type: ignore
    if stack:
        raise ParseError("unbalanced '('", stack[-1].line, stack[-1].col)
    return out


# ---------------------------------------------------------------------------
# scripts

# formulas: ("and", [..]) ("or", [..]) ("not", f) ("atom", Term)
# ("bvar", Term) ("true",) ("false",)
Formula = tuple


@dataclass
class Script:
    sorts: Dict[str, tm.Sort] = field(default_factory=dict)
    decls: Dict[str, Term] = field(default_factory=dict)
    assertions: List[Formula] = field(default_factory=list)
    check_sat: bool = False
    get_model: bool = False


def _err(sx: SExpr, msg: str):
    raise ParseError(msg, sx.line, sx.col)


def parse_sort(sx: SExpr, sorts: Dict[str, tm.Sort]) -> tm.Sort:
    if sx.is_atom:
        name = sx.val
        if name == "Int":
            return tm.INT
        if name == "Bool":
            return tm.BOOL
        if name in sorts:
            return sorts[name]  # type: ignore[index]
        _err(sx, f"unknown sort {name}")
    items = sx.val
    if len(items) == 2 and items[0].is_atom and items[0].val == "Seq":
        elem = parse_sort(items[1], sorts)
        if elem.kind not in ("Int", "Elem"):
            _err(sx, f"unsupported sequence element sort {elem}")
        return tm.seq_sort(elem)
    _err(sx, "unsupported sort")


def parse_script(text: str) -> Script:
    sc = Script()
    for sx in parse_sexprs(text):
        if sx.is_atom or not sx.val:
            _err(sx, "expected a command")
        head = sx.val[0]
        if not head.is_atom:
            _err(sx, "expected a command name")
        cmd = head.val
        args = sx.val[1:]
        if cmd in ("set-logic", "set-info", "set-option", "exit"):
            continue
        if cmd == "declare-sort":
            if len(args) != 2 or not args[0].is_atom or args[1].val != "0":
                _err(sx, "declare-sort expects a name and arity 0")
            sc.sorts[args[0].val] = tm.elem_sort(args[0].val)  # type: ignore
        elif cmd in ("declare-const", "declare-fun"):
            if cmd == "declare-fun":
                if len(args) != 3 or not isinstance(args[1].val, list) or args[1].val:
                    _err(sx, "only nullary declare-fun is supported")
                name_sx, sort_sx = args[0], args[2]
            else:
                if len(args) != 2:
                    _err(sx, "declare-const expects a name and a sort")
                name_sx, sort_sx = args[0], args[1]
            if not name_sx.is_atom:
                _err(name_sx, "expected a name")
            name = name_sx.val
            if name in sc.decls:
                _err(name_sx, f"{name} already declared")
            sc.decls[name] = tm.var(name, parse_sort(sort_sx, sc.sorts))
        elif cmd == "assert":
            if len(args) != 1:
                _err(sx, "assert expects one formula")
            sc.assertions.append(parse_formula(args[0], sc))
        elif cmd == "check-sat":
            sc.check_sat = True
        elif cmd == "get-model":
            sc.get_model = True
        else:
            _err(sx, f"unsupported command {cmd}")
    return sc


def parse_term(sx: SExpr, sc: Script) -> Term:
    if sx.is_atom:
        s = sx.val
        if s.lstrip("-").isdigit() and s.lstrip("-"):
            n = int(s)
            return tm.const(n) if n >= 0 else tm.neg(tm.const(-n))
        if s in sc.decls:
            return sc.decls[s]  # type: ignore[index]
        _err(sx, f"unknown constant {s}")
    items = sx.val
    if not items or not items[0].is_atom:
        _err(sx, "expected an operator")
    op = items[0].val
    args = items[1:]
    try:
        if op == "as":
            if len(args) == 2 and args[0].is_atom and args[0].val == "seq.empty":
                sort = parse_sort(args[1], sc.sorts)
                if sort.kind != "Seq":
                    _err(sx, "seq.empty needs a sequence sort")
                return tm.empty(sort.elem)  # type: ignore[arg-type]
            _err(sx, "unsupported as-annotation")
        sub = [parse_term(a, sc) for a in args]
        if op == "+":
            return tm.add(*sub)
        if op == "-":
            if len(sub) == 1:
                return tm.neg(sub[0])
            return tm.add(sub[0], *[tm.neg(x) for x in sub[1:]])
        if op == "seq.unit":
            return tm.unit(*sub)
        if op == "seq.len":
            return tm.length(*sub)
        if op == "seq.nth":
            return tm.nth(*sub)
        if op == "seq.update":
            return tm.update(*sub)
        if op == "seq.extract":
            return tm.extract(*sub)
        if op in ("seq.++", "seq.concat"):
            return tm.concat(*sub)
    except (tm.SortError, TypeError) as e:
        _err(sx, str(e))
    _err(sx, f"unsupported operator {op}")


def parse_formula(sx: SExpr, sc: Script) -> Formula:
    if sx.is_atom:
        s = sx.val
        if s == "true":
            return ("true",)
        if s == "false":
            return ("false",)
        if s in sc.decls and sc.decls[s].sort == tm.BOOL:  # type: ignore[index]
            return ("bvar", sc.decls[s])  # type: ignore[index]
        _err(sx, f"expected a formula, got {s}")
    items = sx.val
    if not items or not items[0].is_atom:
        _err(sx, "expected an operator")
    op = items[0].val
    args = items[1:]
    if op == "and":
        return ("and", [parse_formula(a, sc) for a in args])
    if op == "or":
        return ("or", [parse_formula(a, sc) for a in args])
    if op == "not":
        if len(args) != 1:
            _err(sx, "not expects one argument")
        return ("not", parse_formula(args[0], sc))
    if op in ("=", "distinct", "<=", "<", ">", ">="):
        sub = [parse_term(a, sc) for a in args]
        if len(sub) < 2:
            _err(sx, f"{op} expects at least two arguments")
        try:
            if op == "=":
                conj = [("atom", tm.eq(a, b)) for a, b in zip(sub, sub[1:])]
            elif op == "distinct":
                import itertools
                conj = [("not", ("atom", tm.eq(a, b)))
                        for a, b in itertools.combinations(sub, 2)]
            elif op == "<=":
                conj = [("atom", tm.leq(a, b)) for a, b in zip(sub, sub[1:])]
            elif op == ">=":
                conj = [("atom", tm.leq(b, a)) for a, b in zip(sub, sub[1:])]
            elif op == "<":
                conj = [("not", ("atom", tm.leq(b, a)))
                        for a, b in zip(sub, sub[1:])]
            else:
                conj = [("not", ("atom", tm.leq(a, b)))
                        for a, b in zip(sub, sub[1:])]
        except tm.SortError as e:
            _err(sx, str(e))
        return conj[0] if len(conj) == 1 else ("and", conj)
    _err(sx, f"unsupported operator {op}")


# ---------------------------------------------------------------------------
# negation normal form and branches

def _arithish(t: Term) -> bool:
    if t.op == tm.CONST or (t.is_var and t.sort == tm.INT):
        return True
    if t.op in (tm.ADD, tm.NEG):
        return all(_arithish(a) for a in t.args)
    return t.op == tm.LEN


def _leaf(pos: bool, atom: Term):
    return ("lit", pos, atom)


def _preservable(leaf) -> bool:
    _, pos, atom = leaf
    if not all(_arithish(a) for a in atom.args):
        return False
    if atom.op == tm.LEQ:
        return True
    return atom.op == tm.EQ and pos and atom.args[0].sort == tm.INT


def nnf(f: Formula, pos: bool = True):
    tag = f[0]
    if tag == "not":
        return nnf(f[1], not pos)
    if tag in ("and", "or"):
        kids = [nnf(g, pos) for g in f[1]]
        out_tag = tag if pos else ("or" if tag == "and" else "and")
        return (out_tag, kids)
    if tag == "true":
        return ("true",) if pos else ("false",)
    if tag == "false":
        return ("false",) if pos else ("true",)
    if tag == "bvar":
        return ("blit", pos, f[1])
    if tag == "atom":
        return _leaf(pos, f[1])
    raise ValueError(f"bad formula node {tag}")


@dataclass
class ParsedBranch:
    items: List[tuple]                       # ("lit", ...) / ("or2", ...)
    bools: Dict[Term, bool] = field(default_factory=dict)


def to_branches(assertions: List[Formula], cap: int = DNF_CAP) -> List[ParsedBranch]:
    trees = [nnf(a) for a in assertions]
    root = ("and", trees) if len(trees) != 1 else trees[0]

    def go(node) -> List[tuple]:
        """DNF as a list of tuples of leaves."""
        tag = node[0]
        if tag == "true":
            return [()]
        if tag == "false":
            return []
        if tag in ("lit", "blit", "or2"):
            return [(node,)]
        if tag == "or":
            kids = node[1]
            if len(kids) == 2 and all(k[0] == "lit" and _preservable(k)
                                      for k in kids):
                (_, p1, a1), (_, p2, a2) = kids
                return [(("or2", (p1, a1), (p2, a2)),)]
            out = []
            for k in kids:
                out.extend(go(k))
                if len(out) > cap:
                    raise DnfCapExceeded
            return out
        if tag == "and":
            out = [()]
            for k in kids_of(node):
                nxt = []
                for left in out:
                    for right in go(k):
                        nxt.append(left + tuple(l for l in right
                                                if l not in left))
                        if len(nxt) > cap:
                            raise DnfCapExceeded
                out = nxt
            return out
        raise ValueError(tag)

    def kids_of(node):
        return node[1]

    seen = set()
    branches: List[ParsedBranch] = []
    for combo in go(root):
        items = []
        bools: Dict[Term, bool] = {}
        ok = True
        for leaf in combo:
            if leaf[0] == "blit":
                _, p, v = leaf
                if bools.get(v, p) != p:
                    ok = False
                    break
                bools[v] = p
            else:
                items.append(leaf)
        if not ok:
            continue
        key = (frozenset((it[0], it[1], it[2]) if it[0] == "lit" else
                         (it[0], it[1], it[2]) for it in items),
               frozenset(bools.items()))
        if key in seen:
            continue
        seen.add(key)
        branches.append(ParsedBranch(items, bools))
    return branches


# ---------------------------------------------------------------------------
# printing

def format_value(val, sort: tm.Sort) -> str:
    if sort == tm.BOOL:
        return "true" if val else "false"
    if sort == tm.INT:
        return str(val) if val >= 0 else f"(- {-val})"
    if sort.kind == "Elem":
        return val.name if isinstance(val, ElemVal) else str(val)
    # sequence
    if not val:
        return f"(as seq.empty {sort})"
    units = [f"(seq.unit {format_value(v, sort.elem)})" for v in val]
    if len(units) == 1:
        return units[0]
    return "(seq.++ " + " ".join(units) + ")"


def print_model(sc: Script, values: Dict[Term, object]) -> str:
    lines = ["("]
    for name, v in sc.decls.items():
        val = values.get(v)
        if val is None:
            continue
        lines.append(f"  (define-fun {name} () {v.sort} "
                     f"{format_value(val, v.sort)})")
    lines.append(")")
    return "\n".join(lines)
