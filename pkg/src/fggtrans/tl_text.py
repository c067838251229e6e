"""S-expression serialization of TL terms and programs.

    atom     ::= SYMBOL (variable) | #K (constructor) | INT | #t | #f | "json string"
    term     ::= atom | (lam X term) | (@ term term+) | (prim OP term*)
               | (case term (#K (X*) term)+)
    program  ::= (let X term)* (main term)     one form per line

Application spines are printed flat, so printing is canonical and
``print_program(parse_program(s)) == s`` for every printed ``s``.
"""

from __future__ import annotations

import json
import re

from .tl import PRIM_ARITY, App, Case, Clause, Ctor, Lam, Lit, Prim, TLExpr, TLProgram, Var

_TOKEN = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()"]+))')
_INT = re.compile(r"-?\d+$")
_RESERVED_CTORS = {"t", "f"}


class TLSyntaxError(ValueError):
    pass


def _check_symbol(name: str) -> str:
    if not name or _INT.match(name) or name.startswith("#") or re.search(r'[\s()"]', name):
        raise ValueError(f"invalid TL variable name {name!r}")
    if name in ("lam", "@", "case", "prim", "let", "main"):
        raise ValueError(f"TL variable name {name!r} is a keyword")
    return name


def print_tl(e: TLExpr) -> str:
    out: list[str] = []
    _emit(e, out)
    return "".join(out)


def _emit(e: TLExpr, out: list[str]) -> None:
    if isinstance(e, Var):
        out.append(_check_symbol(e.name))
    elif isinstance(e, Ctor):
        if e.name in _RESERVED_CTORS or not e.name or re.search(r'[\s()"]', e.name):
            raise ValueError(f"cannot print constructor name {e.name!r}")
        out.append("#" + e.name)
    elif isinstance(e, Lit):
        if e.kind == "bool":
            out.append("#t" if e.value else "#f")
        elif e.kind == "int":
            out.append(str(e.value))
        else:
            out.append(json.dumps(e.value, ensure_ascii=False))
    elif isinstance(e, Lam):
        out.append(f"(lam {_check_symbol(e.var)} ")
        _emit(e.body, out)
        out.append(")")
    elif isinstance(e, App):
        spine = []
        while isinstance(e, App):
            spine.append(e.arg)
            e = e.fn
        out.append("(@ ")
        _emit(e, out)
        for a in reversed(spine):
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(e, Prim):
        out.append(f"(prim {e.op}")
        for a in e.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(e, Case):
        out.append("(case ")
        _emit(e.scrut, out)
        for c in e.clauses:
            out.append(f" (#{c.ctor} (")
            out.append(" ".join(_check_symbol(v) for v in c.vars))
            out.append(") ")
            _emit(c.body, out)
            out.append(")")
        out.append(")")
    else:
        raise TypeError(f"not a core TL term: {e!r}")


def print_program(p: TLProgram) -> str:
    lines = [f"(let {_check_symbol(n)} {print_tl(v)})" for n, v in p.bindings]
    lines.append(f"(main {print_tl(p.main)})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Parsing


def _tokens(text: str) -> list[str]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise TLSyntaxError(f"unexpected character at offset {pos}")
        toks.append(m.group(m.lastindex))
        pos = m.end()
    return toks


def _read(toks: list[str], i: int):
    """Read one s-expression into nested lists of atoms."""
    if i >= len(toks):
        raise TLSyntaxError("unexpected end of input")
    t = toks[i]
    if t == ")":
        raise TLSyntaxError("unexpected )")
    if t != "(":
        return t, i + 1
    items = []
    i += 1
    while True:
        if i >= len(toks):
            raise TLSyntaxError("missing )")
        if toks[i] == ")":
            return items, i + 1
        item, i = _read(toks, i)
        items.append(item)


def _symbol(name: str) -> str:
    try:
        return _check_symbol(name)
    except ValueError as err:
        raise TLSyntaxError(str(err)) from None


def _atom(t: str) -> TLExpr:
    if t.startswith('"'):
        return Lit(json.loads(t))
    if _INT.match(t):
        return Lit(int(t))
    if t == "#t":
        return Lit(True)
    if t == "#f":
        return Lit(False)
    if t.startswith("#"):
        if len(t) == 1:
            raise TLSyntaxError("empty constructor name")
        return Ctor(t[1:])
    return Var(_symbol(t))


def _build(s) -> TLExpr:
    if isinstance(s, str):
        return _atom(s)
    if not s or not isinstance(s[0], str):
        raise TLSyntaxError("expected a form keyword")
    head = s[0]
    if head == "lam":
        if len(s) != 3 or not isinstance(s[1], str):
            raise TLSyntaxError("lam takes a variable and a body")
        return Lam(_symbol(s[1]), _build(s[2]))
    if head == "@":
        if len(s) < 3:
            raise TLSyntaxError("@ needs a function and at least one argument")
        e = _build(s[1])
        for a in s[2:]:
            e = App(e, _build(a))
        return e
    if head == "prim":
        if len(s) < 2 or not isinstance(s[1], str):
            raise TLSyntaxError("prim needs an operator")
        if PRIM_ARITY.get(s[1]) != len(s) - 2:
            raise TLSyntaxError(f"unknown primitive or wrong arity: {s[1]}")
        return Prim(s[1], tuple(_build(a) for a in s[2:]))
    if head == "case":
        if len(s) < 3:
            raise TLSyntaxError("case needs a scrutinee and clauses")
        clauses = []
        for c in s[2:]:
            if (not isinstance(c, list) or len(c) != 3 or not isinstance(c[0], str)
                    or not c[0].startswith("#") or not isinstance(c[1], list)
                    or not all(isinstance(v, str) for v in c[1])):
                raise TLSyntaxError("malformed case clause")
            clauses.append(Clause(c[0][1:], tuple(_symbol(v) for v in c[1]), _build(c[2])))
        names = [c.ctor for c in clauses]
        if len(set(names)) != len(names):
            raise TLSyntaxError("duplicate constructor in case")
        return Case(_build(s[1]), tuple(clauses))
    raise TLSyntaxError(f"unknown form {head}")


def parse_tl(text: str) -> TLExpr:
    toks = _tokens(text)
    s, i = _read(toks, 0)
    if i != len(toks):
        raise TLSyntaxError("trailing input after term")
    return _build(s)


def parse_program(text: str) -> TLProgram:
    toks = _tokens(text)
    i = 0
    bindings = []
    main = None
    while i < len(toks):
        s, i = _read(toks, i)
        if not isinstance(s, list) or not s:
            raise TLSyntaxError("expected (let ...) or (main ...)")
        if main is not None:
            raise TLSyntaxError("nothing may follow (main ...)")
        if s[0] == "let" and len(s) == 3 and isinstance(s[1], str):
            bindings.append((s[1], _build(s[2])))
        elif s[0] == "main" and len(s) == 2:
            main = _build(s[1])
        else:
            raise TLSyntaxError("expected (let X term) or (main term)")
    if main is None:
        raise TLSyntaxError("missing (main ...)")
    return TLProgram(tuple(bindings), main)
