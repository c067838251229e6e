"""Go-flavoured concrete syntax for FGG⁻: a hand-written recursive-descent parser and printer.

The grammar is frozen in ``docs/grammar.ebnf``.  Bare names in type position
are read as named types and turned into type variables afterwards when a
type parameter of that name is in scope.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .syntax import (
    BOOL,
    INT,
    STRING,
    Base,
    BinOp,
    BinOpKind,
    BoolLit,
    Builtin,
    BuiltinKind,
    Expr,
    FieldAccess,
    IfaceDecl,
    IntLit,
    MethodCall,
    MethodDecl,
    MethodSig,
    Named,
    Param,
    SourceProgram,
    StrLit,
    StructDecl,
    StructLit,
    TyParam,
    TypeExpr,
    TyVar,
    Var,
    show_type,
)

KEYWORDS = {"type", "struct", "interface", "func", "return", "true", "false",
            "int", "bool", "string", "intToString"}
BASE_NAMES = {"int": INT, "bool": BOOL, "string": STRING}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, STR, PUNCT, EOF
    text: str
    line: int
    col: int


_LEX = re.compile(r"""
    (?P<ws>[ \t\r]+|//[^\n]*)
  | (?P<nl>\n)
  | (?P<INT>-?\d+)
  | (?P<STR>"(?:[^"\\\n]|\\.)*")
  | (?P<NAME>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<PUNCT>==|[\[\](){},;.=+])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _LEX.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(Token("EOF", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        shown = tok.text or "end of input"
        raise ParseError(f"{msg} (found {shown!r})", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("PUNCT", "NAME") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "NAME" or t.text in KEYWORDS:
            self.error(f"expected {what}")
        self.i += 1
        return t.text

    def seps(self) -> None:
        while self.accept(";"):
            pass

    # -- types

    def type_(self) -> TypeExpr:
        t = self.tok
        if t.kind == "NAME" and t.text in BASE_NAMES:
            self.i += 1
            return BASE_NAMES[t.text]
        name = self.ident("type")
        args: tuple = ()
        if self.accept("["):
            args = self.comma_list("]", self.type_)
        return Named(name, args)

    def comma_list(self, close: str, item):
        out = []
        if self.accept(close):
            return tuple(out)
        while True:
            out.append(item())
            if self.accept(close):
                return tuple(out)
            self.expect(",")

    def typarams(self) -> tuple[TyParam, ...]:
        if not self.accept("["):
            return ()
        return self.comma_list("]", lambda: TyParam(self.ident("type parameter"), self.type_()))

    def params(self) -> tuple[Param, ...]:
        self.expect("(")
        return self.comma_list(")", lambda: Param(self.ident("parameter"), self.type_()))

    def msig(self) -> MethodSig:
        name = self.ident("method name")
        tps = self.typarams()
        ps = self.params()
        return MethodSig(name, tps, ps, self.type_())

    # -- expressions

    def expr(self) -> Expr:
        lhs = self.add_expr()
        if self.accept("=="):
            lhs = BinOp(BinOpKind.EQ, lhs, self.add_expr())
            if self.at("=="):
                self.error("== does not chain; add parentheses")
        return lhs

    def add_expr(self) -> Expr:
        e = self.postfix()
        while self.accept("+"):
            e = BinOp(BinOpKind.PLUS, e, self.postfix())
        return e

    def postfix(self) -> Expr:
        e = self.primary()
        while self.accept("."):
            name = self.ident("field or method name")
            if self.at("[") or self.at("("):
                tyargs: tuple = ()
                if self.accept("["):
                    tyargs = self.comma_list("]", self.type_)
                self.expect("(")
                args = self.comma_list(")", self.expr)
                e = MethodCall(e, name, tyargs, args)
            else:
                e = FieldAccess(e, name)
        return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            return IntLit(int(t.text))
        if t.kind == "STR":
            self.i += 1
            try:
                return StrLit(json.loads(t.text))
            except json.JSONDecodeError:
                self.error("bad string literal", t)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "NAME" and t.text in ("true", "false"):
            self.i += 1
            return BoolLit(t.text == "true")
        if self.accept("intToString"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return Builtin(BuiltinKind.INT_TO_STRING, e)
        name = self.ident("expression")
        if self.at("[") or self.at("{"):
            args: tuple = ()
            if self.accept("["):
                args = self.comma_list("]", self.type_)
            self.expect("{")
            return StructLit(Named(name, args), self.comma_list("}", self.expr))
        return Var(name)

    # -- declarations

    def program(self) -> tuple[list, Expr]:
        decls = []
        main = None
        self.seps()
        while self.tok.kind != "EOF":
            if main is not None:
                self.error("declarations must precede func main")
            if self.at("type"):
                decls.append(self.type_decl())
            elif self.at("func") and self.peek().text == "main" and self.peek(2).text == "(":
                main = self.main_decl()
            elif self.at("func"):
                decls.append(self.method_decl())
            else:
                self.error("expected a declaration")
            self.seps()
        if main is None:
            self.error("missing func main")
        return decls, main

    def type_decl(self):
        self.expect("type")
        name = self.ident("type name")
        tps = self.typarams()
        if self.accept("struct"):
            self.expect("{")
            fields = []
            self.seps()
            while not self.accept("}"):
                fields.append(Param(self.ident("field name"), self.type_()))
                self.seps()
            return StructDecl(name, tps, tuple(fields))
        if self.accept("interface"):
            self.expect("{")
            specs = []
            self.seps()
            while not self.accept("}"):
                specs.append(self.msig())
                self.seps()
            return IfaceDecl(name, tps, tuple(specs))
        self.error("expected struct or interface")

    def method_decl(self) -> MethodDecl:
        self.expect("func")
        self.expect("(")
        recv = self.ident("receiver name")
        struct = self.ident("receiver type")
        tps = self.typarams()
        self.expect(")")
        sig = self.msig()
        self.expect("{")
        self.seps()
        if not self.at("return"):
            self.error("method body must be a single return statement")
        self.expect("return")
        body = self.expr()
        self.seps()
        self.expect("}")
        return MethodDecl(recv, struct, tps, sig, body)

    def main_decl(self) -> Expr:
        self.expect("func")
        self.expect("main")
        self.expect("(")
        self.expect(")")
        self.expect("{")
        self.seps()
        self.expect("_")
        self.expect("=")
        e = self.expr()
        self.seps()
        self.expect("}")
        return e


# ---------------------------------------------------------------------------
# Turning in-scope names into type variables


def _resolve_type(t: TypeExpr, scope: frozenset) -> TypeExpr:
    if isinstance(t, Named):
        if not t.args and t.name in scope:
            return TyVar(t.name)
        return Named(t.name, tuple(_resolve_type(a, scope) for a in t.args))
    return t


def _resolve_typarams(tps, scope: frozenset):
    inner = scope | {tp.var for tp in tps}
    return tuple(TyParam(tp.var, _resolve_type(tp.bound, inner)) for tp in tps), inner


def _resolve_sig(sig: MethodSig, scope: frozenset) -> MethodSig:
    tps, inner = _resolve_typarams(sig.typarams, scope)
    return MethodSig(sig.name, tps,
                     tuple(Param(q.name, _resolve_type(q.type, inner)) for q in sig.params),
                     _resolve_type(sig.ret, inner))


def _resolve_expr(e: Expr, scope: frozenset) -> Expr:
    r = lambda x: _resolve_expr(x, scope)  # noqa: E731
    if isinstance(e, StructLit):
        return StructLit(_resolve_type(e.type, scope), tuple(map(r, e.args)))
    if isinstance(e, FieldAccess):
        return FieldAccess(r(e.recv), e.field)
    if isinstance(e, MethodCall):
        return MethodCall(r(e.recv), e.name, tuple(_resolve_type(t, scope) for t in e.tyargs),
                          tuple(map(r, e.args)))
    if isinstance(e, BinOp):
        return BinOp(e.op, r(e.lhs), r(e.rhs))
    if isinstance(e, Builtin):
        return Builtin(e.op, r(e.arg))
    return e


def _resolve_decl(d):
    empty = frozenset()
    if isinstance(d, StructDecl):
        tps, inner = _resolve_typarams(d.typarams, empty)
        return StructDecl(d.name, tps, tuple(Param(f.name, _resolve_type(f.type, inner)) for f in d.fields))
    if isinstance(d, IfaceDecl):
        tps, inner = _resolve_typarams(d.typarams, empty)
        return IfaceDecl(d.name, tps, tuple(_resolve_sig(s, inner) for s in d.specs))
    tps, inner = _resolve_typarams(d.recv_typarams, empty)
    sig = _resolve_sig(d.sig, inner)
    body_scope = inner | {tp.var for tp in sig.typarams}
    return MethodDecl(d.recv, d.struct, tps, sig, _resolve_expr(d.body, body_scope))


def parse_program(text: str, base_types: bool = True) -> SourceProgram:
    decls, main = _Parser(text).program()
    return SourceProgram(tuple(_resolve_decl(d) for d in decls), _resolve_expr(main, frozenset()), base_types)


def parse_type(text: str, scope=()) -> TypeExpr:
    p = _Parser(text)
    t = p.type_()
    if p.tok.kind != "EOF":
        p.error("trailing input after type")
    return _resolve_type(t, frozenset(scope))


def parse_expr(text: str, scope=()) -> Expr:
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p.error("trailing input after expression")
    return _resolve_expr(e, frozenset(scope))


# ---------------------------------------------------------------------------
# Printing


def _typarams(tps) -> str:
    if not tps:
        return ""
    return "[" + ", ".join(f"{tp.var} {show_type(tp.bound)}" for tp in tps) + "]"


def _sig(s: MethodSig) -> str:
    ps = ", ".join(f"{q.name} {show_type(q.type)}" for q in s.params)
    return f"{s.name}{_typarams(s.typarams)}({ps}) {show_type(s.ret)}"


_PREC = {BinOpKind.EQ: 1, BinOpKind.PLUS: 2}


def show_expr(e: Expr) -> str:
    return _show(e, 0)


def _show(e: Expr, ctx: int) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, StrLit):
        return json.dumps(e.value, ensure_ascii=False)
    if isinstance(e, StructLit):
        return f"{show_type(e.type)}{{{', '.join(_show(a, 0) for a in e.args)}}}"
    if isinstance(e, FieldAccess):
        return f"{_show(e.recv, 3)}.{e.field}"
    if isinstance(e, MethodCall):
        targs = f"[{', '.join(show_type(t) for t in e.tyargs)}]" if e.tyargs else ""
        return f"{_show(e.recv, 3)}.{e.name}{targs}({', '.join(_show(a, 0) for a in e.args)})"
    if isinstance(e, Builtin):
        return f"{e.op.value}({_show(e.arg, 0)})"
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        # == does not chain and + associates to the left
        s = f"{_show(e.lhs, p + (1 if e.op is BinOpKind.EQ else 0))} {e.op.value} {_show(e.rhs, p + 1)}"
        return f"({s})" if p < ctx else s
    raise TypeError(f"not an expression: {e!r}")


def show_decl(d) -> str:
    if isinstance(d, StructDecl):
        if not d.fields:
            return f"type {d.name}{_typarams(d.typarams)} struct {{}}"
        body = "".join(f"\n    {f.name} {show_type(f.type)}" for f in d.fields)
        return f"type {d.name}{_typarams(d.typarams)} struct {{{body}\n}}"
    if isinstance(d, IfaceDecl):
        if not d.specs:
            return f"type {d.name}{_typarams(d.typarams)} interface {{}}"
        body = "".join(f"\n    {_sig(s)}" for s in d.specs)
        return f"type {d.name}{_typarams(d.typarams)} interface {{{body}\n}}"
    return (f"func ({d.recv} {d.struct}{_typarams(d.recv_typarams)}) {_sig(d.sig)} {{\n"
            f"    return {show_expr(d.body)}\n}}")


def print_program(p: SourceProgram) -> str:
    parts = [show_decl(d) for d in p.decls]
    parts.append(f"func main() {{\n    _ = {show_expr(p.main)}\n}}")
    return "\n".join(parts) + "\n"


def show_value(e: Expr) -> str:
    """Values in the notation used by corpus ``expect:`` headers."""
    return show_expr(e)
