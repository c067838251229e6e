"""Abstract syntax of FGG⁻ plus substitutions and the determinism restrictions.

Types, expressions and declarations are frozen dataclasses; every operation in
this module is a pure function over them.  Method signatures are the only
binders for type variables inside a declaration body, so they are the only
place where substitution has to care about shadowing and capture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class Named:
    """``t[τ…]``; the declaration decides whether ``t`` is a struct or an interface."""

    name: str
    args: tuple[TypeExpr, ...] = ()


class BaseKind(str, Enum):
    INT = "int"
    BOOL = "bool"
    STRING = "string"


@dataclass(frozen=True)
class Base:
    kind: BaseKind


TypeExpr = Union[TyVar, Named, Base]

INT = Base(BaseKind.INT)
BOOL = Base(BaseKind.BOOL)
STRING = Base(BaseKind.STRING)


@dataclass(frozen=True)
class TyParam:
    """A bounded type parameter ``α τ_I``."""

    var: str
    bound: TypeExpr


@dataclass(frozen=True)
class Param:
    name: str
    type: TypeExpr


@dataclass(frozen=True)
class MethodSig:
    name: str
    typarams: tuple[TyParam, ...]
    params: tuple[Param, ...]
    ret: TypeExpr


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class StructLit:
    type: Named
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class FieldAccess:
    recv: Expr
    field: str


@dataclass(frozen=True)
class MethodCall:
    recv: Expr
    name: str
    tyargs: tuple[TypeExpr, ...]
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class StrLit:
    value: str


class BinOpKind(str, Enum):
    EQ = "=="
    # integer addition or string concatenation, chosen by the operand types
    PLUS = "+"


@dataclass(frozen=True)
class BinOp:
    op: BinOpKind
    lhs: Expr
    rhs: Expr


class BuiltinKind(str, Enum):
    INT_TO_STRING = "intToString"


@dataclass(frozen=True)
class Builtin:
    op: BuiltinKind
    arg: Expr


Expr = Union[Var, StructLit, FieldAccess, MethodCall, IntLit, BoolLit, StrLit, BinOp, Builtin]

BASE_LITERALS = (IntLit, BoolLit, StrLit)


# ---------------------------------------------------------------------------
# Declarations and programs


@dataclass(frozen=True)
class StructDecl:
    name: str
    typarams: tuple[TyParam, ...]
    fields: tuple[Param, ...]


@dataclass(frozen=True)
class IfaceDecl:
    name: str
    typarams: tuple[TyParam, ...]
    specs: tuple[MethodSig, ...]


@dataclass(frozen=True)
class MethodDecl:
    recv: str
    struct: str
    recv_typarams: tuple[TyParam, ...]
    sig: MethodSig
    body: Expr


Decl = Union[StructDecl, IfaceDecl, MethodDecl]


@dataclass(frozen=True)
class SourceProgram:
    decls: tuple[Decl, ...]
    main: Expr
    base_types: bool = True
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def _lookup(self) -> dict:
        # First declaration wins; duplicates are reported by validate_restrictions.
        if self._index is None:
            structs: dict[str, StructDecl] = {}
            ifaces: dict[str, IfaceDecl] = {}
            methods: dict[tuple[str, str], MethodDecl] = {}
            for d in self.decls:
                if isinstance(d, StructDecl):
                    structs.setdefault(d.name, d)
                elif isinstance(d, IfaceDecl):
                    ifaces.setdefault(d.name, d)
                else:
                    methods.setdefault((d.struct, d.sig.name), d)
            object.__setattr__(self, "_index", {"s": structs, "i": ifaces, "m": methods})
        return self._index

    def struct(self, name: str) -> StructDecl | None:
        return self._lookup()["s"].get(name)

    def iface(self, name: str) -> IfaceDecl | None:
        return self._lookup()["i"].get(name)

    def method(self, struct: str, name: str) -> MethodDecl | None:
        return self._lookup()["m"].get((struct, name))

    def methods_of(self, struct: str) -> list[MethodDecl]:
        return [d for d in self.decls if isinstance(d, MethodDecl) and d.struct == struct]

    def method_decls(self) -> list[MethodDecl]:
        return [d for d in self.decls if isinstance(d, MethodDecl)]

    def is_struct_type(self, t: TypeExpr) -> bool:
        return isinstance(t, Named) and self.struct(t.name) is not None

    def is_iface_type(self, t: TypeExpr) -> bool:
        return isinstance(t, Named) and self.iface(t.name) is not None


# ---------------------------------------------------------------------------
# Substitution


class ArityMismatch(Exception):
    def __init__(self, expected: int, got: int, what: str = "type arguments"):
        super().__init__(f"expected {expected} {what}, got {got}")
        self.expected = expected
        self.got = got


TypeSubst = Mapping[str, TypeExpr]


def make_type_subst(formals: Sequence[TyParam], actuals: Sequence[TypeExpr]) -> dict[str, TypeExpr]:
    """Pair formals with actuals positionally; bounds are not checked."""
    if len(formals) != len(actuals):
        raise ArityMismatch(len(formals), len(actuals))
    return {p.var: a for p, a in zip(formals, actuals)}


def compose(s2: TypeSubst, s1: TypeSubst) -> dict[str, TypeExpr]:
    """The substitution that behaves like applying ``s1`` and then ``s2``."""
    out = {a: apply_type_subst(s2, t) for a, t in s1.items()}
    for a, t in s2.items():
        out.setdefault(a, t)
    return out


def free_type_vars(t) -> set[str]:
    if isinstance(t, TyVar):
        return {t.name}
    if isinstance(t, Named):
        out: set[str] = set()
        for a in t.args:
            out |= free_type_vars(a)
        return out
    if isinstance(t, Base):
        return set()
    if isinstance(t, MethodSig):
        out = set()
        for p in t.typarams:
            out |= free_type_vars(p.bound)
        for p in t.params:
            out |= free_type_vars(p.type)
        out |= free_type_vars(t.ret)
        return out - {p.var for p in t.typarams}
    raise TypeError(f"not a type or signature: {t!r}")


def _fresh_tyvar(base: str, avoid: set[str]) -> str:
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def apply_type_subst(subst: TypeSubst, target):
    """Capture-avoiding application of a type substitution.

    ``target`` may be a type, a method signature, a tuple of type parameters
    (treated as non-binding), or an expression.
    """
    if not subst:
        return target
    if isinstance(target, TyVar):
        return subst.get(target.name, target)
    if isinstance(target, Named):
        if not target.args:
            return target
        return Named(target.name, tuple(apply_type_subst(subst, a) for a in target.args))
    if isinstance(target, Base):
        return target
    if isinstance(target, MethodSig):
        return _subst_sig(subst, target)
    if isinstance(target, TyParam):
        return TyParam(target.var, apply_type_subst(subst, target.bound))
    if isinstance(target, Param):
        return Param(target.name, apply_type_subst(subst, target.type))
    return _subst_expr(subst, target)


def _subst_sig(subst: TypeSubst, sig: MethodSig) -> MethodSig:
    binders = [p.var for p in sig.typarams]
    inner = {a: t for a, t in subst.items() if a not in binders}
    if not inner:
        return sig
    range_ftv: set[str] = set()
    for a in free_type_vars(sig):
        if a in inner:
            range_ftv |= free_type_vars(inner[a])
    renaming: dict[str, TypeExpr] = {}
    avoid = range_ftv | set(binders) | set(inner) | free_type_vars(sig)
    for b in binders:
        if b in range_ftv:
            nb = _fresh_tyvar(b, avoid)
            avoid.add(nb)
            renaming[b] = TyVar(nb)
    if renaming:
        sig = MethodSig(
            sig.name,
            tuple(TyParam(renaming[p.var].name if p.var in renaming else p.var,
                          apply_type_subst(renaming, p.bound)) for p in sig.typarams),
            tuple(apply_type_subst(renaming, p) for p in sig.params),
            apply_type_subst(renaming, sig.ret),
        )
    return MethodSig(
        sig.name,
        tuple(apply_type_subst(inner, p) for p in sig.typarams),
        tuple(apply_type_subst(inner, p) for p in sig.params),
        apply_type_subst(inner, sig.ret),
    )


def _subst_expr(subst: TypeSubst, e: Expr) -> Expr:
    if isinstance(e, (Var, IntLit, BoolLit, StrLit)):
        return e
    if isinstance(e, StructLit):
        return StructLit(apply_type_subst(subst, e.type), tuple(_subst_expr(subst, a) for a in e.args))
    if isinstance(e, FieldAccess):
        return FieldAccess(_subst_expr(subst, e.recv), e.field)
    if isinstance(e, MethodCall):
        return MethodCall(
            _subst_expr(subst, e.recv),
            e.name,
            tuple(apply_type_subst(subst, t) for t in e.tyargs),
            tuple(_subst_expr(subst, a) for a in e.args),
        )
    if isinstance(e, BinOp):
        return BinOp(e.op, _subst_expr(subst, e.lhs), _subst_expr(subst, e.rhs))
    if isinstance(e, Builtin):
        return Builtin(e.op, _subst_expr(subst, e.arg))
    raise TypeError(f"not an expression: {e!r}")


def subst_values(subst: Mapping[str, Expr], e: Expr) -> Expr:
    """Replace free variables by values.  Expressions bind no variables."""
    if isinstance(e, Var):
        return subst.get(e.name, e)
    if isinstance(e, (IntLit, BoolLit, StrLit)):
        return e
    if isinstance(e, StructLit):
        return StructLit(e.type, tuple(subst_values(subst, a) for a in e.args))
    if isinstance(e, FieldAccess):
        return FieldAccess(subst_values(subst, e.recv), e.field)
    if isinstance(e, MethodCall):
        return MethodCall(subst_values(subst, e.recv), e.name, e.tyargs,
                          tuple(subst_values(subst, a) for a in e.args))
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_values(subst, e.lhs), subst_values(subst, e.rhs))
    if isinstance(e, Builtin):
        return Builtin(e.op, subst_values(subst, e.arg))
    raise TypeError(f"not an expression: {e!r}")


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    out: set[str] = set()
    for sub in children(e):
        out |= free_vars(sub)
    return out


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, StructLit):
        return e.args
    if isinstance(e, FieldAccess):
        return (e.recv,)
    if isinstance(e, MethodCall):
        return (e.recv,) + e.args
    if isinstance(e, BinOp):
        return (e.lhs, e.rhs)
    if isinstance(e, Builtin):
        return (e.arg,)
    return ()


def uses_base_forms(p: SourceProgram) -> bool:
    """True if any base type or base expression occurs anywhere in ``p``."""

    def in_type(t: TypeExpr) -> bool:
        if isinstance(t, Base):
            return True
        if isinstance(t, Named):
            return any(in_type(a) for a in t.args)
        return False

    def in_sig(s: MethodSig) -> bool:
        return (any(in_type(tp.bound) for tp in s.typarams)
                or any(in_type(q.type) for q in s.params) or in_type(s.ret))

    def in_expr(e: Expr) -> bool:
        if isinstance(e, (IntLit, BoolLit, StrLit, BinOp, Builtin)):
            return True
        if isinstance(e, StructLit) and in_type(e.type):
            return True
        if isinstance(e, MethodCall) and any(in_type(t) for t in e.tyargs):
            return True
        return any(in_expr(c) for c in children(e))

    for d in p.decls:
        if isinstance(d, StructDecl):
            if any(in_type(tp.bound) for tp in d.typarams) or any(in_type(f.type) for f in d.fields):
                return True
        elif isinstance(d, IfaceDecl):
            if any(in_type(tp.bound) for tp in d.typarams) or any(in_sig(s) for s in d.specs):
                return True
        else:
            if any(in_type(tp.bound) for tp in d.recv_typarams) or in_sig(d.sig) or in_expr(d.body):
                return True
    return in_expr(p.main)


# ---------------------------------------------------------------------------
# Restrictions that make the dynamic semantics deterministic


@dataclass(frozen=True)
class Violation:
    code: str
    subject: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.code}({', '.join(self.subject)})"


def validate_restrictions(p: SourceProgram) -> list[Violation]:
    out: list[Violation] = []
    seen_types: dict[str, str] = {}
    seen_methods: set[tuple[str, str]] = set()
    for d in p.decls:
        if isinstance(d, (StructDecl, IfaceDecl)):
            kind = "struct" if isinstance(d, StructDecl) else "interface"
            prev = seen_types.get(d.name)
            if prev is None:
                seen_types[d.name] = kind
            elif prev != kind:
                out.append(Violation("TypeNameClash", (d.name,)))
            else:
                out.append(Violation("DuplicateStruct" if kind == "struct" else "DuplicateInterface", (d.name,)))
            if isinstance(d, StructDecl):
                for name in _duplicates(f.name for f in d.fields):
                    out.append(Violation("DuplicateField", (d.name, name)))
            else:
                for name in _duplicates(s.name for s in d.specs):
                    out.append(Violation("DuplicateMethodSpec", (d.name, name)))
        else:
            key = (d.struct, d.sig.name)
            if key in seen_methods:
                out.append(Violation("DuplicateReceiver", key))
            seen_methods.add(key)
    return out


def _duplicates(names: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dups: list[str] = []
    for n in names:
        if n in seen and n not in dups:
            dups.append(n)
        seen.add(n)
    return dups


def show_type(t: TypeExpr) -> str:
    if isinstance(t, TyVar):
        return t.name
    if isinstance(t, Base):
        return t.kind.value
    if not t.args:
        return t.name
    return f"{t.name}[{', '.join(show_type(a) for a in t.args)}]"
