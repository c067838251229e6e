"""Type checking and dictionary-passing translation of FGG⁻ into TL.

Checking and translation are one judgment: every successful typing step also
yields the TL term.  Subsumption is inlined at argument, field, return and
main positions, so :class:`Strategy` with no seed gives a deterministic
translation.  A seeded strategy routes each struct-to-interface coercion site
through an intermediate interface when one exists.

The :class:`Translator` keeps a few small hooks (``dict_index``,
``bounds_tuple`` and friends) so that deliberately broken variants can be
built by subclassing; see :mod:`fggtrans.mutants`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping

from . import tl
from .syntax import (
    Base,
    BinOp,
    BinOpKind,
    BOOL,
    BoolLit,
    Builtin,
    BuiltinKind,
    Expr,
    FieldAccess,
    IfaceDecl,
    INT,
    IntLit,
    MethodCall,
    MethodDecl,
    MethodSig,
    Named,
    Param,
    SourceProgram,
    STRING,
    StrLit,
    StructDecl,
    StructLit,
    TyParam,
    TypeExpr,
    TyVar,
    Var,
    apply_type_subst,
    make_type_subst,
    show_type,
    uses_base_forms,
    validate_restrictions,
)

TypeEnv = Mapping[str, TypeExpr]
ValueEnv = Mapping[str, TypeExpr]

SUBTYPE_DEPTH_LIMIT = 64


class CheckError(Exception):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}" if self.message else self.code


class TranslationFailed(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class IdentityNoCoercion:
    """``sub = sup`` at a struct, type-variable or base type: nothing to insert."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "IDENTITY"


IDENTITY = IdentityNoCoercion()


@dataclass(frozen=True)
class Strategy:
    """``seed=None`` is the direct path; ``main_type=None`` keeps the synthesized type."""

    seed: int | None = None
    main_type: TypeExpr | None = None

    @property
    def randomized(self) -> bool:
        return self.seed is not None

    def label(self) -> str:
        path = "direct" if self.seed is None else f"random:{self.seed}"
        if self.main_type is None:
            return path
        return f"{path}@{show_type(self.main_type)}"


DIRECT = Strategy()


@dataclass(frozen=True)
class BoundsCheck:
    subst: dict
    coercions: tuple  # sugared TL values, one per formal


class NameMap:
    """Disjoint, injective name ranges: ``v.x``, ``a.α``, ``M.m.t`` and fresh ``%n``.

    Source identifiers never contain ``.`` or ``%``, which keeps the ranges apart.
    """

    def __init__(self):
        self.fresh = tl.FreshNames()

    @staticmethod
    def var(x: str) -> str:
        return f"v.{x}"

    @staticmethod
    def tyvar(a: str) -> str:
        return f"a.{a}"

    @staticmethod
    def method(m: str, struct: str) -> str:
        return f"M.{m}.{struct}"


def sig_key(sig: MethodSig) -> tuple:
    """Signature modulo parameter names and positional renaming of its type binders."""
    ren = {p.var: TyVar(f"#{i}") for i, p in enumerate(sig.typarams)}
    return (
        sig.name,
        tuple(apply_type_subst(ren, p.bound) for p in sig.typarams),
        tuple(apply_type_subst(ren, q.type) for q in sig.params),
        apply_type_subst(ren, sig.ret),
    )


def _iter_types(t: TypeExpr) -> Iterator[TypeExpr]:
    yield t
    if isinstance(t, Named):
        for a in t.args:
            yield from _iter_types(a)


def _program_types(p: SourceProgram) -> Iterator[TypeExpr]:
    def of_expr(e: Expr):
        if isinstance(e, StructLit):
            yield from _iter_types(e.type)
            for a in e.args:
                yield from of_expr(a)
        elif isinstance(e, FieldAccess):
            yield from of_expr(e.recv)
        elif isinstance(e, MethodCall):
            yield from of_expr(e.recv)
            for t in e.tyargs:
                yield from _iter_types(t)
            for a in e.args:
                yield from of_expr(a)
        elif isinstance(e, BinOp):
            yield from of_expr(e.lhs)
            yield from of_expr(e.rhs)
        elif isinstance(e, Builtin):
            yield from of_expr(e.arg)

    def of_sig(s: MethodSig):
        for tp in s.typarams:
            yield from _iter_types(tp.bound)
        for q in s.params:
            yield from _iter_types(q.type)
        yield from _iter_types(s.ret)

    for d in p.decls:
        if isinstance(d, IfaceDecl) and not d.typarams:
            yield Named(d.name)
    for d in p.decls:
        if isinstance(d, StructDecl):
            for tp in d.typarams:
                yield from _iter_types(tp.bound)
            for f in d.fields:
                yield from _iter_types(f.type)
        elif isinstance(d, IfaceDecl):
            for tp in d.typarams:
                yield from _iter_types(tp.bound)
            for s in d.specs:
                yield from of_sig(s)
        else:
            for tp in d.recv_typarams:
                yield from _iter_types(tp.bound)
            yield from of_sig(d.sig)
            yield from of_expr(d.body)
    yield from of_expr(p.main)


class Translator:
    def __init__(self, program: SourceProgram, strategy: Strategy = DIRECT,
                 max_tuple: int = tl.MAX_TUPLE):
        self.p = program
        self.strategy = strategy
        self.names = NameMap()
        self.max_tuple = max_tuple
        self._depth = 0
        self._site = 0
        self._iface_types: list[Named] | None = None

    # -- hooks (overridden by mutants) -------------------------------------

    def dict_index(self, j: int, q: int) -> int:
        return j

    def bounds_tuple(self, coercions: tuple) -> tuple:
        return coercions

    def permutation(self, pi: list[int], n: int) -> list[int]:
        return pi

    def quadruple(self, recv_coercions, recv, meth_coercions, args):
        return tl.tup(recv_coercions, recv, meth_coercions, args)

    def struct_iface_value(self, x: str, entries: list):
        return tl.PatLam(tl.PVar(x), tl.tup(tl.Var(x), tl.Tuple(tuple(entries))))

    # -- helpers -----------------------------------------------------------

    def fresh(self) -> str:
        return self.names.fresh()

    def _named_decl(self, name: str):
        return self.p.struct(name) or self.p.iface(name)

    def is_iface(self, t: TypeExpr) -> bool:
        return self.p.is_iface_type(t)

    def is_struct(self, t: TypeExpr) -> bool:
        return self.p.is_struct_type(t)

    # -- well-formedness ---------------------------------------------------

    def wf_type(self, env: TypeEnv, t: TypeExpr) -> None:
        if isinstance(t, TyVar):
            if t.name not in env:
                raise CheckError("UnboundTypeVar", t.name)
            return
        if isinstance(t, Base):
            if not self.p.base_types:
                raise CheckError("BaseTypesDisabled", show_type(t))
            return
        d = self._named_decl(t.name)
        if d is None:
            raise CheckError("UnknownTypeName", t.name)
        for a in t.args:
            self.wf_type(env, a)
        self.instantiate_checked(env, d.typarams, t.args)

    def wf_typarams(self, env: TypeEnv, formals: tuple[TyParam, ...]) -> dict:
        seen: set[str] = set()
        for tp in formals:
            if tp.var in seen:
                raise CheckError("DuplicateTyVar", tp.var)
            if tp.var in env:
                raise CheckError("ShadowedTyVar", tp.var)
            seen.add(tp.var)
        ext = dict(env)
        ext.update({tp.var: tp.bound for tp in formals})
        for tp in formals:
            if not (isinstance(tp.bound, Named) and self.is_iface(tp.bound)):
                if isinstance(tp.bound, Named) and self._named_decl(tp.bound.name) is None:
                    raise CheckError("UnknownTypeName", tp.bound.name)
                raise CheckError("NotAnInterface", f"bound {show_type(tp.bound)} of {tp.var}")
            self.wf_type(ext, tp.bound)
        return ext

    def wf_msig(self, env: TypeEnv, sig: MethodSig) -> dict:
        ext = self.wf_typarams(env, sig.typarams)
        names = [q.name for q in sig.params]
        if len(set(names)) != len(names):
            raise CheckError("DuplicateParam", f"{sig.name}")
        for q in sig.params:
            self.wf_type(ext, q.type)
        self.wf_type(ext, sig.ret)
        return ext

    def wf_decl(self, d) -> None:
        if isinstance(d, StructDecl):
            env = self.wf_typarams({}, d.typarams)
            names = [f.name for f in d.fields]
            if len(set(names)) != len(names):
                raise CheckError("DuplicateField", d.name)
            for f in d.fields:
                self.wf_type(env, f.type)
        elif isinstance(d, IfaceDecl):
            env = self.wf_typarams({}, d.typarams)
            for s in d.specs:
                self.wf_msig(env, s)
            names = [s.name for s in d.specs]
            if len(set(names)) != len(names):
                raise CheckError("DuplicateMethodSpec", d.name)
        elif isinstance(d, MethodDecl):
            sd = self.p.struct(d.struct)
            if sd is None:
                raise CheckError("UnknownStruct", d.struct)
            if len(sd.typarams) != len(d.recv_typarams):
                raise CheckError("ReceiverArity", f"{d.struct}.{d.sig.name}")
            env = self.wf_typarams({}, d.recv_typarams)
            self.wf_msig(env, d.sig)
            ren = {a.var: TyVar(b.var) for a, b in zip(sd.typarams, d.recv_typarams)}
            for decl_tp, recv_tp in zip(sd.typarams, d.recv_typarams):
                weaker = {sig_key(s) for s in self.method_specs(apply_type_subst(ren, decl_tp.bound))}
                stronger = {sig_key(s) for s in self.method_specs(recv_tp.bound)}
                if not weaker <= stronger:
                    raise CheckError(
                        "ReceiverBoundsNotCovariant",
                        f"{d.struct}.{d.sig.name}: bound {show_type(recv_tp.bound)} of {recv_tp.var} "
                        f"lacks methods of {show_type(decl_tp.bound)}")
        else:
            raise TypeError(d)

    # -- auxiliary judgments -----------------------------------------------

    def method_specs(self, t: TypeExpr) -> list[MethodSig]:
        if not isinstance(t, Named):
            raise CheckError("NotAnInterface", show_type(t))
        d = self.p.iface(t.name)
        if d is None:
            raise CheckError("UnknownInterface", t.name)
        if len(d.typarams) != len(t.args):
            raise CheckError("ArityMismatch", f"{t.name} expects {len(d.typarams)} type arguments")
        eta = make_type_subst(d.typarams, t.args)
        return [apply_type_subst(eta, s) for s in d.specs]

    def instantiate_checked(self, env: TypeEnv, formals, actuals) -> BoundsCheck:
        if len(formals) != len(actuals):
            raise CheckError("ArityMismatch", f"expected {len(formals)} type arguments, got {len(actuals)}")
        eta = make_type_subst(formals, actuals)
        out = []
        for tp, a in zip(formals, actuals):
            bound = apply_type_subst(eta, tp.bound)
            v = self.subtype_coerce(env, a, bound) if self.is_iface(bound) else None
            if v is None or v is IDENTITY:
                raise CheckError("BoundViolation", f"{show_type(a)} is not a subtype of {show_type(bound)}")
            out.append(v)
        return BoundsCheck(eta, self.bounds_tuple(tuple(out)))

    def method_lookup(self, env: TypeEnv, t: Named, m: str) -> tuple[MethodSig, tl.Tuple, MethodDecl]:
        """``methods_Δ(t)`` restricted to ``m``; raises when absent or bounds fail."""
        d = self.p.method(t.name, m)
        if d is None:
            raise CheckError("NoSuchMethod", f"{show_type(t)} has no method {m}")
        bc = self.instantiate_checked(env, d.recv_typarams, t.args)
        return apply_type_subst(bc.subst, d.sig), tl.Tuple(bc.coercions), d

    def methods_struct(self, env: TypeEnv, t: Named) -> list[tuple[MethodSig, tl.Tuple]]:
        out = []
        for d in self.p.methods_of(t.name):
            try:
                sig, v, _ = self.method_lookup(env, t, d.sig.name)
            except CheckError:
                continue
            out.append((sig, v))
        return out

    def subtype_coerce(self, env: TypeEnv, sub: TypeExpr, sup: TypeExpr):
        if self._depth >= SUBTYPE_DEPTH_LIMIT:
            raise CheckError("SubtypeDepthExceeded",
                             f"{show_type(sub)} <: {show_type(sup)} nests deeper than {SUBTYPE_DEPTH_LIMIT}")
        self._depth += 1
        try:
            return self._subtype_coerce(env, sub, sup)
        finally:
            self._depth -= 1

    def _subtype_coerce(self, env: TypeEnv, sub: TypeExpr, sup: TypeExpr):
        if sub == sup and not self.is_iface(sup):
            return IDENTITY
        if not self.is_iface(sup):
            return None
        if isinstance(sub, TyVar):
            bound = env.get(sub.name)
            if bound is None:
                return None
            v = self.subtype_coerce(env, bound, sup)
            if v is None or v is IDENTITY:
                return None
            y = self.fresh()
            return tl.PatLam(tl.PVar(y), tl.App(v, tl.App(tl.Var(self.names.tyvar(sub.name)), tl.Var(y))))
        if self.is_struct(sub):
            return self.coerce_struct_iface(env, sub, sup)
        if self.is_iface(sub):
            return self.coerce_iface_iface(sub, sup)
        return None

    def coerce_struct_iface(self, env: TypeEnv, sub: Named, sup: Named):
        entries = []
        for r in self.method_specs(sup):
            try:
                sig, v, _ = self.method_lookup(env, sub, r.name)
            except CheckError as err:
                if err.code == "SubtypeDepthExceeded":
                    raise
                return None
            if sig_key(sig) != sig_key(r):
                return None
            y1, y2, y3 = self.fresh(), self.fresh(), self.fresh()
            call = tl.App(tl.Var(self.names.method(r.name, sub.name)),
                          self.quadruple(v, tl.Var(y1), tl.Var(y2), tl.Var(y3)))
            entries.append(tl.PatLam(tl.pvars(y1, y2, y3), call))
        return self.struct_iface_value(self.fresh(), entries)

    def coerce_iface_iface(self, sub: Named, sup: Named):
        have = self.method_specs(sub)
        want = self.method_specs(sup)
        pi = []
        for r in want:
            for j, s in enumerate(have):
                if s.name == r.name and sig_key(s) == sig_key(r):
                    pi.append(j)
                    break
            else:
                return None
        pi = self.permutation(pi, len(have))
        y = self.fresh()
        xs = [self.fresh() for _ in have]
        pat = tl.PTuple(tl.PVar(y), tl.PTuple(*(tl.PVar(x) for x in xs)))
        return tl.PatLam(pat, tl.tup(tl.Var(y), tl.Tuple(tuple(tl.Var(xs[j]) for j in pi))))

    # -- expressions ---------------------------------------------------------

    def translate_expr(self, env: TypeEnv, venv: ValueEnv, e: Expr,
                       expected: TypeExpr | None = None) -> tuple[TypeExpr, object]:
        t, out = self._synth(env, venv, e)
        if expected is None or t == expected:
            return (t if expected is None else expected), out
        return expected, self.coerce_expr(env, t, expected, out)

    def coerce_expr(self, env: TypeEnv, sub: TypeExpr, sup: TypeExpr, out):
        v = self.subtype_coerce(env, sub, sup)
        if v is None:
            raise CheckError("NoSubtype", f"{show_type(sub)} is not a subtype of {show_type(sup)}")
        if v is IDENTITY:
            return out
        if self.strategy.randomized and self.is_struct(sub):
            site = self._site
            self._site += 1
            mids = self.intermediates(env, sub, sup)
            if mids:
                rng = random.Random(f"{self.strategy.seed}:{site}")
                u = mids[rng.randrange(len(mids))]
                v1 = self.subtype_coerce(env, sub, u)
                v2 = self.subtype_coerce(env, u, sup)
                return tl.App(v2, tl.App(v1, out))
        return tl.App(v, out)

    def intermediates(self, env: TypeEnv, sub: TypeExpr, sup: TypeExpr) -> list[Named]:
        if self._iface_types is None:
            seen: list[Named] = []
            for t in _program_types(self.p):
                if isinstance(t, Named) and self.is_iface(t) and t not in seen:
                    seen.append(t)
            self._iface_types = seen
        out = []
        for u in self._iface_types:
            if u == sup:
                continue
            try:
                self.wf_type(env, u)
                ok = (self.subtype_coerce(env, sub, u) not in (None, IDENTITY)
                      and self.subtype_coerce(env, u, sup) not in (None, IDENTITY))
            except CheckError:
                continue
            if ok:
                out.append(u)
        return out

    def _synth(self, env: TypeEnv, venv: ValueEnv, e: Expr) -> tuple[TypeExpr, object]:
        if isinstance(e, Var):
            if e.name not in venv:
                raise CheckError("UnboundVariable", e.name)
            return venv[e.name], tl.Var(self.names.var(e.name))
        if isinstance(e, StructLit):
            self.wf_type(env, e.type)
            d = self.p.struct(e.type.name)
            if d is None:
                raise CheckError("NotAStruct", show_type(e.type))
            if len(d.fields) != len(e.args):
                raise CheckError("ArgCountMismatch",
                                 f"{d.name} has {len(d.fields)} fields, got {len(e.args)} values")
            eta = make_type_subst(d.typarams, e.type.args)
            items = [self.translate_expr(env, venv, a, apply_type_subst(eta, f.type))[1]
                     for f, a in zip(d.fields, e.args)]
            return e.type, tl.Tuple(tuple(items))
        if isinstance(e, FieldAccess):
            t, out = self._synth(env, venv, e.recv)
            d = self.p.struct(t.name) if isinstance(t, Named) else None
            if d is None:
                raise CheckError("NotAStruct", f"field access .{e.field} on {show_type(t)}")
            for i, f in enumerate(d.fields):
                if f.name == e.field:
                    break
            else:
                raise CheckError("UnknownField", f"{d.name} has no field {e.field}")
            eta = make_type_subst(d.typarams, t.args)
            xs = [self.fresh() for _ in d.fields]
            proj = tl.PCase(out, ((tl.pvars(*xs), tl.Var(xs[i])),))
            return apply_type_subst(eta, f.type), proj
        if isinstance(e, MethodCall):
            return self._call(env, venv, e)
        if isinstance(e, (IntLit, BoolLit, StrLit)):
            if not self.p.base_types:
                raise CheckError("BaseTypesDisabled", "literal")
            t = {IntLit: INT, BoolLit: BOOL, StrLit: STRING}[type(e)]
            return t, tl.Lit(e.value)
        if isinstance(e, BinOp):
            if not self.p.base_types:
                raise CheckError("BaseTypesDisabled", e.op.value)
            lt, lo = self._synth(env, venv, e.lhs)
            rt, ro = self._synth(env, venv, e.rhs)
            if e.op is BinOpKind.EQ and lt == rt and isinstance(lt, Base):
                return BOOL, tl.Prim("eq", (lo, ro))
            if e.op is BinOpKind.PLUS and lt == rt == INT:
                return INT, tl.Prim("add", (lo, ro))
            if e.op is BinOpKind.PLUS and lt == rt == STRING:
                return STRING, tl.Prim("concat", (lo, ro))
            raise CheckError("OperandType", f"{show_type(lt)} {e.op.value} {show_type(rt)}")
        if isinstance(e, Builtin):
            if not self.p.base_types:
                raise CheckError("BaseTypesDisabled", e.op.value)
            at, ao = self._synth(env, venv, e.arg)
            if e.op is BuiltinKind.INT_TO_STRING and at == INT:
                return STRING, tl.Prim("itos", (ao,))
            raise CheckError("OperandType", f"{e.op.value}({show_type(at)})")
        raise TypeError(f"not an expression: {e!r}")

    def _args(self, env, venv, sig: MethodSig, e: MethodCall):
        for t in e.tyargs:
            self.wf_type(env, t)
        bc = self.instantiate_checked(env, sig.typarams, e.tyargs)
        if len(sig.params) != len(e.args):
            raise CheckError("ArgCountMismatch",
                             f"{sig.name} takes {len(sig.params)} arguments, got {len(e.args)}")
        outs = [self.translate_expr(env, venv, a, apply_type_subst(bc.subst, q.type))[1]
                for q, a in zip(sig.params, e.args)]
        return bc, tl.Tuple(tuple(outs))

    def _call(self, env: TypeEnv, venv: ValueEnv, e: MethodCall):
        t, recv = self._synth(env, venv, e.recv)
        if isinstance(t, TyVar):
            bound = env.get(t.name)
            if bound is None:
                raise CheckError("UnboundTypeVar", t.name)
            recv = self.coerce_expr(env, t, bound, recv)
            t = bound
        if isinstance(t, Named) and self.is_struct(t):
            sig, v, _ = self.method_lookup(env, t, e.name)
            bc, args = self._args(env, venv, sig, e)
            fn = tl.Var(self.names.method(e.name, t.name))
            out = tl.App(fn, self.quadruple(v, recv, tl.Tuple(bc.coercions), args))
            return apply_type_subst(bc.subst, sig.ret), out
        if isinstance(t, Named) and self.is_iface(t):
            specs = self.method_specs(t)
            for j, r in enumerate(specs):
                if r.name == e.name:
                    break
            else:
                raise CheckError("NoSuchMethod", f"{show_type(t)} has no method {e.name}")
            bc, args = self._args(env, venv, r, e)
            y = self.fresh()
            xs = [self.fresh() for _ in specs]
            pick = xs[self.dict_index(j, len(specs))]
            body = tl.App(tl.Var(pick), tl.tup(tl.Var(y), tl.Tuple(bc.coercions), args))
            pat = tl.PTuple(tl.PVar(y), tl.pvars(*xs))
            return apply_type_subst(bc.subst, r.ret), tl.PCase(recv, ((pat, body),))
        raise CheckError("NoSuchMethod", f"{show_type(t)} has no method {e.name}")

    # -- methods and programs --------------------------------------------------

    def translate_method(self, d: MethodDecl) -> tuple[str, tl.TLExpr]:
        env = {tp.var: tp.bound for tp in d.recv_typarams}
        env.update({tp.var: tp.bound for tp in d.sig.typarams})
        if d.recv in {q.name for q in d.sig.params}:
            raise CheckError("DuplicateParam", f"receiver {d.recv} of {d.struct}.{d.sig.name}")
        venv = {d.recv: Named(d.struct, tuple(TyVar(tp.var) for tp in d.recv_typarams))}
        venv.update({q.name: q.type for q in d.sig.params})
        _, body = self.translate_expr(env, venv, d.body, d.sig.ret)
        n = self.names
        pat = tl.PTuple(
            tl.PTuple(*(tl.PVar(n.tyvar(tp.var)) for tp in d.recv_typarams)),
            tl.PVar(n.var(d.recv)),
            tl.PTuple(*(tl.PVar(n.tyvar(tp.var)) for tp in d.sig.typarams)),
            tl.PTuple(*(tl.PVar(n.var(q.name)) for q in d.sig.params)),
        )
        return n.method(d.sig.name, d.struct), self.desugar(tl.PatLam(pat, body))

    def desugar(self, e) -> tl.TLExpr:
        try:
            return tl.desugar(e, self.max_tuple, self.names.fresh)
        except tl.TupleArityExceeded as err:
            raise CheckError("TupleArityExceeded", str(err)) from None

    def translate_main(self) -> tuple[TypeExpr, tl.TLExpr]:
        want = self.strategy.main_type
        if want is not None:
            self.wf_type({}, want)
        t, out = self.translate_expr({}, {}, self.p.main, want)
        return t, self.desugar(out)

    def translate_program(self) -> tuple[tl.TLProgram, TypeExpr]:
        diags: list[Diagnostic] = []
        for v in validate_restrictions(self.p):
            diags.append(Diagnostic(v.code, ", ".join(v.subject)))
        if diags:
            raise TranslationFailed(diags)
        if not self.p.base_types and uses_base_forms(self.p):
            raise TranslationFailed([Diagnostic("BaseTypesDisabled", "base forms used in pure mode")])
        for d in self.p.decls:
            try:
                self.wf_decl(d)
            except CheckError as err:
                diags.append(Diagnostic(err.code, err.message))
        bindings = []
        for d in self.p.method_decls():
            try:
                bindings.append(self.translate_method(d))
            except CheckError as err:
                diags.append(Diagnostic(err.code, err.message))
        main_type = None
        try:
            main_type, main = self.translate_main()
        except CheckError as err:
            diags.append(Diagnostic(err.code, err.message))
        if diags:
            raise TranslationFailed(diags)
        return tl.TLProgram(tuple(bindings), main), main_type


def translate_program(p: SourceProgram, strategy: Strategy = DIRECT,
                      translator: type[Translator] = Translator) -> tl.TLProgram:
    return translator(p, strategy).translate_program()[0]


def translate_typed(p: SourceProgram, strategy: Strategy = DIRECT,
                    translator: type[Translator] = Translator) -> tuple[tl.TLProgram, TypeExpr]:
    """Like :func:`translate_program` but also returns the type given to ``main``."""
    return translator(p, strategy).translate_program()


def check_program(p: SourceProgram) -> list[Diagnostic]:
    try:
        translate_program(p)
    except TranslationFailed as err:
        return err.diagnostics
    return []


def coercion_names_ok(v: tl.TLExpr, env: TypeEnv, p: SourceProgram) -> bool:
    """Free names of a coercion are coercion parameters of ``env`` or method functions."""
    allowed = {NameMap.tyvar(a) for a in env}
    allowed |= {NameMap.method(d.sig.name, d.struct) for d in p.method_decls()}
    return tl.fv(v) <= allowed
