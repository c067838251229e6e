"""Small-step call-by-value interpreter for FGG⁻ with runtime method lookup.

An evaluation context is a tuple of frames, outermost first.  ``decompose``
finds the single redex position; ``all_decompositions`` reads the context
grammar relationally and enumerates every position, which is what the
determinism checks compare against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Union

from .syntax import (
    BASE_LITERALS,
    BinOp,
    BinOpKind,
    BoolLit,
    Builtin,
    BuiltinKind,
    Expr,
    FieldAccess,
    IntLit,
    MethodCall,
    MethodDecl,
    Named,
    SourceProgram,
    StrLit,
    StructDecl,
    StructLit,
    Var,
    apply_type_subst,
    free_vars,
    subst_values,
)


def is_value(e: Expr) -> bool:
    if isinstance(e, BASE_LITERALS):
        return True
    return isinstance(e, StructLit) and all(is_value(a) for a in e.args)


# ---------------------------------------------------------------------------
# Evaluation contexts


@dataclass(frozen=True)
class StructArgFrame:
    type: Named
    before: tuple[Expr, ...]
    after: tuple[Expr, ...]


@dataclass(frozen=True)
class FieldFrame:
    field: str


@dataclass(frozen=True)
class RecvFrame:
    name: str
    tyargs: tuple
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class ArgFrame:
    recv: Expr
    name: str
    tyargs: tuple
    before: tuple[Expr, ...]
    after: tuple[Expr, ...]


@dataclass(frozen=True)
class BinLeftFrame:
    op: BinOpKind
    rhs: Expr


@dataclass(frozen=True)
class BinRightFrame:
    op: BinOpKind
    lhs: Expr


@dataclass(frozen=True)
class BuiltinFrame:
    op: BuiltinKind


Frame = Union[StructArgFrame, FieldFrame, RecvFrame, ArgFrame, BinLeftFrame, BinRightFrame, BuiltinFrame]
EvalCtx = tuple  # tuple[Frame, ...]; () is the hole


def plug(ctx: EvalCtx, e: Expr) -> Expr:
    for fr in reversed(ctx):
        if isinstance(fr, StructArgFrame):
            e = StructLit(fr.type, fr.before + (e,) + fr.after)
        elif isinstance(fr, FieldFrame):
            e = FieldAccess(e, fr.field)
        elif isinstance(fr, RecvFrame):
            e = MethodCall(e, fr.name, fr.tyargs, fr.args)
        elif isinstance(fr, ArgFrame):
            e = MethodCall(fr.recv, fr.name, fr.tyargs, fr.before + (e,) + fr.after)
        elif isinstance(fr, BinLeftFrame):
            e = BinOp(fr.op, e, fr.rhs)
        elif isinstance(fr, BinRightFrame):
            e = BinOp(fr.op, fr.lhs, e)
        elif isinstance(fr, BuiltinFrame):
            e = Builtin(fr.op, e)
        else:
            raise TypeError(fr)
    return e


def _frames(e: Expr) -> Iterator[tuple[Frame, Expr]]:
    """Every way to peel one context frame off ``e`` (relational reading)."""
    if isinstance(e, StructLit):
        for i, a in enumerate(e.args):
            if all(is_value(b) for b in e.args[:i]):
                yield StructArgFrame(e.type, e.args[:i], e.args[i + 1:]), a
    elif isinstance(e, FieldAccess):
        yield FieldFrame(e.field), e.recv
    elif isinstance(e, MethodCall):
        yield RecvFrame(e.name, e.tyargs, e.args), e.recv
        if is_value(e.recv):
            for i, a in enumerate(e.args):
                if all(is_value(b) for b in e.args[:i]):
                    yield ArgFrame(e.recv, e.name, e.tyargs, e.args[:i], e.args[i + 1:]), a
    elif isinstance(e, BinOp):
        yield BinLeftFrame(e.op, e.rhs), e.lhs
        if is_value(e.lhs):
            yield BinRightFrame(e.op, e.lhs), e.rhs
    elif isinstance(e, Builtin):
        yield BuiltinFrame(e.op), e.arg


def _redex_shaped(e: Expr) -> bool:
    if isinstance(e, FieldAccess):
        return is_value(e.recv)
    if isinstance(e, MethodCall):
        return is_value(e.recv) and all(is_value(a) for a in e.args)
    if isinstance(e, BinOp):
        return is_value(e.lhs) and is_value(e.rhs)
    if isinstance(e, Builtin):
        return is_value(e.arg)
    return False


def find_redex(e: Expr) -> tuple[EvalCtx, Expr] | None:
    """The leftmost-innermost redex-shaped position, reducible or not."""
    ctx: list[Frame] = []
    while not _redex_shaped(e):
        for fr, sub in _frames(e):
            if not is_value(sub):
                ctx.append(fr)
                e = sub
                break
        else:
            return None
    return tuple(ctx), e


def decompose(e: Expr, prog: SourceProgram) -> tuple[EvalCtx, Expr] | None:
    found = find_redex(e)
    if found is None or contract(found[1], prog) is None:
        return None
    return found


def all_decompositions(e: Expr, prog: SourceProgram) -> list[tuple[EvalCtx, Expr]]:
    """All ``(ctx, g)`` with ``plug(ctx, g) == e`` and ``g`` directly reducible."""
    out: list[tuple[EvalCtx, Expr]] = []
    if rule_instances(e, prog):
        out.append(((), e))
    for fr, sub in _frames(e):
        for ctx, g in all_decompositions(sub, prog):
            out.append(((fr,) + ctx, g))
    return out


# ---------------------------------------------------------------------------
# Reduction rules


def rule_instances(e: Expr, prog: SourceProgram) -> list[tuple[str, Callable[[], Expr]]]:
    """Every instance of a non-context rule whose premises hold for ``e``.

    Scans the declaration list directly instead of the lookup index so that it
    can serve as an oracle for single-rule applicability.
    """
    out: list[tuple[str, Callable[[], Expr]]] = []
    if isinstance(e, FieldAccess) and isinstance(e.recv, StructLit) and is_value(e.recv):
        v = e.recv
        for d in prog.decls:
            if isinstance(d, StructDecl) and d.name == v.type.name and len(d.fields) == len(v.args):
                for i, f in enumerate(d.fields):
                    if f.name == e.field:
                        out.append(("fg-field", lambda i=i: v.args[i]))
    elif isinstance(e, MethodCall) and isinstance(e.recv, StructLit) and _redex_shaped(e):
        v = e.recv
        for d in prog.decls:
            if (isinstance(d, MethodDecl) and d.struct == v.type.name and d.sig.name == e.name
                    and len(d.recv_typarams) == len(v.type.args)
                    and len(d.sig.typarams) == len(e.tyargs)
                    and len(d.sig.params) == len(e.args)):
                out.append(("fg-call", lambda d=d: _call_body(d, v, e)))
    elif isinstance(e, BinOp) and _redex_shaped(e):
        r = _delta_binop(e)
        if r is not None:
            out.append(("delta", lambda r=r: r))
    elif isinstance(e, Builtin) and isinstance(e.arg, IntLit) and e.op is BuiltinKind.INT_TO_STRING:
        out.append(("delta", lambda: StrLit(str(e.arg.value))))
    return out


def _call_body(d, v: StructLit, call: MethodCall) -> Expr:
    tsubst = {p.var: t for p, t in zip(d.recv_typarams, v.type.args)}
    tsubst.update({p.var: t for p, t in zip(d.sig.typarams, call.tyargs)})
    vsubst = {d.recv: v}
    vsubst.update({q.name: a for q, a in zip(d.sig.params, call.args)})
    return subst_values(vsubst, apply_type_subst(tsubst, d.body))


def _delta_binop(e: BinOp) -> Expr | None:
    a, b = e.lhs, e.rhs
    if e.op is BinOpKind.EQ and type(a) is type(b) and isinstance(a, BASE_LITERALS):
        return BoolLit(a.value == b.value)
    if e.op is BinOpKind.PLUS:
        if isinstance(a, IntLit) and isinstance(b, IntLit):
            return IntLit(a.value + b.value)
        if isinstance(a, StrLit) and isinstance(b, StrLit):
            return StrLit(a.value + b.value)
    return None


def contract(e: Expr, prog: SourceProgram) -> Expr | None:
    """Apply fg-field, fg-call or a delta rule at the root of ``e``."""
    if isinstance(e, FieldAccess):
        v = e.recv
        if not (isinstance(v, StructLit) and is_value(v)):
            return None
        d = prog.struct(v.type.name)
        if d is None or len(d.fields) != len(v.args):
            return None
        for i, f in enumerate(d.fields):
            if f.name == e.field:
                return v.args[i]
        return None
    if isinstance(e, MethodCall):
        v = e.recv
        if not (isinstance(v, StructLit) and _redex_shaped(e)):
            return None
        d = prog.method(v.type.name, e.name)
        if (d is None or len(d.recv_typarams) != len(v.type.args)
                or len(d.sig.typarams) != len(e.tyargs) or len(d.sig.params) != len(e.args)):
            return None
        return _call_body(d, v, e)
    if isinstance(e, BinOp):
        return _delta_binop(e) if _redex_shaped(e) else None
    if isinstance(e, Builtin):
        if e.op is BuiltinKind.INT_TO_STRING and isinstance(e.arg, IntLit):
            return StrLit(str(e.arg.value))
        return None
    return None


def step(e: Expr, prog: SourceProgram) -> Expr | None:
    found = find_redex(e)
    if found is None:
        return None
    ctx, redex = found
    r = contract(redex, prog)
    return None if r is None else plug(ctx, r)


# ---------------------------------------------------------------------------
# Outcomes


@dataclass(frozen=True)
class Value:
    value: object
    steps: int


@dataclass(frozen=True)
class StepLimit:
    steps: int


@dataclass(frozen=True)
class Stuck:
    expr: object
    diagnostic: str
    steps: int


Outcome = Union[Value, StepLimit, Stuck]

DEFAULT_MAX_STEPS = 1_000_000


def stuck_diagnostic(e: Expr, prog: SourceProgram) -> str:
    found = find_redex(e)
    if found is None:
        free = sorted(free_vars(e))
        if free:
            return f"free variable {free[0]}"
        return "no redex"
    redex = found[1]
    if isinstance(redex, FieldAccess):
        if not isinstance(redex.recv, StructLit):
            return f"field access .{redex.field} on a non-struct value"
        return f"missing field {redex.field} on {redex.recv.type.name}"
    if isinstance(redex, MethodCall):
        if not isinstance(redex.recv, StructLit):
            return f"method call .{redex.name} on a non-struct value"
        d = prog.method(redex.recv.type.name, redex.name)
        if d is None:
            return f"missing method {redex.name} on {redex.recv.type.name}"
        return f"arity mismatch at runtime calling {redex.name} on {redex.recv.type.name}"
    return f"ill-typed operands for {type(redex).__name__}"


def eval_source(
    p: SourceProgram,
    max_steps: int = DEFAULT_MAX_STEPS,
    trace: Callable[[int, Expr], None] | None = None,
) -> Outcome:
    """Reduce ``p.main``; one step per application of fg-field, fg-call or delta."""
    e = p.main
    n = 0
    if trace is not None:
        trace(0, e)
    while not is_value(e):
        if n >= max_steps:
            return StepLimit(n)
        nxt = step(e, p)
        if nxt is None:
            return Stuck(e, stuck_diagnostic(e, p), n)
        e = nxt
        n += 1
        if trace is not None:
            trace(n, e)
    return Value(e, n)
