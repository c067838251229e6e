"""The untyped target language: λ-calculus with constructors, case and top-level let.

Core terms are frozen dataclasses.  Tuples, pattern lambdas and nested
patterns exist only as sugar nodes and are removed by :func:`desugar`.
Evaluation is literal substitution; a free variable found in redex position
is looked up in the method substitution built from the top-level bindings.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

from .source_eval import Outcome, StepLimit, Stuck, Value

MAX_TUPLE = 8
TUPLE_CTORS = tuple(f"Tup{i}" for i in range(64))


def tuple_ctor(n: int) -> str:
    return f"Tup{n}"


# ---------------------------------------------------------------------------
# Core syntax


@dataclass(frozen=True)
class Var:
    name: str
    _fv: frozenset = field(default=None, compare=False, repr=False, hash=False)


@dataclass(frozen=True)
class Ctor:
    name: str
    _fv: frozenset = field(default=frozenset(), compare=False, repr=False, hash=False)


@dataclass(frozen=True)
class App:
    fn: TLExpr
    arg: TLExpr
    _fv: frozenset = field(default=None, compare=False, repr=False, hash=False)


@dataclass(frozen=True)
class Lam:
    var: str
    body: TLExpr
    _fv: frozenset = field(default=None, compare=False, repr=False, hash=False)


@dataclass(frozen=True)
class Clause:
    ctor: str
    vars: tuple[str, ...]
    body: TLExpr


@dataclass(frozen=True)
class Case:
    scrut: TLExpr
    clauses: tuple[Clause, ...]
    _fv: frozenset = field(default=None, compare=False, repr=False, hash=False)


@dataclass(frozen=True)
class Lit:
    value: Union[int, bool, str]
    # keeps Lit(True) and Lit(1) apart under ==
    kind: str = field(default="")
    _fv: frozenset = field(default=frozenset(), compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", type(self.value).__name__)


PRIM_ARITY = {"eq": 2, "add": 2, "concat": 2, "itos": 1}


@dataclass(frozen=True)
class Prim:
    op: str
    args: tuple[TLExpr, ...]
    _fv: frozenset = field(default=None, compare=False, repr=False, hash=False)


TLExpr = Union[Var, Ctor, App, Lam, Case, Lit, Prim]
TLValue = TLExpr  # a TLExpr for which is_tl_value holds


# ---------------------------------------------------------------------------
# Sugar


@dataclass(frozen=True)
class Tuple:
    items: tuple


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PCon:
    ctor: str
    subs: tuple


def PTuple(*subs) -> PCon:
    return PCon(tuple_ctor(len(subs)), tuple(subs))


@dataclass(frozen=True)
class PatLam:
    pattern: Union[PVar, PCon]
    body: object


@dataclass(frozen=True)
class PCase:
    scrut: object
    clauses: tuple  # of (pattern, body)


def tup(*items) -> Tuple:
    return Tuple(tuple(items))


def pvars(*names: str) -> PCon:
    return PTuple(*(PVar(n) for n in names))


class TupleArityExceeded(Exception):
    pass


class FreshNames:
    """Supply of ``%n`` names; ``avoid`` seeds it past names already in use."""

    _pat = re.compile(r"%(\d+)$")

    def __init__(self, start: int = 0):
        self.next = start

    def __call__(self) -> str:
        n = self.next
        self.next += 1
        return f"%{n}"

    @classmethod
    def avoiding(cls, *terms) -> "FreshNames":
        hi = -1
        for t in terms:
            for name in _all_names(t):
                m = cls._pat.match(name)
                if m:
                    hi = max(hi, int(m.group(1)))
        return cls(hi + 1)


def _all_names(t) -> Iterator[str]:
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t.name
        elif isinstance(t, Lam):
            yield t.var
            stack.append(t.body)
        elif isinstance(t, App):
            stack += [t.fn, t.arg]
        elif isinstance(t, Case):
            stack.append(t.scrut)
            for c in t.clauses:
                yield from c.vars
                stack.append(c.body)
        elif isinstance(t, Prim):
            stack += list(t.args)
        elif isinstance(t, Tuple):
            stack += list(t.items)
        elif isinstance(t, PatLam):
            stack += [t.pattern, t.body]
        elif isinstance(t, PCase):
            stack.append(t.scrut)
            for p, b in t.clauses:
                stack += [p, b]
        elif isinstance(t, PVar):
            yield t.name
        elif isinstance(t, PCon):
            stack += list(t.subs)


def desugar(e, max_tuple: int = MAX_TUPLE, fresh: Callable[[], str] | None = None) -> TLExpr:
    if fresh is None:
        fresh = FreshNames.avoiding(e)

    def check(n: int) -> None:
        if n > max_tuple:
            raise TupleArityExceeded(f"tuple of arity {n} exceeds the maximum {max_tuple}")

    def go(e):
        if isinstance(e, (Var, Ctor, Lit)):
            return e
        if isinstance(e, App):
            return App(go(e.fn), go(e.arg))
        if isinstance(e, Lam):
            return Lam(e.var, go(e.body))
        if isinstance(e, Case):
            return Case(go(e.scrut), tuple(Clause(c.ctor, c.vars, go(c.body)) for c in e.clauses))
        if isinstance(e, Prim):
            return Prim(e.op, tuple(go(a) for a in e.args))
        if isinstance(e, Tuple):
            check(len(e.items))
            out: TLExpr = Ctor(tuple_ctor(len(e.items)))
            for it in e.items:
                out = App(out, go(it))
            return out
        if isinstance(e, PatLam):
            if isinstance(e.pattern, PVar):
                return Lam(e.pattern.name, go(e.body))
            x = fresh()
            return Lam(x, go(PCase(Var(x), ((e.pattern, e.body),))))
        if isinstance(e, PCase):
            clauses = []
            seen = set()
            for pat, body in e.clauses:
                if not isinstance(pat, PCon):
                    raise ValueError("case clauses need a constructor pattern")
                if pat.ctor.startswith("Tup") and pat.ctor in TUPLE_CTORS:
                    check(len(pat.subs))
                if pat.ctor in seen:
                    raise ValueError(f"duplicate constructor {pat.ctor} in case")
                seen.add(pat.ctor)
                names = []
                nested = []
                for sub in pat.subs:
                    if isinstance(sub, PVar):
                        names.append(sub.name)
                    else:
                        z = fresh()
                        names.append(z)
                        nested.append((z, sub))
                for z, sub in reversed(nested):
                    body = PCase(Var(z), ((sub, body),))
                clauses.append(Clause(pat.ctor, tuple(names), go(body)))
            return Case(go(e.scrut), tuple(clauses))
        raise TypeError(f"not a TL term: {e!r}")

    return go(e)


# ---------------------------------------------------------------------------
# Values, free variables, substitution


def ctor_spine(e: TLExpr) -> tuple[str, list[TLExpr]] | None:
    args: list[TLExpr] = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    if isinstance(e, Ctor):
        args.reverse()
        return e.name, args
    return None


def is_tl_value(e: TLExpr) -> bool:
    if isinstance(e, (Lam, Lit, Ctor)):
        return True
    if isinstance(e, App):
        spine = ctor_spine(e)
        return spine is not None and all(is_tl_value(a) for a in spine[1])
    return False


def ctor_value(name: str, *args: TLExpr) -> TLExpr:
    out: TLExpr = Ctor(name)
    for a in args:
        out = App(out, a)
    return out


def tuple_value(*items: TLExpr) -> TLExpr:
    return ctor_value(tuple_ctor(len(items)), *items)


def fv(e: TLExpr) -> frozenset:
    cached = e._fv
    if cached is not None:
        return cached
    if isinstance(e, Var):
        r = frozenset((e.name,))
    elif isinstance(e, App):
        r = fv(e.fn) | fv(e.arg)
    elif isinstance(e, Lam):
        r = fv(e.body) - {e.var}
    elif isinstance(e, Case):
        r = fv(e.scrut)
        for c in e.clauses:
            r = r | (fv(c.body) - set(c.vars))
    elif isinstance(e, Prim):
        r = frozenset().union(*(fv(a) for a in e.args)) if e.args else frozenset()
    else:
        raise TypeError(f"not a core TL term: {e!r}")
    object.__setattr__(e, "_fv", r)
    return r


def _rename_away(name: str, avoid) -> str:
    for i in itertools.count(1):
        cand = f"{name}'{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def apply_subst_tl(s: Mapping[str, TLExpr], e: TLExpr) -> TLExpr:
    """Capture-avoiding ``s e``; binders that would capture are α-renamed."""
    if not s:
        return e
    live = {k: v for k, v in s.items() if k in fv(e)}
    if not live:
        return e
    if isinstance(e, Var):
        return live.get(e.name, e)
    if isinstance(e, App):
        return App(apply_subst_tl(live, e.fn), apply_subst_tl(live, e.arg))
    if isinstance(e, Prim):
        return Prim(e.op, tuple(apply_subst_tl(live, a) for a in e.args))
    if isinstance(e, Lam):
        vars_, body = _under_binders(live, (e.var,), e.body)
        return Lam(vars_[0], body)
    if isinstance(e, Case):
        clauses = []
        for c in e.clauses:
            vars_, body = _under_binders(live, c.vars, c.body)
            clauses.append(Clause(c.ctor, vars_, body))
        return Case(apply_subst_tl(live, e.scrut), tuple(clauses))
    raise TypeError(f"not a core TL term: {e!r}")


def _under_binders(s: Mapping[str, TLExpr], binders: Sequence[str], body: TLExpr):
    inner = {k: v for k, v in s.items() if k not in binders and k in fv(body)}
    if not inner:
        return tuple(binders), body
    range_fv: set[str] = set()
    for v in inner.values():
        range_fv |= fv(v)
    new_binders = list(binders)
    renaming: dict[str, TLExpr] = {}
    avoid = set(range_fv) | fv(body) | set(binders) | set(inner)
    for i, b in enumerate(binders):
        if b in range_fv:
            nb = _rename_away(b, avoid)
            avoid.add(nb)
            new_binders[i] = nb
            renaming[b] = Var(nb)
    if renaming:
        body = apply_subst_tl(renaming, body)
    return tuple(new_binders), apply_subst_tl(inner, body)


# ---------------------------------------------------------------------------
# Evaluation contexts and reduction


@dataclass(frozen=True)
class CaseFrame:
    clauses: tuple[Clause, ...]


@dataclass(frozen=True)
class FunFrame:
    arg: TLExpr


@dataclass(frozen=True)
class ArgFrame:
    fn: TLExpr


@dataclass(frozen=True)
class PrimFrame:
    op: str
    before: tuple
    after: tuple


def plug_tl(ctx: tuple, e: TLExpr) -> TLExpr:
    for fr in reversed(ctx):
        if isinstance(fr, CaseFrame):
            e = Case(e, fr.clauses)
        elif isinstance(fr, FunFrame):
            e = App(e, fr.arg)
        elif isinstance(fr, ArgFrame):
            e = App(fr.fn, e)
        elif isinstance(fr, PrimFrame):
            e = Prim(fr.op, fr.before + (e,) + fr.after)
        else:
            raise TypeError(fr)
    return e


def _frames_tl(e: TLExpr):
    """Every way to peel one evaluation-context frame off ``e``."""
    if isinstance(e, Case):
        yield CaseFrame(e.clauses), e.scrut
    elif isinstance(e, App):
        yield FunFrame(e.arg), e.fn
        if is_tl_value(e.fn):
            yield ArgFrame(e.fn), e.arg
    elif isinstance(e, Prim):
        for i, a in enumerate(e.args):
            if all(is_tl_value(b) for b in e.args[:i]):
                yield PrimFrame(e.op, e.args[:i], e.args[i + 1:]), a


def _redex_shaped_tl(e: TLExpr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, App):
        return is_tl_value(e.fn) and is_tl_value(e.arg) and ctor_spine(e) is None
    if isinstance(e, Case):
        return is_tl_value(e.scrut)
    if isinstance(e, Prim):
        return all(is_tl_value(a) for a in e.args)
    return False


def find_redex_tl(e: TLExpr) -> tuple[tuple, TLExpr] | None:
    ctx = []
    while not _redex_shaped_tl(e):
        if is_tl_value(e):
            return None
        for fr, sub in _frames_tl(e):
            if not is_tl_value(sub):
                ctx.append(fr)
                e = sub
                break
        else:
            return None
    return tuple(ctx), e


def _delta(op: str, args: Sequence[TLExpr]) -> TLExpr | None:
    if len(args) != PRIM_ARITY.get(op, -1) or not all(isinstance(a, Lit) for a in args):
        return None
    vals = [a.value for a in args]
    kinds = [a.kind for a in args]
    if op == "eq" and kinds[0] == kinds[1]:
        return Lit(vals[0] == vals[1])
    if op == "add" and kinds == ["int", "int"]:
        return Lit(vals[0] + vals[1])
    if op == "concat" and kinds == ["str", "str"]:
        return Lit(vals[0] + vals[1])
    if op == "itos" and kinds == ["int"]:
        return Lit(str(vals[0]))
    return None


def contract_tl(mu: Mapping[str, TLExpr], e: TLExpr) -> TLExpr | None:
    if isinstance(e, Var):
        return mu.get(e.name)
    if isinstance(e, App):
        if isinstance(e.fn, Lam) and is_tl_value(e.arg):
            return apply_subst_tl({e.fn.var: e.arg}, e.fn.body)
        return None
    if isinstance(e, Case):
        spine = ctor_spine(e.scrut)
        if spine is None or not is_tl_value(e.scrut):
            return None
        name, args = spine
        for c in e.clauses:
            if c.ctor == name and len(c.vars) == len(args):
                return apply_subst_tl(dict(zip(c.vars, args)), c.body)
        return None
    if isinstance(e, Prim):
        return _delta(e.op, e.args)
    return None


def rule_instances_tl(mu: Mapping[str, TLExpr], e: TLExpr) -> list[str]:
    """Names of every non-context rule instance that applies at the root of ``e``."""
    out = []
    if isinstance(e, Var) and e.name in mu:
        out.append("tl-method")
    elif isinstance(e, App) and isinstance(e.fn, Lam) and is_tl_value(e.arg):
        out.append("tl-lambda")
    elif isinstance(e, Case) and is_tl_value(e.scrut):
        spine = ctor_spine(e.scrut)
        if spine is not None:
            out += ["tl-case"] * sum(
                1 for c in e.clauses if c.ctor == spine[0] and len(c.vars) == len(spine[1]))
    elif isinstance(e, Prim) and _delta(e.op, e.args) is not None:
        out.append("delta")
    return out


def all_decompositions_tl(mu: Mapping[str, TLExpr], e: TLExpr) -> list[tuple[tuple, TLExpr]]:
    out = [((), e)] if rule_instances_tl(mu, e) else []
    for fr, sub in _frames_tl(e):
        for ctx, g in all_decompositions_tl(mu, sub):
            out.append(((fr,) + ctx, g))
    return out


def step_tl(mu: Mapping[str, TLExpr], e: TLExpr) -> TLExpr | None:
    found = find_redex_tl(e)
    if found is None:
        return None
    ctx, redex = found
    r = contract_tl(mu, redex)
    return None if r is None else plug_tl(ctx, r)


@dataclass(frozen=True)
class TLProgram:
    bindings: tuple[tuple[str, TLExpr], ...]
    main: TLExpr

    def method_subst(self) -> dict[str, TLExpr]:
        names = [n for n, _ in self.bindings]
        if len(set(names)) != len(names):
            raise ValueError("top-level binding names must be distinct")
        return dict(self.bindings)


def eval_tl(p: TLProgram, max_steps: int = 1_000_000,
            trace: Callable[[int, TLExpr], None] | None = None) -> Outcome:
    mu = p.method_subst()
    e = p.main
    n = 0
    if trace is not None:
        trace(0, e)
    while not is_tl_value(e):
        if n >= max_steps:
            return StepLimit(n)
        nxt = step_tl(mu, e)
        if nxt is None:
            found = find_redex_tl(e)
            what = "no redex" if found is None else f"irreducible {type(found[1]).__name__}"
            if found is not None and isinstance(found[1], Var):
                what = f"unbound variable {found[1].name}"
            return Stuck(e, what, n)
        e = nxt
        n += 1
        if trace is not None:
            trace(n, e)
    return Value(e, n)


# ---------------------------------------------------------------------------
# α-equivalence


def alpha_eq(a: TLExpr, b: TLExpr) -> bool:
    return _aeq(a, b, {}, {}, 0)


def _aeq(a, b, ea: dict, eb: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        la, lb = ea.get(a.name), eb.get(b.name)
        if la is None and lb is None:
            return a.name == b.name
        return la == lb
    if isinstance(a, Ctor):
        return a.name == b.name
    if isinstance(a, Lit):
        return a == b
    if isinstance(a, App):
        return _aeq(a.fn, b.fn, ea, eb, depth) and _aeq(a.arg, b.arg, ea, eb, depth)
    if isinstance(a, Prim):
        return (a.op == b.op and len(a.args) == len(b.args)
                and all(_aeq(x, y, ea, eb, depth) for x, y in zip(a.args, b.args)))
    if isinstance(a, Lam):
        return _aeq(a.body, b.body, {**ea, a.var: depth}, {**eb, b.var: depth}, depth + 1)
    if isinstance(a, Case):
        if len(a.clauses) != len(b.clauses) or not _aeq(a.scrut, b.scrut, ea, eb, depth):
            return False
        for ca, cb in zip(a.clauses, b.clauses):
            if ca.ctor != cb.ctor or len(ca.vars) != len(cb.vars):
                return False
            na, nb = dict(ea), dict(eb)
            for i, (x, y) in enumerate(zip(ca.vars, cb.vars)):
                na[x] = depth + i
                nb[y] = depth + i
            if not _aeq(ca.body, cb.body, na, nb, depth + len(ca.vars)):
                return False
        return True
    raise TypeError(f"not a core TL term: {a!r}")


def alpha_eq_program(a: TLProgram, b: TLProgram) -> bool:
    if [n for n, _ in a.bindings] != [n for n, _ in b.bindings]:
        return False
    return all(alpha_eq(x, y) for (_, x), (_, y) in zip(a.bindings, b.bindings)) and alpha_eq(a.main, b.main)
