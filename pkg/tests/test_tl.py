from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from fggtrans import tl
from fggtrans.equivalence import erase_value
from fggtrans.source_eval import StepLimit, Stuck, Value
from fggtrans.tl import (
    App, Case, Clause, Ctor, Lam, Lit, PCase, PatLam, PTuple, PVar, Prim, TLProgram, Var,
    alpha_eq, apply_subst_tl, desugar, eval_tl, fv, is_tl_value, step_tl, tup, tuple_value,
)

from generators import random_tl_term

I = Lam("x", Var("x"))


def test_desugar_pattern_lambda():
    got = desugar(PatLam(tl.pvars("Y1", "Y2", "Y3"), Var("E")))
    assert got == Lam("%0", Case(Var("%0"), (Clause("Tup3", ("Y1", "Y2", "Y3"), Var("E")),)))


def test_desugar_empty_tuple():
    assert desugar(tup()) == Ctor("Tup0")


def test_desugar_tuple_is_curried_constructor():
    assert desugar(tup(Lit(1), Lit(2))) == App(App(Ctor("Tup2"), Lit(1)), Lit(2))


def test_desugar_nested_pattern_cascades():
    got = desugar(PCase(Var("E"), ((PTuple(PVar("Y"), PTuple(PVar("X1"))), Var("B")),)))
    assert got == Case(Var("E"), (Clause("Tup2", ("Y", "%0"),
                                         Case(Var("%0"), (Clause("Tup1", ("X1",), Var("B")),))),))


def test_desugar_fresh_names_avoid_existing():
    got = desugar(PatLam(tl.pvars("%0"), Var("%0")))
    assert got.var != "%0"


def test_desugar_tuple_arity_limit():
    with pytest.raises(tl.TupleArityExceeded):
        desugar(tup(*[Lit(i) for i in range(9)]))
    assert desugar(tup(*[Lit(i) for i in range(9)]), max_tuple=9) is not None


def test_is_tl_value():
    assert is_tl_value(I)
    assert not is_tl_value(App(I, Ctor("K")))
    assert is_tl_value(tuple_value(Lit(1), I))
    assert not is_tl_value(App(App(Ctor("Tup2"), Lit(1)), App(I, Lit(2))))


def test_step_beta():
    assert step_tl({}, App(I, Ctor("K"))) == Ctor("K")


def test_step_case_selects_field():
    e = Case(tuple_value(Lit(1)), (Clause("Tup1", ("X1",), Var("X1")),))
    assert step_tl({}, e) == Lit(1)


def test_step_method_variable():
    mu = {"M.eq.Num": I}
    assert step_tl(mu, Var("M.eq.Num")) == I
    assert step_tl({}, Var("M.eq.Num")) is None


def test_step_argument_after_function_value():
    e = App(I, App(I, Lit(1)))
    assert step_tl({}, e) == App(I, Lit(1))


def test_step_case_needs_matching_arity():
    e = Case(tuple_value(Lit(1)), (Clause("Tup1", ("a", "b"), Var("a")),))
    assert step_tl({}, e) is None


def test_prim_delta_kinds():
    assert step_tl({}, Prim("eq", (Lit(1), Lit(1)))) == Lit(True)
    assert step_tl({}, Prim("eq", (Lit(True), Lit(1)))) is None
    assert step_tl({}, Prim("add", (Lit(1), Lit(2)))) == Lit(3)
    assert step_tl({}, Prim("concat", (Lit("a"), Lit("b")))) == Lit("ab")
    assert step_tl({}, Prim("itos", (Lit(7),))) == Lit("7")


def test_eval_empty_program():
    assert eval_tl(TLProgram((), App(I, Ctor("Tup0"))), 10) == Value(Ctor("Tup0"), 1)


def test_eval_recursive_binding_hits_limit():
    loop = Lam("x", App(Var("f"), Var("x")))
    out = eval_tl(TLProgram((("f", loop),), App(Var("f"), Ctor("Tup0"))), 300)
    assert isinstance(out, StepLimit) and out.steps == 300


def test_eval_mutual_recursion():
    # even/odd over Peano numerals built from Z and S
    even = Lam("n", Case(Var("n"), (Clause("Z", (), Lit(True)), Clause("S", ("m",), App(Var("odd"), Var("m"))))))
    odd = Lam("n", Case(Var("n"), (Clause("Z", (), Lit(False)), Clause("S", ("m",), App(Var("even"), Var("m"))))))
    three = tl.ctor_value("S", tl.ctor_value("S", tl.ctor_value("S", Ctor("Z"))))
    out = eval_tl(TLProgram((("even", even), ("odd", odd)), App(Var("even"), three)), 100)
    assert isinstance(out, Value) and out.value == Lit(False)


def test_eval_stuck_unbound_variable():
    out = eval_tl(TLProgram((), App(Var("nope"), Lit(1))), 10)
    assert isinstance(out, Stuck) and "nope" in out.diagnostic


def test_duplicate_bindings_rejected():
    with pytest.raises(ValueError):
        TLProgram((("f", I), ("f", I)), Lit(1)).method_subst()


def test_subst_basic_and_shadowing():
    assert apply_subst_tl({"X": Ctor("K")}, Var("X")) == Ctor("K")
    assert apply_subst_tl({"X": Ctor("K")}, Lam("X", Var("X"))) == Lam("X", Var("X"))


def test_subst_avoids_capture():
    out = apply_subst_tl({"X": Var("Y")}, Lam("Y", Var("X")))
    assert isinstance(out, Lam) and out.var != "Y"
    assert out.body == Var("Y")
    assert alpha_eq(out, Lam("Z", Var("Y")))


def test_subst_avoids_capture_in_case_clause():
    e = Case(Var("s"), (Clause("K", ("Y",), App(Var("X"), Var("Y"))),))
    out = apply_subst_tl({"X": Var("Y")}, e)
    (c,) = out.clauses
    assert c.vars[0] != "Y"
    assert fv(out) == {"s", "Y"}


def test_alpha_eq():
    assert alpha_eq(Lam("a", Var("a")), Lam("b", Var("b")))
    assert not alpha_eq(Lam("a", Var("c")), Lam("b", Var("b")))


@settings(max_examples=300)
@given(st.integers(0, 100_000))
def test_values_are_fixpoints(seed):
    e = random_tl_term(random.Random(seed), 4)
    if is_tl_value(e):
        assert step_tl({}, e) is None


# -- independent oracle for sugared terms ------------------------------------

STUCK = object()


def _match(pat, v):
    if isinstance(pat, PVar):
        return {pat.name: v}
    if not (isinstance(v, tuple) and v[0] == "ctor" and v[1] == pat.ctor and len(v[2]) == len(pat.subs)):
        return None
    env = {}
    for p, x in zip(pat.subs, v[2]):
        m = _match(p, x)
        if m is None:
            return None
        env.update(m)
    return env


def _oracle(e, env, fuel):
    """Big-step environment evaluator over the sugared syntax; values are tagged tuples."""
    if fuel[0] <= 0:
        raise RecursionError
    fuel[0] -= 1
    if isinstance(e, Lit):
        return ("lit", e.value, e.kind)
    if isinstance(e, Var):
        return env.get(e.name, STUCK)
    if isinstance(e, Ctor):
        return ("ctor", e.name, ())
    if isinstance(e, tl.Tuple):
        items = [_oracle(i, env, fuel) for i in e.items]
        return STUCK if STUCK in items else ("ctor", f"Tup{len(items)}", tuple(items))
    if isinstance(e, (Lam, PatLam)):
        pat = PVar(e.var) if isinstance(e, Lam) else e.pattern
        return ("clo", pat, e.body, env)
    if isinstance(e, App):
        f = _oracle(e.fn, env, fuel)
        if f is STUCK:
            return STUCK
        a = _oracle(e.arg, env, fuel)
        if a is STUCK:
            return STUCK
        if f[0] == "ctor":
            return ("ctor", f[1], f[2] + (a,))
        if f[0] != "clo":
            return STUCK
        m = _match(f[1], a)
        return STUCK if m is None else _oracle(f[2], {**f[3], **m}, fuel)
    if isinstance(e, PCase):
        s = _oracle(e.scrut, env, fuel)
        if s is STUCK:
            return STUCK
        for pat, body in e.clauses:
            m = _match(pat, s)
            if m is not None:
                return _oracle(body, {**env, **m}, fuel)
            if isinstance(s, tuple) and s[0] == "ctor" and s[1] == pat.ctor:
                return STUCK  # a nested sub-pattern failed; the cascade gets stuck too
        return STUCK
    if isinstance(e, Prim):
        args = [_oracle(a, env, fuel) for a in e.args]
        if STUCK in args or any(a[0] != "lit" for a in args):
            return STUCK
        r = tl._delta(e.op, [Lit(a[1]) for a in args])
        return STUCK if r is None else ("lit", r.value, r.kind)
    raise TypeError(e)


def _erase_oracle(v):
    if v[0] == "lit":
        return Lit(v[1])
    if v[0] == "clo":
        return Ctor("ErasedLam")
    return tl.ctor_value(v[1], *(_erase_oracle(x) for x in v[2]))


def _random_sugar(rng: random.Random, depth: int, scope: tuple[str, ...]):
    r = rng.random()
    if depth <= 0 or r < 0.15:
        opts = [Lit(rng.randint(0, 3)), Ctor("K")] + [Var(x) for x in scope]
        return rng.choice(opts)
    if r < 0.35:
        return tup(*(_random_sugar(rng, depth - 1, scope) for _ in range(rng.randint(0, 3))))
    if r < 0.55:
        pat, names = _random_pattern(rng, 2)
        arg = _random_sugar(rng, depth - 1, scope)
        return App(PatLam(pat, _random_sugar(rng, depth - 1, scope + names)), arg)
    if r < 0.75:
        clauses = []
        for ctor in rng.sample(["Tup0", "Tup1", "Tup2"], rng.randint(1, 3)):
            n = int(ctor[3:])
            subs, names = [], ()
            for _ in range(n):
                p, ns = _random_pattern(rng, 1)
                subs.append(p)
                names += ns
            clauses.append((tl.PCon(ctor, tuple(subs)), _random_sugar(rng, depth - 1, scope + names)))
        return PCase(_random_sugar(rng, depth - 1, scope), tuple(clauses))
    if r < 0.9:
        return Lam("z", _random_sugar(rng, depth - 1, scope + ("z",)))
    return Prim("add", (_random_sugar(rng, depth - 1, scope), _random_sugar(rng, depth - 1, scope)))


_name_counter = [0]


def _random_pattern(rng: random.Random, depth: int):
    if depth <= 0 or rng.random() < 0.5:
        _name_counter[0] += 1
        x = f"p{_name_counter[0]}"
        return PVar(x), (x,)
    subs, names = [], ()
    for _ in range(rng.randint(0, 2)):
        p, ns = _random_pattern(rng, depth - 1)
        subs.append(p)
        names += ns
    return PTuple(*subs), names


@settings(max_examples=400)
@given(st.integers(0, 1_000_000))
def test_desugar_adequacy(seed):
    rng = random.Random(seed)
    e = _random_sugar(rng, 4, ())
    try:
        expected = _oracle(e, {}, [10_000])
    except RecursionError:
        return
    out = eval_tl(TLProgram((), desugar(e)), 10_000)
    if expected is STUCK:
        assert isinstance(out, Stuck)
    else:
        assert isinstance(out, Value)
        assert erase_value(out.value) == _erase_oracle(expected)
