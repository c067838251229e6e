from __future__ import annotations

import pytest

from fggtrans import tl
from fggtrans.corpus import load_corpus
from fggtrans.parser import parse_expr, parse_program, parse_type
from fggtrans.source_eval import Value
from fggtrans.syntax import MethodSig, Param, TyParam, TyVar
from fggtrans.translate import (
    IDENTITY,
    CheckError,
    NameMap,
    Strategy,
    TranslationFailed,
    Translator,
    coercion_names_ok,
    translate_program,
    translate_typed,
)

FIXTURE = parse_program("""
type Any interface {}
type Eq[a Any] interface { eq(that a) bool }
type Format interface { format() string }
type Pretty interface {
    format() string
    pretty() string
}
type Num struct { val int }
type Plain struct {}
type Box[a Any] struct { content a }
type EBox[a Eq[a]] struct { content a }
type Pair[T Any, U Any] struct { left T; right U }
func (this Num) eq(that Num) bool { return this.val == that.val }
func (this Num) format() string { return intToString(this.val) }
func (this Num) pretty() string { return "Num" }
func (this Box[a Eq[a]]) eq(that Box[a]) bool { return this.content.eq(that.content) }
func (this Pair[T Format, U Format]) format() string { return this.left.format() + this.right.format() }
func main() { _ = Num{1} }
""")

ANY, NUM = parse_type("Any"), parse_type("Num")
EQ_A = parse_type("Eq[a]", scope=("a",))
N = NameMap


def tr(p=FIXTURE, strategy=Strategy()):
    return Translator(p, strategy)


def core(v):
    return tl.desugar(v)


def code_of(fn, *args):
    with pytest.raises(CheckError) as info:
        fn(*args)
    return info.value.code


# -- well-formedness ---------------------------------------------------------

def test_wf_type():
    t = tr()
    t.wf_type({}, NUM)
    t.wf_type({"a": EQ_A}, TyVar("a"))
    assert code_of(t.wf_type, {}, TyVar("a")) == "UnboundTypeVar"
    assert code_of(t.wf_type, {}, parse_type("Nope")) == "UnknownTypeName"
    assert code_of(t.wf_type, {}, parse_type("EBox[Plain]")) == "BoundViolation"
    t.wf_type({}, parse_type("EBox[Num]"))


def test_bound_violation_agrees_with_method_sets():
    # brute force: Plain has no methods at all, Num has eq(that Num) bool
    t = tr()
    for s in ("Plain", "Num", "Box[Num]", "Box[Plain]"):
        have = {d.sig.name for d in FIXTURE.methods_of(parse_type(s).name)}
        ok = "eq" in have and s != "Box[Plain]"
        try:
            t.wf_type({}, parse_type(f"EBox[{s}]"))
            assert ok, s
        except CheckError as err:
            assert not ok and err.code == "BoundViolation", s


def test_wf_typarams():
    t = tr()
    assert t.wf_typarams({}, (TyParam("a", EQ_A),)) == {"a": EQ_A}
    assert code_of(t.wf_typarams, {}, (TyParam("a", ANY), TyParam("a", ANY))) == "DuplicateTyVar"
    assert code_of(t.wf_typarams, {"a": ANY}, (TyParam("a", ANY),)) == "ShadowedTyVar"
    assert code_of(t.wf_typarams, {}, (TyParam("a", NUM),)) == "NotAnInterface"


def test_wf_msig():
    t = tr()
    t.wf_msig({}, MethodSig("eq", (), (Param("that", NUM),), parse_type("bool")))
    dup = MethodSig("m", (), (Param("x", NUM), Param("x", NUM)), NUM)
    assert code_of(t.wf_msig, {}, dup) == "DuplicateParam"
    eq_b = parse_type("Eq[b]", scope=("b",))
    t.wf_msig({"a": ANY}, MethodSig("m", (TyParam("b", eq_b),), (Param("x", TyVar("b")),), TyVar("b")))


def test_wf_decl_covariant_receiver_bounds():
    t = tr()
    pair_format = [d for d in FIXTURE.method_decls() if d.struct == "Pair"][0]
    t.wf_decl(pair_format)


def test_wf_decl_rejects_weaker_receiver_bound():
    p = parse_program("""
    type Format interface { format() string }
    type Pretty interface { format() string; pretty() string }
    type Box[a Pretty] struct { content a }
    func (this Box[a Format]) format() string { return this.content.format() }
    func main() { _ = 1 }
    """)
    d = p.method_decls()[0]
    # brute force: Pretty's method names are not contained in Format's
    assert not {"format", "pretty"} <= {"format"}
    assert code_of(tr(p).wf_decl, d) == "ReceiverBoundsNotCovariant"


def test_wf_decl_duplicate_field_and_receiver_arity():
    p = parse_program("type S struct { f int; f int }\ntype B[a Any] struct {}\ntype Any interface {}\n"
                      "func (x B) m() int { return 1 }\nfunc main() { _ = 1 }")
    t = tr(p)
    assert code_of(t.wf_decl, p.decls[0]) == "DuplicateField"
    assert code_of(t.wf_decl, p.method_decls()[0]) == "ReceiverArity"


# -- auxiliary judgments -----------------------------------------------------

def test_method_specs():
    t = tr()
    (eq,) = t.method_specs(parse_type("Eq[Num]"))
    assert eq == MethodSig("eq", (), (Param("that", NUM),), parse_type("bool"))
    assert t.method_specs(ANY) == []
    assert [s.name for s in t.method_specs(parse_type("Pretty"))] == ["format", "pretty"]
    assert code_of(t.method_specs, parse_type("Nope")) == "UnknownInterface"
    assert code_of(t.method_specs, parse_type("Eq")) == "ArityMismatch"


def _v3():
    entry = tl.PatLam(tl.pvars("Y1", "Y2", "Y3"),
                      tl.App(tl.Var(N.method("eq", "Num")), tl.tup(tl.tup(), tl.Var("Y1"), tl.Var("Y2"), tl.Var("Y3"))))
    return tl.PatLam(tl.PVar("X"), tl.tup(tl.Var("X"), tl.tup(entry)))


def test_methods_struct():
    t = tr()
    got = t.methods_struct({}, NUM)
    assert [(s.name, v) for s, v in got] == [("eq", tl.tup()), ("format", tl.tup()), ("pretty", tl.tup())]
    (sig, v), = t.methods_struct({}, parse_type("Box[Num]"))
    assert sig == MethodSig("eq", (), (Param("that", parse_type("Box[Num]")),), parse_type("bool"))
    assert tl.alpha_eq(core(v), core(tl.tup(_v3())))
    assert t.methods_struct({}, parse_type("Box[Plain]")) == []


def test_instantiate_checked():
    t = tr()
    bc = t.instantiate_checked({}, (TyParam("a", EQ_A),), (NUM,))
    assert bc.subst == {"a": NUM}
    assert len(bc.coercions) == 1 and tl.alpha_eq(core(bc.coercions[0]), core(_v3()))
    empty = t.instantiate_checked({}, (), ())
    assert (empty.subst, empty.coercions) == ({}, ())
    (c,) = t.instantiate_checked({}, (TyParam("a", ANY),), (NUM,)).coercions
    assert tl.alpha_eq(core(c), core(tl.PatLam(tl.PVar("X"), tl.tup(tl.Var("X"), tl.tup()))))


def test_subtype_coerce_struct_iface():
    v = tr().subtype_coerce({}, NUM, parse_type("Eq[Num]"))
    assert tl.alpha_eq(core(v), core(_v3()))


def test_subtype_coerce_tyvar():
    v1 = tr().subtype_coerce({"a": EQ_A}, TyVar("a"), EQ_A)
    v2 = tl.PatLam(tl.PTuple(tl.PVar("Y"), tl.pvars("X")), tl.tup(tl.Var("Y"), tl.tup(tl.Var("X"))))
    want = tl.PatLam(tl.PVar("Y"), tl.App(v2, tl.App(tl.Var(N.tyvar("a")), tl.Var("Y"))))
    assert tl.alpha_eq(core(v1), core(want))


def test_subtype_coerce_iface_iface_selects_by_declaration_order():
    v = tr().subtype_coerce({}, parse_type("Pretty"), parse_type("Format"))
    want = tl.PatLam(tl.PTuple(tl.PVar("Y"), tl.pvars("X1", "X2")), tl.tup(tl.Var("Y"), tl.tup(tl.Var("X1"))))
    assert tl.alpha_eq(core(v), core(want))


def test_subtype_coerce_identity_and_absence():
    t = tr()
    assert t.subtype_coerce({}, NUM, NUM) is IDENTITY
    assert t.subtype_coerce({"a": ANY}, TyVar("a"), TyVar("a")) is IDENTITY
    assert t.subtype_coerce({}, parse_type("Plain"), parse_type("Format")) is None
    assert t.subtype_coerce({}, parse_type("Format"), parse_type("Pretty")) is None
    assert t.subtype_coerce({}, NUM, parse_type("Plain")) is None


def test_identity_iface_coercion_is_observationally_identity():
    t = tr()
    for ty in ("Format", "Pretty", "Eq[Num]"):
        sup = parse_type(ty)
        v = core(t.subtype_coerce({}, sup, sup))
        packed = core(t.subtype_coerce({}, NUM, sup))
        sample = tl.App(packed, tl.tuple_value(tl.Lit(7)))
        out_a = tl.eval_tl(tl.TLProgram((), sample), 100)
        out_b = tl.eval_tl(tl.TLProgram((), tl.App(v, sample)), 100)
        assert isinstance(out_a, Value) and out_a.value == out_b.value


# -- expressions -------------------------------------------------------------

def test_translate_struct_literal():
    t, out = tr().translate_expr({}, {}, parse_expr("Num{1}"), NUM)
    assert t == NUM and core(out) == tl.tuple_value(tl.Lit(1))


def test_translate_variable():
    t, out = tr().translate_expr({}, {"x": NUM}, parse_expr("x"))
    assert (t, out) == (NUM, tl.Var(N.var("x")))


def test_translate_errors():
    t = tr()
    assert code_of(t.translate_expr, {}, {}, parse_expr("y"), None) == "UnboundVariable"
    assert code_of(t.translate_expr, {}, {}, parse_expr("Num{1}.nope"), None) == "UnknownField"
    assert code_of(t.translate_expr, {}, {}, parse_expr("Num{1}.nope()"), None) == "NoSuchMethod"
    assert code_of(t.translate_expr, {}, {}, parse_expr("Num{1}"), parse_type("Plain")) == "NoSubtype"
    assert code_of(t.translate_expr, {}, {}, parse_expr("Num{1}.eq()"), None) == "ArgCountMismatch"
    assert code_of(t.translate_expr, {}, {}, parse_expr("Num{true}"), None) == "NoSubtype"


def test_call_iface_uses_declaration_index():
    t = tr()
    for m, j in (("format", 0), ("pretty", 1)):
        _, out = t.translate_expr({}, {"x": parse_type("Pretty")}, parse_expr(f"x.{m}()"))
        (pat, body), = out.clauses
        dict_vars = [s.name for s in pat.subs[1].subs]
        assert body.fn == tl.Var(dict_vars[j])


def test_translate_method_shape():
    p = parse_program("""
    type Any interface {}
    type Num struct { val int }
    func (this Num) id[b Any](x b) b { return x }
    func main() { _ = Num{1} }
    """)
    name, v = tr(p).translate_method(p.method_decls()[0])
    assert name == N.method("id", "Num")
    case = v.body
    (clause,) = case.clauses
    assert clause.ctor == "Tup4"
    inner = clause.body  # receiver coercions
    third = inner.clauses[0].body
    assert third.clauses[0].ctor == "Tup1"


# -- programs ---------------------------------------------------------------

CORPUS = [c for c in load_corpus() if c.expected.kind != "type_error"]


def test_empty_program():
    p = parse_program("func main() { _ = 1 }")
    assert translate_program(p) == tl.TLProgram((), tl.Lit(1))


def test_requested_main_type_wraps_in_coercion():
    p = [c for c in CORPUS if c.name == "format_main"][0].program()
    prog, t = translate_typed(p, Strategy(main_type=parse_type("Format")))
    assert t == parse_type("Format")
    entry_calls = tl.fv(prog.main)
    assert N.method("format", "Num") in entry_calls
    assert N.method("pretty", "Num") not in entry_calls


def test_requested_main_type_must_be_reachable():
    p = parse_program("type Format interface { format() string }\ntype Num struct {}\nfunc main() { _ = Num{} }")
    with pytest.raises(TranslationFailed) as info:
        translate_program(p, Strategy(main_type=parse_type("Format")))
    assert info.value.codes == ["NoSubtype"]


def test_translation_is_closed():
    for c in CORPUS:
        for s in c.strategies:
            prog = translate_program(c.program(), s)
            names = {n for n, _ in prog.bindings}
            assert tl.fv(prog.main) <= names, c.name
            for _, v in prog.bindings:
                assert tl.fv(v) <= names, c.name


class _Recording(Translator):
    seen: list

    def subtype_coerce(self, env, sub, sup):
        v = super().subtype_coerce(env, sub, sup)
        if v is not None and v is not IDENTITY:
            type(self).seen.append((dict(env), v))
        return v


def test_every_coercion_has_allowed_free_names():
    _Recording.seen = []
    for c in CORPUS:
        p = c.program()
        for s in c.strategies + (Strategy(3),):
            _Recording(p, s).translate_program()
            for env, v in _Recording.seen:
                assert tl.is_tl_value(core(v))
                assert coercion_names_ok(core(v), env, p), c.name
            _Recording.seen = []


def test_direct_strategy_accepts_the_positive_corpus():
    for c in CORPUS:
        translate_program(c.program())


def test_base_types_disabled():
    p = parse_program("func main() { _ = 1 }", base_types=False)
    with pytest.raises(TranslationFailed) as info:
        translate_program(p)
    assert info.value.codes == ["BaseTypesDisabled"]


def test_tuple_arity_limit_is_a_diagnostic():
    fields = "; ".join(f"f{i} int" for i in range(9))
    p = parse_program(f"type Big struct {{ {fields} }}\nfunc main() {{ _ = Big{{{', '.join('0' * 9)}}} }}")
    with pytest.raises(TranslationFailed) as info:
        translate_program(p)
    assert info.value.codes == ["TupleArityExceeded"]


def test_name_ranges_are_disjoint():
    names = {N.var("x"), N.tyvar("x"), N.method("x", "x")}
    assert len(names) == 3
    assert all(not n.startswith("%") for n in names)
