"""Erasure, shape-level value correspondence, and the differential and coherence checks.

Divergence is approximated by the step budget.  Two runs that both exhaust
their budget are reported as ``budget-equivalent``; nothing here claims to
prove divergence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from . import tl
from .parser import show_value
from .source_eval import DEFAULT_MAX_STEPS, Outcome, StepLimit, Stuck, Value, eval_source
from .syntax import (
    Base,
    BaseKind,
    BoolLit,
    Expr,
    IntLit,
    Named,
    SourceProgram,
    StrLit,
    StructLit,
    TypeExpr,
    apply_type_subst,
    make_type_subst,
    show_type,
)
from .tl_text import print_tl
from .translate import DIRECT, IDENTITY, CheckError, Strategy, TranslationFailed, Translator

ERASED_LAM = "ErasedLam"


class ShapeError(ValueError):
    pass


def erase_value(v: tl.TLExpr) -> tl.TLExpr:
    """Replace every λ by the nullary constructor ``ErasedLam``; constructors map homomorphically."""
    if isinstance(v, tl.Lam):
        return tl.Ctor(ERASED_LAM)
    if isinstance(v, (tl.Lit, tl.Ctor)):
        return v
    spine = tl.ctor_spine(v)
    if spine is None or not tl.is_tl_value(v):
        raise ShapeError(f"not a TL value: {print_tl(v)}")
    name, args = spine
    return tl.ctor_value(name, *(erase_value(a) for a in args))


def erase_at_type(t: TypeExpr, v: tl.TLExpr, prog: SourceProgram) -> tl.TLExpr:
    if prog.is_iface_type(t):
        spine = tl.ctor_spine(v)
        if spine is None or spine[0] != tl.tuple_ctor(2) or len(spine[1]) != 2:
            raise ShapeError(f"value at interface type {show_type(t)} is not a pair: {print_tl(v)}")
        return erase_value(spine[1][0])
    return erase_value(v)


def erase_source(v: Expr) -> tl.TLExpr:
    """The erased TL value a source value should end up as (struct values are field tuples)."""
    if isinstance(v, (IntLit, BoolLit, StrLit)):
        return tl.Lit(v.value)
    if isinstance(v, StructLit):
        return tl.tuple_value(*(erase_source(a) for a in v.args))
    raise ShapeError(f"not a source value: {v!r}")


_LIT_KIND = {BaseKind.INT: (IntLit, "int"), BaseKind.BOOL: (BoolLit, "bool"), BaseKind.STRING: (StrLit, "str")}


def value_correspondence(v: Expr, V: tl.TLExpr, t: TypeExpr, prog: SourceProgram) -> bool:
    """Shape layer of the value relation; behaviour of dictionary entries is not checked."""
    if isinstance(t, Base):
        cls, kind = _LIT_KIND[t.kind]
        return isinstance(v, cls) and isinstance(V, tl.Lit) and V.kind == kind and V.value == v.value
    if not isinstance(t, Named):
        return False
    spine = tl.ctor_spine(V)
    if spine is None or not tl.is_tl_value(V):
        return False
    name, args = spine
    sd = prog.struct(t.name)
    if sd is not None:
        if not (isinstance(v, StructLit) and v.type == t and len(v.args) == len(sd.fields)):
            return False
        if name != tl.tuple_ctor(len(sd.fields)) or len(args) != len(sd.fields):
            return False
        eta = make_type_subst(sd.typarams, t.args)
        return all(value_correspondence(a, A, apply_type_subst(eta, f.type), prog)
                   for a, A, f in zip(v.args, args, sd.fields))
    if prog.iface(t.name) is None or not isinstance(v, StructLit):
        return False
    if name != tl.tuple_ctor(2) or len(args) != 2:
        return False
    u, dictionary = args
    try:
        tr = Translator(prog)
        specs = tr.method_specs(t)
        if tr.subtype_coerce({}, v.type, t) in (None, IDENTITY):
            return False
    except CheckError:
        return False
    dspine = tl.ctor_spine(dictionary)
    if dspine is None or dspine[0] != tl.tuple_ctor(len(specs)) or len(dspine[1]) != len(specs):
        return False
    if not all(isinstance(w, tl.Lam) for w in dspine[1]):
        return False
    return value_correspondence(v, u, v.type, prog)


# ---------------------------------------------------------------------------
# Reports


def outcome_json(o: Outcome, source: bool) -> dict:
    if isinstance(o, Value):
        return {"kind": "value", "steps": o.steps,
                "value": show_value(o.value) if source else print_tl(o.value)}
    if isinstance(o, StepLimit):
        return {"kind": "step_limit", "steps": o.steps}
    return {"kind": "stuck", "steps": o.steps, "diagnostic": o.diagnostic}


def outcome_text(o: Outcome | None, source: bool) -> str:
    if o is None:
        return "-"
    d = outcome_json(o, source)
    if d["kind"] == "value":
        return f"{d['value']} ({d['steps']} steps)"
    if d["kind"] == "step_limit":
        return f"STEP_LIMIT ({d['steps']} steps)"
    return f"STUCK: {d['diagnostic']} ({d['steps']} steps)"


@dataclass
class StrategyEntry:
    strategy: Strategy
    main_type: TypeExpr | None = None
    outcome: Outcome | None = None
    correspondence: bool | None = None
    erased_equal: bool | None = None
    verdict: str = "FAIL"
    note: str = ""
    error: list | None = None

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy.label(),
            "seed": self.strategy.seed,
            "main_type": None if self.main_type is None else show_type(self.main_type),
            "verdict": self.verdict,
            "note": self.note,
            "target": None if self.outcome is None else outcome_json(self.outcome, source=False),
            "correspondence": self.correspondence,
            "erased_equal": self.erased_equal,
            "errors": self.error,
        }


@dataclass
class DiffReport:
    name: str
    source: Outcome
    entries: list[StrategyEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.verdict == "PASS" for e in self.entries)

    def to_json(self) -> dict:
        return {
            "program": self.name,
            "verdict": "PASS" if self.passed else "FAIL",
            "source": outcome_json(self.source, source=True),
            "strategies": [e.to_json() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}",
                 f"  source: {outcome_text(self.source, True)}"]
        for e in self.entries:
            extra = f" [{e.note}]" if e.note else ""
            if e.error:
                lines.append(f"  {e.strategy.label()}: {e.verdict} translation error: {'; '.join(e.error)}")
            else:
                lines.append(f"  {e.strategy.label()}: {e.verdict}{extra} target: {outcome_text(e.outcome, False)}")
        return "\n".join(lines)


def differential_run(p: SourceProgram, strategies: Sequence[Strategy] = (DIRECT,),
                     max_steps: int = DEFAULT_MAX_STEPS, name: str = "program",
                     translator: type[Translator] = Translator) -> DiffReport:
    src = eval_source(p, max_steps)
    report = DiffReport(name, src)
    for s in strategies:
        entry = StrategyEntry(s)
        report.entries.append(entry)
        try:
            prog, main_type = translator(p, s).translate_program()
        except TranslationFailed as err:
            entry.error = [str(d) for d in err.diagnostics]
            entry.verdict = "ERROR"
            continue
        entry.main_type = main_type
        out = tl.eval_tl(prog, max_steps)
        entry.outcome = out
        if isinstance(src, Value) and isinstance(out, Value):
            entry.correspondence = value_correspondence(src.value, out.value, main_type, p)
            try:
                entry.erased_equal = erase_at_type(main_type, out.value, p) == erase_source(src.value)
            except ShapeError:
                entry.erased_equal = False
            entry.verdict = "PASS" if entry.correspondence and entry.erased_equal else "FAIL"
        elif isinstance(src, StepLimit) and isinstance(out, StepLimit):
            entry.verdict = "PASS"
            entry.note = "budget-equivalent"
        else:
            entry.verdict = "FAIL"
            if isinstance(out, Stuck) or isinstance(src, Stuck):
                entry.note = "stuck"
            else:
                entry.note = "termination mismatch"
    return report


@dataclass
class CoherenceReport:
    name: str
    a: Strategy
    b: Strategy
    outcome_a: Outcome | None = None
    outcome_b: Outcome | None = None
    erased_a: tl.TLExpr | None = None
    erased_b: tl.TLExpr | None = None
    verdict: str = "FAIL"
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json(self) -> dict:
        show = lambda v: None if v is None else print_tl(v)  # noqa: E731
        return {
            "program": self.name,
            "verdict": self.verdict,
            "note": self.note,
            "a": {"strategy": self.a.label(), "seed": self.a.seed,
                  "target": None if self.outcome_a is None else outcome_json(self.outcome_a, False),
                  "erased": show(self.erased_a)},
            "b": {"strategy": self.b.label(), "seed": self.b.seed,
                  "target": None if self.outcome_b is None else outcome_json(self.outcome_b, False),
                  "erased": show(self.erased_b)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def text(self) -> str:
        extra = f" [{self.note}]" if self.note else ""
        def side(s, o, er):
            shown = print_tl(er) if er is not None else outcome_text(o, False)
            return f"  {s.label()}: {shown}"
        return "\n".join([f"{self.name}: {self.verdict}{extra}",
                          side(self.a, self.outcome_a, self.erased_a),
                          side(self.b, self.outcome_b, self.erased_b)])


def coherence_check(p: SourceProgram, a: Strategy, b: Strategy,
                    max_steps: int = DEFAULT_MAX_STEPS, name: str = "program",
                    translator: type[Translator] = Translator) -> CoherenceReport:
    rep = CoherenceReport(name, a, b)
    results = []
    for s in (a, b):
        try:
            prog, t = translator(p, s).translate_program()
        except TranslationFailed as err:
            rep.verdict = "ERROR"
            rep.note = f"{s.label()}: {err}"
            return rep
        results.append((t, tl.eval_tl(prog, max_steps)))
    (ta, oa), (tb, ob) = results
    rep.outcome_a, rep.outcome_b = oa, ob
    if isinstance(oa, Value) and isinstance(ob, Value):
        try:
            rep.erased_a = erase_at_type(ta, oa.value, p)
            rep.erased_b = erase_at_type(tb, ob.value, p)
        except ShapeError as err:
            rep.note = str(err)
            return rep
        rep.verdict = "PASS" if rep.erased_a == rep.erased_b else "FAIL"
    elif isinstance(oa, StepLimit) and isinstance(ob, StepLimit):
        rep.verdict = "PASS"
        rep.note = "budget-equivalent"
    else:
        rep.note = "outcome kinds differ"
    return rep
