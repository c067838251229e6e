"""Corpus cases: ``.fgg`` files whose header comments state the expected outcome.

Recognised headers (anywhere in the leading ``//`` comment block)::

    // expect: <value> | STEP_LIMIT | TYPE_ERROR(Code)
    // strategies: direct, random:3, direct@Format
    // max-steps: 5000
    // base-types: off
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .equivalence import DiffReport, differential_run
from .parser import parse_expr, parse_program, parse_type
from .source_eval import DEFAULT_MAX_STEPS, StepLimit, Value
from .syntax import Expr, SourceProgram
from .translate import Strategy, TranslationFailed, translate_program

_HEADER = re.compile(r"//\s*([a-z-]+):\s*(.*?)\s*$")
_TYPE_ERROR = re.compile(r"TYPE_ERROR\((\w+)\)$")


def parse_strategy(text: str) -> Strategy:
    """``direct`` or ``random:SEED``, optionally followed by ``@TYPE``."""
    text = text.strip()
    main_type = None
    if "@" in text:
        text, ty = text.split("@", 1)
        main_type = parse_type(ty.strip())
    text = text.strip()
    if text == "direct":
        return Strategy(None, main_type)
    m = re.fullmatch(r"random:(-?\d+)", text)
    if m:
        return Strategy(int(m.group(1)), main_type)
    raise ValueError(f"bad strategy {text!r}; expected direct or random:SEED")


@dataclass(frozen=True)
class Expectation:
    kind: str  # "value", "step_limit" or "type_error"
    value: Expr | None = None
    code: str | None = None
    text: str = ""


def parse_expectation(text: str) -> Expectation:
    if text == "STEP_LIMIT":
        return Expectation("step_limit", text=text)
    m = _TYPE_ERROR.match(text)
    if m:
        return Expectation("type_error", code=m.group(1), text=text)
    return Expectation("value", value=parse_expr(text), text=text)


@dataclass(frozen=True)
class CorpusCase:
    name: str
    path: Path
    text: str
    expected: Expectation
    strategies: tuple[Strategy, ...] = (Strategy(),)
    max_steps: int = DEFAULT_MAX_STEPS
    base_types: bool = True

    def program(self) -> SourceProgram:
        return parse_program(self.text, self.base_types)


def load_case(path: Path, default_max_steps: int = DEFAULT_MAX_STEPS) -> CorpusCase:
    text = path.read_text(encoding="utf-8")
    headers: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if not line.startswith("//"):
            break
        m = _HEADER.match(line)
        if m:
            headers[m.group(1)] = m.group(2)
    if "expect" not in headers:
        raise ValueError(f"{path}: missing '// expect:' header")
    strategies = tuple(parse_strategy(s) for s in headers.get("strategies", "direct").split(","))
    return CorpusCase(
        name=path.stem,
        path=path,
        text=text,
        expected=parse_expectation(headers["expect"]),
        strategies=strategies,
        max_steps=int(headers.get("max-steps", default_max_steps)),
        base_types=headers.get("base-types", "on") != "off",
    )


def default_corpus_dir() -> Path:
    return Path(str(resources.files("fggtrans") / "corpus"))


def load_corpus(directory: Path | None = None, default_max_steps: int = DEFAULT_MAX_STEPS) -> list[CorpusCase]:
    directory = directory or default_corpus_dir()
    return [load_case(p, default_max_steps) for p in sorted(Path(directory).glob("*.fgg"))]


@dataclass
class CaseResult:
    case: CorpusCase
    passed: bool
    detail: str
    report: DiffReport | None = None
    codes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case.name,
            "expected": self.case.expected.text,
            "verdict": "PASS" if self.passed else "FAIL",
            "detail": self.detail,
            "diagnostics": self.codes,
            "diff": None if self.report is None else self.report.to_json(),
        }


def run_case(case: CorpusCase, max_steps: int | None = None) -> CaseResult:
    budget = case.max_steps if max_steps is None else max_steps
    try:
        p = case.program()
    except ValueError as err:
        return CaseResult(case, False, f"parse error: {err}")
    exp = case.expected
    if exp.kind == "type_error":
        try:
            translate_program(p)
        except TranslationFailed as err:
            codes = err.codes
            ok = set(codes) == {exp.code}
            return CaseResult(case, ok, f"rejected with {', '.join(codes)}", codes=codes)
        return CaseResult(case, False, "accepted, expected a type error")
    report = differential_run(p, case.strategies, budget, case.name)
    src = report.source
    if exp.kind == "value":
        if not (isinstance(src, Value) and src.value == exp.value):
            return CaseResult(case, False, f"source outcome differs from {exp.text}", report)
    elif not isinstance(src, StepLimit):
        return CaseResult(case, False, "source finished within the step budget", report)
    if not report.passed:
        return CaseResult(case, False, "differential run failed", report)
    return CaseResult(case, True, "ok", report)
