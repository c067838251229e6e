from __future__ import annotations

import pytest

from fggtrans.corpus import load_case, load_corpus, parse_expectation, parse_strategy, run_case
from fggtrans.parser import parse_type
from fggtrans.translate import Strategy


def test_parse_strategy():
    assert parse_strategy("direct") == Strategy()
    assert parse_strategy("random:3") == Strategy(3)
    assert parse_strategy(" random:0 @ Format ") == Strategy(0, parse_type("Format"))
    with pytest.raises(ValueError):
        parse_strategy("sometimes")


def test_parse_expectation():
    assert parse_expectation("STEP_LIMIT").kind == "step_limit"
    e = parse_expectation("TYPE_ERROR(DuplicateField)")
    assert (e.kind, e.code) == ("type_error", "DuplicateField")
    assert parse_expectation("Num{1}").kind == "value"


def test_headers(tmp_path):
    f = tmp_path / "c.fgg"
    f.write_text("// a comment\n// expect: 3\n// strategies: direct, random:2\n// max-steps: 9\n"
                 "// base-types: on\nfunc main() { _ = 1 + 2 }\n")
    c = load_case(f)
    assert c.strategies == (Strategy(), Strategy(2))
    assert c.max_steps == 9 and c.base_types
    assert run_case(c).passed


def test_missing_expectation(tmp_path):
    f = tmp_path / "c.fgg"
    f.write_text("func main() { _ = 1 }\n")
    with pytest.raises(ValueError):
        load_case(f)


def test_wrong_expected_code_fails(tmp_path):
    f = tmp_path / "c.fgg"
    f.write_text("// expect: TYPE_ERROR(DuplicateField)\ntype S struct {}\ntype S struct {}\nfunc main() { _ = 1 }\n")
    res = run_case(load_case(f))
    assert not res.passed and res.codes == ["DuplicateStruct"]


def test_shipped_corpus_passes():
    cases = load_corpus()
    assert len(cases) >= 15
    assert all(run_case(c).passed for c in cases)
