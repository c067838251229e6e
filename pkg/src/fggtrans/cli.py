"""Command-line driver: ``fggtrans {check,run,compile,run-tl,diff,cohere,corpus}``.

Exit codes: 0 pass, 1 semantic failure, 2 type or parse error, 3 usage error.
Reports go to stdout and diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import tl
from .corpus import load_corpus, parse_strategy, run_case
from .equivalence import coherence_check, differential_run, outcome_json, outcome_text
from .parser import ParseError, parse_program, parse_type, show_expr
from .source_eval import DEFAULT_MAX_STEPS, Stuck, eval_source
from .syntax import SourceProgram, uses_base_forms, validate_restrictions
from .tl_text import TLSyntaxError, parse_program as parse_tl_program, print_program, print_tl
from .translate import Strategy, TranslationFailed, translate_typed

EXIT_OK, EXIT_FAIL, EXIT_TYPE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_steps() -> int:
    env = os.environ.get("FGG_MAX_STEPS")
    if env is None:
        return DEFAULT_MAX_STEPS
    try:
        n = int(env)
    except ValueError:
        raise UsageError(f"FGG_MAX_STEPS must be a positive integer, got {env!r}") from None
    if n <= 0:
        raise UsageError("FGG_MAX_STEPS must be positive")
    return n


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def _load(path: str, args) -> SourceProgram:
    return parse_program(_read(path), base_types=args.base_types == "on")


def _strategy(args, text: str) -> Strategy:
    main_type = parse_type(args.main_type) if getattr(args, "main_type", None) else None
    if args.strategy == "direct":
        if args.seed is not None:
            raise UsageError("--seed only makes sense with --strategy random")
        return Strategy(None, main_type)
    seed = args.seed
    if seed is None:
        seed = zlib.crc32(text.encode("utf-8"))
        _err(f"seed: {seed} (derived from the source text)")
    return Strategy(seed, main_type)


def _steps(args) -> int:
    return args.max_steps if args.max_steps is not None else _default_steps()


def _restrictions_ok(p: SourceProgram) -> bool:
    bad = validate_restrictions(p)
    for v in bad:
        _err(f"error: {v}")
    return not bad


def cmd_check(args) -> int:
    status = EXIT_OK
    results = []
    for path in args.files:
        p = _load(path, args)
        try:
            translate_typed(p)
            results.append({"file": path, "ok": True, "diagnostics": []})
            if args.format == "text":
                print(f"{path}: ok")
        except TranslationFailed as err:
            status = EXIT_TYPE
            results.append({"file": path, "ok": False, "diagnostics": [str(d) for d in err.diagnostics]})
            for d in err.diagnostics:
                _err(f"{path}: error: {d}")
    if args.format == "json":
        print(json.dumps(results, indent=2))
    return status


def cmd_run(args) -> int:
    p = _load(args.file, args)
    if not _restrictions_ok(p):
        return EXIT_TYPE
    if not p.base_types and uses_base_forms(p):
        _err("error: BaseTypesDisabled: base forms used in pure mode")
        return EXIT_TYPE
    trace = (lambda n, e: print(f"{n}: {show_expr(e)}")) if args.trace else None
    out = eval_source(p, _steps(args), trace)
    return _report_outcome(out, args, source=True)


def _report_outcome(out, args, source: bool) -> int:
    if args.format == "json":
        print(json.dumps(outcome_json(out, source), indent=2, ensure_ascii=False))
    else:
        print(outcome_text(out, source))
    if isinstance(out, Stuck):
        _err(f"stuck: {out.diagnostic}")
        return EXIT_FAIL
    return EXIT_OK


def cmd_compile(args) -> int:
    text = _read(args.file)
    p = parse_program(text, base_types=args.base_types == "on")
    s = _strategy(args, text)
    try:
        prog, _ = translate_typed(p, s)
    except TranslationFailed as err:
        for d in err.diagnostics:
            _err(f"{args.file}: error: {d}")
        return EXIT_TYPE
    out = print_program(prog)
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_run_tl(args) -> int:
    prog = parse_tl_program(_read(args.file))
    trace = (lambda n, e: print(f"{n}: {print_tl(e)}")) if args.trace else None
    try:
        out = tl.eval_tl(prog, _steps(args), trace)
    except ValueError as err:
        _err(f"error: {err}")
        return EXIT_TYPE
    return _report_outcome(out, args, source=False)


def _translation_errors(report) -> bool:
    return any(e.verdict == "ERROR" for e in report.entries)


def cmd_diff(args) -> int:
    text = _read(args.file)
    p = parse_program(text, base_types=args.base_types == "on")
    strategies = [_strategy(args, text)] + [parse_strategy(s) for s in args.also]
    rep = differential_run(p, strategies, _steps(args), Path(args.file).stem)
    print(rep.dumps() if args.format == "json" else rep.text())
    if _translation_errors(rep):
        for e in rep.entries:
            for d in e.error or []:
                _err(f"{args.file}: error: {d}")
        return EXIT_TYPE
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_cohere(args) -> int:
    text = _read(args.file)
    p = parse_program(text, base_types=args.base_types == "on")
    main_type = parse_type(args.main_type) if args.main_type else None
    a = parse_strategy(args.a) if args.a else Strategy(None, main_type)
    if args.b:
        b = parse_strategy(args.b)
    else:
        seed = args.seed if args.seed is not None else zlib.crc32(text.encode("utf-8"))
        b = Strategy(seed, main_type)
    rep = coherence_check(p, a, b, _steps(args), Path(args.file).stem)
    print(rep.dumps() if args.format == "json" else rep.text())
    if rep.verdict == "ERROR":
        _err(f"error: {rep.note}")
        return EXIT_TYPE
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_corpus(args) -> int:
    cases = load_corpus(Path(args.dir) if args.dir else None, _default_steps())
    if not cases:
        raise UsageError("no .fgg files found")
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda c: run_case(c, args.max_steps), cases))
    passed = sum(r.passed for r in results)
    if args.format == "json":
        print(json.dumps({"passed": passed, "total": len(results),
                          "cases": [r.to_json() for r in results]}, indent=2, ensure_ascii=False))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.case.name}: {r.detail}")
        print(f"{passed}/{len(results)} cases passed")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgParser(prog="fggtrans", description="FGG⁻ type checker, dictionary-passing compiler and test harness")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    def common(sp, strategy=False):
        sp.add_argument("--max-steps", type=int, default=None, help="step budget (default: $FGG_MAX_STEPS or 1000000)")
        sp.add_argument("--base-types", choices=["on", "off"], default="on")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        if strategy:
            sp.add_argument("--strategy", choices=["direct", "random"], default="direct")
            sp.add_argument("--seed", type=int, default=None)
            sp.add_argument("--main-type", default=None, metavar="TYPE")

    sp = sub.add_parser("check", help="check restrictions and well-formedness")
    sp.add_argument("files", nargs="+")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("run", help="evaluate with the source interpreter")
    sp.add_argument("file")
    sp.add_argument("--trace", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("compile", help="translate to TL and print the s-expression program")
    sp.add_argument("file")
    sp.add_argument("-o", "--output", default=None)
    common(sp, strategy=True)
    sp.set_defaults(fn=cmd_compile)

    sp = sub.add_parser("run-tl", help="evaluate a serialized TL program")
    sp.add_argument("file")
    sp.add_argument("--trace", action="store_true")
    common(sp)
    sp.set_defaults(fn=cmd_run_tl)

    sp = sub.add_parser("diff", help="differential run of source against translation")
    sp.add_argument("file")
    sp.add_argument("--also", action="append", default=[], metavar="SPEC",
                    help="extra strategy such as random:3 or direct@Format (repeatable)")
    common(sp, strategy=True)
    sp.set_defaults(fn=cmd_diff)

    sp = sub.add_parser("cohere", help="compare erased results of two translations")
    sp.add_argument("file")
    sp.add_argument("--a", default=None, metavar="SPEC", help="first strategy (default: direct)")
    sp.add_argument("--b", default=None, metavar="SPEC", help="second strategy (default: random)")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--main-type", default=None, metavar="TYPE")
    common(sp)
    sp.set_defaults(fn=cmd_cohere)

    sp = sub.add_parser("corpus", help="run every corpus case")
    sp.add_argument("dir", nargs="?", default=None)
    sp.add_argument("--jobs", type=int, default=4)
    common(sp)
    sp.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    args = build_parser().parse_args(argv)
    if args.max_steps is not None and args.max_steps <= 0:
        _err("error: --max-steps must be positive")
        return EXIT_USAGE
    try:
        return args.fn(args)
    except UsageError as err:
        _err(f"error: {err}")
        return EXIT_USAGE
    except (ParseError, TLSyntaxError) as err:
        _err(f"parse error: {err}")
        return EXIT_TYPE
    except ValueError as err:
        _err(f"error: {err}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
