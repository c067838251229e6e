"""Deliberately broken translators used to check that the differential harness has teeth."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import tl
from .equivalence import differential_run
from .source_eval import DEFAULT_MAX_STEPS
from .syntax import SourceProgram
from .translate import DIRECT, Translator


class WrongDictIndex(Translator):
    """call-iface picks the next dictionary entry instead of the right one."""

    def dict_index(self, j: int, q: int) -> int:
        return (j + 1) % q


class DroppedBoundCoercion(Translator):
    """type-inst-checked forgets the last bound coercion."""

    def bounds_tuple(self, coercions: tuple) -> tuple:
        return coercions[:-1]


class PermutedPi(Translator):
    """coerce-iface-iface shifts every π index by one."""

    def permutation(self, pi: list[int], n: int) -> list[int]:
        return [(i + 1) % n for i in pi]


class SwappedQuadruple(Translator):
    """call-struct swaps receiver coercions with method coercions."""

    def quadruple(self, recv_coercions, recv, meth_coercions, args):
        return tl.tup(meth_coercions, recv, recv_coercions, args)


class IdentityStructIface(Translator):
    """coerce-struct-iface returns the value unchanged, with no dictionary."""

    def struct_iface_value(self, x: str, entries: list):
        return tl.PatLam(tl.PVar(x), tl.Var(x))


MUTANTS: dict[str, type[Translator]] = {
    "wrong-dict-index": WrongDictIndex,
    "dropped-bound-coercion": DroppedBoundCoercion,
    "permuted-pi": PermutedPi,
    "swapped-quadruple": SwappedQuadruple,
    "identity-struct-iface": IdentityStructIface,
}


@dataclass(frozen=True)
class MutationResult:
    mutant: str
    killed: bool
    killers: tuple[str, ...]


def run_mutant(name: str, programs: Iterable[tuple[str, SourceProgram]],
               strategies=(DIRECT,), max_steps: int = DEFAULT_MAX_STEPS) -> MutationResult:
    """A mutant is killed when some program's differential run ends in FAIL."""
    cls = MUTANTS[name]
    killers = []
    for pname, p in programs:
        rep = differential_run(p, strategies, max_steps, pname, translator=cls)
        if any(e.verdict == "FAIL" for e in rep.entries):
            killers.append(pname)
    return MutationResult(name, bool(killers), tuple(killers))
