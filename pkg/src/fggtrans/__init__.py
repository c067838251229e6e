"""Reference compiler and differential-testing harness for FGG⁻.

FGG⁻ is Featherweight Generic Go without type assertions.  Programs are type
checked, translated by dictionary passing into an untyped λ-calculus (TL), and
both sides can be evaluated and compared.
"""

from .equivalence import coherence_check, differential_run, erase_at_type, erase_value, value_correspondence
from .parser import parse_program, print_program
from .source_eval import Outcome, StepLimit, Stuck, Value, eval_source
from .translate import Strategy, TranslationFailed, translate_program, translate_typed

__all__ = [
    "Outcome", "StepLimit", "Strategy", "Stuck", "TranslationFailed", "Value",
    "coherence_check", "differential_run", "erase_at_type", "erase_value", "eval_source",
    "parse_program", "print_program", "translate_program", "translate_typed", "value_correspondence",
]
