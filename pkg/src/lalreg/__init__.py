"""Polynomial step bounds for a stratified affine lambda-calculus with regions."""

from .cost import VerifyReport, bound, infer_weight, verify
from .kernel import BACKEND
from .machine import eval, trace
from .syntax import parse, parse_term
from .typesystem import TypingError, check, erase

__all__ = ["BACKEND", "TypingError", "VerifyReport", "bound", "check", "erase", "eval",
           "infer_weight", "parse", "parse_term", "trace", "verify"]
__version__ = "0.1.0"
