"""Intensional PCF: a modal lambda calculus with intensional recursion."""

from .syntax import (
    App, Arrow, BOOL, Box, BoxTerm, Const, EMPTY, FILE, FixBox, Ground, Lam,
    LetBox, NAT, NatLit, PrimOp, Term, Type, TypingContext, Var,
    alpha_eq, boxed_free_vars, free_vars, substitute, unboxed_free_vars,
)
from .parser import ParseError, parse_program, parse_term, parse_type
from .printer import print_term, print_type
from .checker import Derivation, TypeCheckError, check, infer
from .reduction import Rule, Step, Trace, normalize, step_all, strategy_step
from .ops import IntensionalOp, Registry, make_registry

__version__ = "0.1.0"
