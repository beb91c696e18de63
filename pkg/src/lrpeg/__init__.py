"""PEG parsing with bounded left recursion and precedence levels."""

from .grammar import (
    ANY, EMPTY, AnalysisReport, Any, Choice, Diagnostic, Empty, Expr, Grammar,
    Nonterminal, Not, Sequence, Star, Terminal, choice, desugar_stars,
    left_recursive_nonterminals, lit, nt, nullable, seq, validate_closed,
    well_formed,
)
from .interpreter import (
    DepthLimitExceeded, EngineError, Match, StepBudgetExceeded, match, parse,
)
from .text import GrammarError, format_grammar, load_grammar, parse_grammar
from .tree import Leaf, Node, from_structured, leaves, to_brackets, to_structured
from .vm import Program, compile_grammar, disassemble, run

__version__ = "0.1.0"
