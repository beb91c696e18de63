"""Grammar and input corpora shared by the test modules.

Everything here is deterministic: random corpora come from fixed seeds so a
failure can be reproduced by index.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from lrpeg import load_grammar
from lrpeg.grammar import (
    ANY, EMPTY, Choice, Grammar, Nonterminal, Not, Sequence, Star, Terminal, well_formed,
)

# -- worked examples and their expected results ------------------------------

SUM = "E <- E '+' 'n' / 'n'"
MUL_SUB = """
E <- M '+' E / M
M <- M '-' 'n' / 'n'
"""
LVALUE = """
L <- P '.x' / 'x'
P <- P '(n)' / L
"""
RIGHT_PLUS = "E <- E^1 '+' E^1 / 'n'"
LEFT_PLUS = "E <- E^1 '+' E^2 / 'n'"
PRECEDENCE = "E <- E^1 '+' E^2 / E^2 '*' E^2 / 'n'"
MACHINE = """
A <- !'a' . B / 'a' A
B <- 'b'
"""
NULLABLE_LR = """
S <- X
X <- X Y / %empty
Y <- 'x'
"""


@dataclass(frozen=True)
class WorkedCase:
    source: str
    text: str
    brackets: str | None   # None: only full consumption is checked
    note: str


WORKED_CASES = [
    WorkedCase(SUM, "n+n+n", "E[E[E[n]+n]+n]", "sum"),
    WorkedCase(MUL_SUB, "n+n+n", "E[M[n]+E[M[n]+E[M[n]]]]", "right-recursive sum"),
    WorkedCase(MUL_SUB, "n-n-n", "E[M[M[M[n]-n]-n]]", "left-recursive difference"),
    WorkedCase(LVALUE, "x(n)(n).x(n).x", None, "mutual l-values"),
    WorkedCase(RIGHT_PLUS, "n+n+n", "E[E[n]+E[E[n]+E[n]]]", "levels, right assoc"),
    WorkedCase(LEFT_PLUS, "n+n+n", "E[E[E[n]+E[n]]+E[n]]", "levels, left assoc"),
    WorkedCase(PRECEDENCE, "n*n*n", "E[E[n]*E[E[n]*E[n]]]", "product"),
    WorkedCase(PRECEDENCE, "n*n+n", "E[E[E[n]*E[n]]+E[n]]", "product then sum"),
    WorkedCase(PRECEDENCE, "n+n*n", "E[E[n]+E[E[n]*E[n]]]", "sum then product"),
]

BOUND_SUBJECTS = ["n", "n+n", "n+n+n"]
# remainders for E^0 .. E^6; None means the bounded match fails
BOUND_TABLE = [
    [None, "", "", "", "", "", ""],
    [None, "+n", "", "+n", "", "+n", ""],
    [None, "+n+n", "+n", "", "+n+n", "+n", ""],
]


def worked_grammars() -> list[tuple[str, Grammar, list[str]]]:
    """Worked-example grammars with a handful of inputs each (used for differential runs)."""
    extra = {
        SUM: ["", "n", "n+", "n+n", "n+n+n", "+n", "n+n+n+n+n"],
        MUL_SUB: ["n", "n+n", "n-n", "n-n+n-n", "n+n-n", "n-", ""],
        LVALUE: ["x", "x.x", "x(n)", "x(n).x", "x(n)(n).x(n).x", "x(n)(n).x", "(n)"],
        RIGHT_PLUS: ["n", "n+n", "n+n+n", "n+n+n+n", "+"],
        LEFT_PLUS: ["n", "n+n", "n+n+n", "n+n+n+n", ""],
        PRECEDENCE: ["n*n*n", "n*n+n", "n+n*n", "n+n+n*n*n+n", "n*", "*n"],
        MACHINE: ["aacb", "ab", "cb", "acb", "aaab", "", "b"],
        NULLABLE_LR: ["", "x", "xx", "xxxxx", "xy"],
    }
    return [(src, load_grammar(src), inputs) for src, inputs in extra.items()]


# -- hand-written well-formed, non-left-recursive grammars --------------------

HANDWRITTEN_WF = [
    # balanced parentheses
    "S <- '(' S ')' S / %empty",
    # a^n b^n
    "S <- 'a' S 'b' / %empty",
    # right-recursive sums with a star tail
    "E <- T ('+' T)*\nT <- 'n' / '(' E ')'",
    # identifier-ish: letter then letters/digits
    "I <- L (L / D)*\nL <- 'a' / 'b'\nD <- '0' / '1'",
    # keyword versus identifier with a negative lookahead
    "K <- 'if' !(L) / L L*\nL <- 'i' / 'f' / 'x'",
    # any-symbol skipping up to a terminator
    "C <- '/*' (!'*/' .)* '*/'",
    # ordered choice shadowing: 'a' wins over 'ab'
    "S <- 'a' / 'ab'",
    # the machine example
    MACHINE.strip(),
    # nested predicates
    "S <- !!'a' 'a' S / !.",
    # comma-separated list
    "L <- 'x' (',' 'x')* / %empty",
    # right-recursive arithmetic with two levels
    "E <- T '+' E / T\nT <- F '*' T / F\nF <- 'n' / '(' E ')'",
    # palindromes over a, b (greedy, so PEG-specific)
    "P <- 'a' P 'a' / 'b' P 'b' / 'a' / 'b' / %empty",
]

HANDWRITTEN_INPUTS = {
    0: ["", "()", "(())()", "(()", "())", "()()()"],
    1: ["", "ab", "aabb", "aab", "abb", "ba"],
    2: ["n", "n+n", "(n+n)+n", "n+", "(n", "n+(n+(n))"],
    3: ["a", "ab01", "0a", "ba1b0", ""],
    4: ["if", "ifx", "fix", "x", "i"],
    5: ["/**/", "/* x */", "/* *", "/* a */ b", "x"],
    6: ["a", "ab", "b", ""],
    7: ["aacb", "ab", "cb", "acb", "b"],
    8: ["", "a", "aaa", "ab", "b"],
    9: ["", "x", "x,x", "x,", "x,x,x"],
    10: ["n", "n+n*n", "(n+n)*n", "n*", "(n*(n+n))"],
    11: ["", "a", "aba", "abba", "abab", "bab"],
}


# -- random grammars ----------------------------------------------------------

NAMES = "ABCDEF"


class GrammarGenerator:
    """Random closed grammars over at most three symbols and six rules.

    Rule bodies are expression trees of depth at most ``max_depth``.  With
    ``force_lr`` some rules are given a directly left-recursive first
    alternative; with ``levels`` nonterminal occurrences may carry levels 1-3.
    """

    def __init__(self, seed: int, *, max_rules=6, max_depth=5, levels=False,
                 force_lr=False, empty_weight=1):
        self.rng = random.Random(seed)
        self.max_rules = max_rules
        self.max_depth = max_depth
        self.levels = levels
        self.force_lr = force_lr
        self.empty_weight = empty_weight

    def grammar(self) -> Grammar:
        rng = self.rng
        alphabet = "abc"[: rng.randint(1, 3)]
        names = NAMES[: rng.randint(1, self.max_rules)]
        rules = {}
        for name in names:
            if self.force_lr and rng.random() < 0.5:
                depth = self.max_depth - 2
                head = Sequence(self._nt(name), self.expr(alphabet, names, depth))
                rules[name] = Choice(head, self.expr(alphabet, names, depth))
            else:
                rules[name] = self.expr(alphabet, names, self.max_depth)
        return Grammar.from_rules(rules)

    def _nt(self, name):
        level = self.rng.choice((1, 1, 1, 2, 3)) if self.levels else 1
        return Nonterminal(name, level)

    def expr(self, alphabet, names, depth):
        rng = self.rng
        if depth <= 1 or rng.random() < 0.35:
            kind = rng.choices(("t", "n", "e", "any"), (5, 3, self.empty_weight, 1))[0]
            if kind == "t":
                return Terminal(rng.choice(alphabet))
            if kind == "n":
                return self._nt(rng.choice(names))
            return EMPTY if kind == "e" else ANY
        kind = rng.choices(("seq", "alt", "star", "not"), (4, 4, 1, 1))[0]
        if kind == "seq":
            return Sequence(self.expr(alphabet, names, depth - 1),
                            self.expr(alphabet, names, depth - 1))
        if kind == "alt":
            return Choice(self.expr(alphabet, names, depth - 1),
                          self.expr(alphabet, names, depth - 1))
        body = self.expr(alphabet, names, depth - 1)
        return Star(body) if kind == "star" else Not(body)


def expr_depth(e) -> int:
    if isinstance(e, (Sequence, Choice)):
        a, b = (e.left, e.right) if isinstance(e, Sequence) else (e.first, e.second)
        return 1 + max(expr_depth(a), expr_depth(b))
    if isinstance(e, (Star, Not)):
        return 1 + expr_depth(e.body)
    return 1


def random_wf_grammars(count=200, seed=1) -> list[Grammar]:
    """Closed, well-formed grammars without left recursion (rejection sampled)."""
    gen = GrammarGenerator(seed)
    out = []
    while len(out) < count:
        g = gen.grammar()
        report = well_formed(g)
        if report.well_formed and not report.left_recursive:
            out.append(g)
    return out


def random_general_grammars(count=200, seed=2) -> list[Grammar]:
    """Closed grammars of any kind; about half contain forced left recursion."""
    plain = GrammarGenerator(seed, levels=True, empty_weight=2)
    forced = GrammarGenerator(seed + 1000, levels=True, force_lr=True, empty_weight=2)
    return [(forced if i % 2 else plain).grammar() for i in range(count)]


def random_inputs(grammar: Grammar, count=20, max_len=8, seed=0) -> list[str]:
    """``count`` distinct-ish strings over the grammar's alphabet plus one stray symbol."""
    rng = random.Random(seed)
    symbols = sorted(grammar.alphabet) or ["a"]
    pool = symbols * 3 + ["z"]
    out = [""]
    while len(out) < count:
        n = rng.randint(1, max_len)
        text = "".join(rng.choice(pool) for _ in range(n))
        if text not in out:
            out.append(text)
    return out


def long_inputs(grammar: Grammar, count=20, max_len=50, seed=0) -> list[str]:
    """Inputs spread over lengths 0..max_len, including one of each extreme."""
    rng = random.Random(seed)
    symbols = sorted(grammar.alphabet) or ["a"]
    out = ["", "".join(rng.choice(symbols) for _ in range(max_len))]
    while len(out) < count:
        n = rng.randint(1, max_len)
        text = "".join(rng.choice(symbols) for _ in range(n))
        if text not in out:
            out.append(text)
    return out


def padded_inputs(grammar: Grammar, base: list[str], count=20, seed=0) -> list[str]:
    """``base`` followed by distinct random inputs up to ``count`` in total."""
    out = list(dict.fromkeys(base))
    for text in random_inputs(grammar, count=count + len(out), seed=seed):
        if len(out) >= count:
            break
        if text not in out:
            out.append(text)
    return out
