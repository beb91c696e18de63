"""Slow, simple evaluators used to cross-check the real engines.

``naive_match`` is plain PEG evaluation with no left-recursion support: a
nonterminal just evaluates its rule, a repetition recurses until its body
fails.  Left recursion (or a repetition of something nullable) therefore
recurses forever, which surfaces as :class:`DepthExceeded`.

``match_bounded`` evaluates ``A`` with at most ``n - 1`` nested left-recursive
uses, by threading a counter: a use of ``A`` at the position where the
enclosing bounded ``A`` started drops the bound by one, and bound zero fails.
A use of ``A`` at any other position picks its own bound by raising it from 1
until the match stops growing.
"""

from __future__ import annotations

import sys

from .grammar import (
    Any, Choice, Empty, Expr, Grammar, Nonterminal, Not, Sequence, Star, Terminal,
    leftmost_names,
)
from .interpreter import Match
from .tree import Leaf, Node


class DepthExceeded(Exception):
    """Evaluation nested deeper than the limit; most likely non-terminating."""


class _Recursion:
    def __init__(self, limit: int):
        self.limit = limit

    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, 4 * self.limit + 1000))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


def naive_match(grammar: Grammar, text: str, depth_limit: int = 2000,
                expr: Expr | None = None, pos: int = 0) -> Match | None:
    if expr is None:
        expr = grammar.start
    rules = grammar.rules
    synthetic = grammar.synthetic

    def ev(e: Expr, pos: int, depth: int) -> Match | None:
        if depth > depth_limit:
            raise DepthExceeded(f"evaluation deeper than {depth_limit}")
        depth += 1
        if isinstance(e, Empty):
            return Match(pos, ())
        if isinstance(e, Terminal):
            if pos < len(text) and text[pos] == e.symbol:
                return Match(pos + 1, (Leaf(e.symbol),))
            return None
        if isinstance(e, Any):
            if pos < len(text):
                return Match(pos + 1, (Leaf(text[pos]),))
            return None
        if isinstance(e, Nonterminal):
            r = ev(rules[e.name], pos, depth)
            if r is None:
                return None
            return Match(r.end, (Node(e.name, r.nodes, e.name in synthetic),))
        if isinstance(e, Sequence):
            a = ev(e.left, pos, depth)
            if a is None:
                return None
            b = ev(e.right, a.end, depth)
            if b is None:
                return None
            return Match(b.end, a.nodes + b.nodes)
        if isinstance(e, Choice):
            a = ev(e.first, pos, depth)
            return a if a is not None else ev(e.second, pos, depth)
        if isinstance(e, Not):
            return Match(pos, ()) if ev(e.body, pos, depth) is None else None
        if isinstance(e, Star):
            a = ev(e.body, pos, depth)
            if a is None:
                return Match(pos, ())
            b = ev(e, a.end, depth)
            if b is None:
                return None
            return Match(b.end, a.nodes + b.nodes)
        raise TypeError(f"not an expression: {e!r}")

    with _Recursion(depth_limit):
        try:
            return ev(expr, pos, 0)
        except RecursionError:
            raise DepthExceeded("Python recursion limit reached") from None


class UnsupportedGrammar(ValueError):
    pass


def check_bounded_grammar(grammar: Grammar, name: str):
    """Raise :class:`UnsupportedGrammar` unless ``name`` is the only
    left-recursive nonterminal and recurses on itself directly."""
    if name not in grammar.rules:
        raise UnsupportedGrammar(f"no rule for {name}")
    lr = grammar.left_recursive
    if name not in lr:
        raise UnsupportedGrammar(f"{name} is not left-recursive")
    if lr != {name}:
        others = ", ".join(sorted(lr - {name}))
        raise UnsupportedGrammar(f"other left-recursive nonterminals present: {others}")
    if name not in leftmost_names(grammar.rules[name], grammar):
        raise UnsupportedGrammar(f"{name} is only indirectly left-recursive")


def match_bounded(grammar: Grammar, name: str, n: int, text: str, pos: int = 0,
                  depth_limit: int = 5000) -> Match | None:
    """Evaluate ``name`` with bound ``n`` at ``pos``; bound 0 always fails."""
    if n < 0:
        raise ValueError("bound must be non-negative")
    check_bounded_grammar(grammar, name)
    rules = grammar.rules

    def bounded(p: int, bound: int, depth: int) -> Match | None:
        if bound == 0:
            return None
        r = ev(rules[name], p, (p, bound), depth)
        if r is None:
            return None
        return Match(r.end, (Node(name, r.nodes),))

    def auto(p: int, depth: int) -> Match | None:
        best = bounded(p, 1, depth)
        if best is None:
            return None
        bound = 1
        while True:
            bound += 1
            nxt = bounded(p, bound, depth)
            if nxt is None or nxt.end <= best.end:
                return best
            best = nxt

    def ev(e: Expr, p: int, frame: tuple[int, int], depth: int) -> Match | None:
        if depth > depth_limit:
            raise DepthExceeded(f"evaluation deeper than {depth_limit}")
        depth += 1
        if isinstance(e, Empty):
            return Match(p, ())
        if isinstance(e, Terminal):
            if p < len(text) and text[p] == e.symbol:
                return Match(p + 1, (Leaf(e.symbol),))
            return None
        if isinstance(e, Any):
            return Match(p + 1, (Leaf(text[p]),)) if p < len(text) else None
        if isinstance(e, Nonterminal):
            if e.name == name:
                start, bound = frame
                if p == start:
                    return bounded(p, bound - 1, depth)
                return auto(p, depth)
            r = ev(rules[e.name], p, frame, depth)
            if r is None:
                return None
            return Match(r.end, (Node(e.name, r.nodes),))
        if isinstance(e, Sequence):
            a = ev(e.left, p, frame, depth)
            if a is None:
                return None
            b = ev(e.right, a.end, frame, depth)
            return None if b is None else Match(b.end, a.nodes + b.nodes)
        if isinstance(e, Choice):
            a = ev(e.first, p, frame, depth)
            return a if a is not None else ev(e.second, p, frame, depth)
        if isinstance(e, Not):
            return Match(p, ()) if ev(e.body, p, frame, depth) is None else None
        if isinstance(e, Star):
            nodes: list = []
            while True:
                a = ev(e.body, p, frame, depth)
                if a is None or a.end == p:
                    return Match(p, tuple(nodes))
                nodes.extend(a.nodes)
                p = a.end
        raise TypeError(f"not an expression: {e!r}")

    with _Recursion(depth_limit):
        try:
            return bounded(pos, n, 0)
        except RecursionError:
            raise DepthExceeded("Python recursion limit reached") from None


def bound_table(grammar: Grammar, name: str, subjects: list[str], max_bound: int) -> list[list[str | None]]:
    """Remaining suffix (``None`` for failure) per subject and bound 0..max_bound."""
    rows = []
    for s in subjects:
        row = []
        for n in range(max_bound + 1):
            r = match_bounded(grammar, name, n, s)
            row.append(None if r is None else s[r.end:])
        rows.append(row)
    return rows


def select_bound(grammar: Grammar, name: str, text: str, pos: int = 0, limit: int = 10_000):
    """Raise the bound from 1 until the match stops growing.

    Returns ``(bound, match)``; the bound is the last one that grew the match,
    or ``(1, None)`` when bound 1 fails.
    """
    best = match_bounded(grammar, name, 1, text, pos)
    if best is None:
        return 1, None
    n = 1
    while n < limit:
        nxt = match_bounded(grammar, name, n + 1, text, pos)
        if nxt is None or nxt.end <= best.end:
            return n, best
        n, best = n + 1, nxt
    raise DepthExceeded(f"bound kept growing past {limit}")
