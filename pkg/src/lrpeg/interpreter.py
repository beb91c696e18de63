"""Reference evaluator for PEGs with bounded left recursion.

Every nonterminal call goes through the left-recursion machinery: the first
call of ``A`` at a position seeds a table entry with failure, evaluates the
rule body, and then keeps re-evaluating the body with the previous result
stored in the table for as long as the match grows.  Re-entrant calls of ``A``
at the same position read the stored result instead of recursing, subject to
the precedence-level guard.  Table entries live exactly as long as the call
that created them.

Repetitions use the terminating variant: an iteration that succeeds without
consuming input ends the loop and contributes nothing to the parse.
"""

from __future__ import annotations

import sys
import threading
from typing import NamedTuple

from .grammar import (
    Any, Choice, Empty, Expr, Grammar, Nonterminal, Not, Sequence, Star, Terminal,
)
from .tree import Leaf, Node


class Match(NamedTuple):
    end: int
    nodes: tuple


class EngineError(Exception):
    """The engine gave up; distinct from a parse failure."""


class StepBudgetExceeded(EngineError):
    pass


class DepthLimitExceeded(EngineError):
    pass


class MemoEntry:
    """Current bound's result for one ``(rule, position)`` key.

    ``index`` is the nesting depth of the call that owns the entry.  ``floor``
    is the shallowest entry read while evaluating that call, and ``touched``
    the rules called at the same position; both decide whether the final
    result may be reused elsewhere.
    """

    __slots__ = ("pos", "result", "level", "read", "index", "floor", "touched")

    def __init__(self, pos: int = 0, index: int = 0):
        self.pos = pos
        self.result: Match | None = None
        self.level = 0
        self.read = False
        self.index = index
        self.floor = index
        self.touched: set = set()

    def __repr__(self):
        return f"MemoEntry({self.result!r}, level={self.level})"


class Interpreter:
    """One parse's worth of state: the input, the memo table, and counters.

    ``skip_unread_rounds`` ends an increase-bound loop as soon as a round did
    not consult its own table entry: the next round would see identical
    inputs and therefore repeat the same result.  Turning it off gives the
    literal rule-by-rule behaviour, which is exponential on deep right
    recursion.

    ``reuse_results`` keeps the outcome of a finished call ``A`` at ``pos``
    when its evaluation read no table entry of an enclosing call.  A later
    call of ``A`` at ``pos`` with the same level reuses it, provided none of
    the rules the first evaluation called at ``pos`` is live now.  The
    evaluation only ever looks at live entries at its own position, so it
    would see exactly the same answers again.  This removes the exponential
    re-parsing of backtracking and of repeated increase-bound rounds without
    changing any result.
    """

    def __init__(self, grammar: Grammar, text: str, *, left_assoc_default: bool = False,
                 skip_unread_rounds: bool = True, reuse_results: bool = True,
                 max_steps: int | None = None, max_depth: int = 100_000):
        self.grammar = grammar
        self.rules = grammar.rules
        self.synthetic = grammar.synthetic
        self.text = text
        self.left_assoc_default = left_assoc_default
        self.skip_unread_rounds = skip_unread_rounds
        self.reuse_results = reuse_results
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.memo: dict[tuple[str, int], MemoEntry] = {}
        self.finished: dict[tuple[str, int, int], tuple] = {}
        self.active: list[MemoEntry] = []
        self.steps = 0
        self.depth = 0

    # hooks for property tests
    def on_enter(self, name: str, pos: int):
        pass

    def on_bound(self, name: str, pos: int, end: int):
        pass

    def on_exit(self, name: str, pos: int, result: Match | None):
        pass

    def match(self, expr: Expr, pos: int) -> Match | None:
        self.steps += 1
        if self.max_steps is not None and self.steps > self.max_steps:
            raise StepBudgetExceeded(f"more than {self.max_steps} evaluation steps")
        t = type(expr)
        if t is Terminal:
            if pos < len(self.text) and self.text[pos] == expr.symbol:
                return Match(pos + 1, (Leaf(expr.symbol),))
            return None
        if t is Sequence:
            first = self.match(expr.left, pos)
            if first is None:
                return None
            second = self.match(expr.right, first.end)
            if second is None:
                return None
            return Match(second.end, first.nodes + second.nodes)
        if t is Choice:
            first = self.match(expr.first, pos)
            if first is not None:
                return first
            return self.match(expr.second, pos)
        if t is Nonterminal:
            return self.call(expr.name, expr.level, pos)
        if t is Empty:
            return Match(pos, ())
        if t is Any:
            if pos < len(self.text):
                return Match(pos + 1, (Leaf(self.text[pos]),))
            return None
        if t is Not:
            if self.match(expr.body, pos) is None:
                return Match(pos, ())
            return None
        if t is Star:
            nodes: list = []
            while True:
                step = self.match(expr.body, pos)
                if step is None or step.end == pos:
                    return Match(pos, tuple(nodes))
                nodes.extend(step.nodes)
                pos = step.end
        raise TypeError(f"not an expression: {expr!r}")

    def _wrap(self, name: str, result: Match) -> Match:
        return Match(result.end, (Node(name, result.nodes, name in self.synthetic),))

    def call(self, name: str, level: int, pos: int) -> Match | None:
        key = (name, pos)
        active = self.active
        entry = self.memo.get(key)
        if entry is not None:
            entry.read = True
            # the caller is at ``pos`` too: positions only grow down the stack
            caller = active[-1]
            caller.touched.add(name)
            if entry.index < caller.floor:
                caller.floor = entry.index
            if entry.result is None:
                return None
            if level > entry.level or (level == entry.level and not self.left_assoc_default):
                return self._wrap(name, entry.result)
            return None

        if self.reuse_results:
            done = self.finished.get((name, pos, level))
            if done is not None:
                result, touched = done
                memo = self.memo
                if not any((other, pos) in memo for other in touched):
                    if active and active[-1].pos == pos:
                        active[-1].touched |= touched
                    return result

        try:
            body = self.rules[name]
        except KeyError:
            raise KeyError(f"undefined nonterminal {name}") from None
        if self.depth >= self.max_depth:
            raise DepthLimitExceeded(f"more than {self.max_depth} nested rule calls")
        entry = MemoEntry(pos, self.depth)
        entry.touched.add(name)
        self.memo[key] = entry
        active.append(entry)
        self.depth += 1
        self.on_enter(name, pos)
        result = None
        try:
            result = self.match(body, pos)
            if result is not None:
                entry.result = result
                entry.level = level
                self.on_bound(name, pos, result.end)
                while not (self.skip_unread_rounds and not entry.read):
                    entry.read = False
                    again = self.match(body, pos)
                    if again is None or again.end <= entry.result.end:
                        break
                    entry.result = again
                    self.on_bound(name, pos, again.end)
                result = self._wrap(name, entry.result)
            if self.reuse_results and entry.floor >= entry.index:
                self.finished[name, pos, level] = (result, frozenset(entry.touched))
            return result
        finally:
            del self.memo[key]
            active.pop()
            self.depth -= 1
            if active:
                parent = active[-1]
                if entry.floor < parent.floor:
                    parent.floor = entry.floor
                if parent.pos == pos:
                    parent.touched |= entry.touched
            self.on_exit(name, pos, result)

# inputs longer than this are parsed on a thread with a large stack
_DEEP_INPUT = 400
_DEEP_STACK = 512 * 1024 * 1024


def run_deep(fn, *args, **kwargs):
    """Call ``fn`` on a big-stack thread with a raised recursion limit."""
    box: dict = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 1_000_000))
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(_DEEP_STACK)
    try:
        worker = threading.Thread(target=target)
        worker.start()
    finally:
        threading.stack_size(old_size)
    worker.join()
    if "error" in box:
        raise box["error"]
    return box["value"]


def match(grammar: Grammar, expr: Expr, text: str, pos: int = 0, **options) -> Match | None:
    """Match ``expr`` against ``text`` at ``pos`` with a fresh memo table."""
    if not 0 <= pos <= len(text):
        raise ValueError(f"position {pos} outside input of length {len(text)}")
    interp = Interpreter(grammar, text, **options)
    return _evaluate(interp, interp.match, expr, pos)


def _evaluate(interp: Interpreter, fn, *args):
    def guarded():
        try:
            return fn(*args)
        except RecursionError:
            raise DepthLimitExceeded("Python recursion limit reached") from None

    if len(interp.text) > _DEEP_INPUT:
        return run_deep(guarded)
    return guarded()


def parse(grammar: Grammar, text: str, *, start: str | Expr | None = None,
          left_assoc_default: bool = False, **options) -> Match | None:
    """Match the grammar's start expression (or ``start``) at position 0.

    With ``left_assoc_default`` a start nonterminal is called at level 0, below
    every occurrence in the grammar, so that its own left-recursive uses pass
    the strict level guard while nested calls do not.
    """
    expr = grammar.start
    if isinstance(start, str):
        expr = Nonterminal(start)
    elif start is not None:
        expr = start
    interp = Interpreter(grammar, text, left_assoc_default=left_assoc_default, **options)
    if left_assoc_default and isinstance(expr, Nonterminal):
        return _evaluate(interp, interp.call, expr.name, 0, 0)
    return _evaluate(interp, interp.match, expr, 0)
