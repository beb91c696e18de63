"""Parsing-expression trees, grammars, and their static analyses.

Expressions are immutable dataclasses.  A :class:`Grammar` maps rule names to
expressions and carries a start expression.  The analyses here are pure
functions over grammars: closedness, nullability, well-formedness,
left-recursion detection, and rewriting repetitions into recursive rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Union


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Terminal:
    symbol: str

    def __post_init__(self):
        if len(self.symbol) != 1:
            raise ValueError(f"terminal must be a single symbol, got {self.symbol!r}")


@dataclass(frozen=True)
class Any:
    pass


@dataclass(frozen=True)
class Nonterminal:
    name: str
    level: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"precedence level must be >= 1, got {self.level}")


@dataclass(frozen=True)
class Sequence:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Choice:
    first: Expr
    second: Expr


@dataclass(frozen=True)
class Star:
    body: Expr


@dataclass(frozen=True)
class Not:
    body: Expr


Expr = Union[Empty, Terminal, Any, Nonterminal, Sequence, Choice, Star, Not]

EMPTY = Empty()
ANY = Any()


def lit(text: str) -> Expr:
    """A literal string as a left-grouped chain of single-symbol terminals."""
    if not text:
        return EMPTY
    return seq(*(Terminal(c) for c in text))


def seq(*items: Expr) -> Expr:
    if not items:
        return EMPTY
    result = items[0]
    for item in items[1:]:
        result = Sequence(result, item)
    return result


def choice(*items: Expr) -> Expr:
    if not items:
        raise ValueError("choice needs at least one alternative")
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Choice(item, result)
    return result


def nt(name: str, level: int = 1) -> Nonterminal:
    return Nonterminal(name, level)


def subexpressions(expr: Expr) -> Iterator[Expr]:
    """Yield ``expr`` and every expression nested inside it, pre-order."""
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        if isinstance(e, Sequence):
            stack.append(e.right)
            stack.append(e.left)
        elif isinstance(e, Choice):
            stack.append(e.second)
            stack.append(e.first)
        elif isinstance(e, (Star, Not)):
            stack.append(e.body)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    rule: str | None = None
    line: int | None = None
    column: int | None = None

    def __str__(self):
        if self.line is not None:
            return f"{self.line}:{self.column}: {self.message}"
        if self.rule is not None:
            return f"{self.rule}: {self.message}"
        return self.message


@dataclass(frozen=True, eq=False)
class Grammar:
    """Rules plus a start expression.

    ``synthetic`` names rules introduced by :func:`desugar_stars`; parse trees
    splice their children into the parent instead of tagging them.
    """

    rules: Mapping[str, Expr]
    start: Expr
    synthetic: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "rules", dict(self.rules))

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return (list(self.rules.items()) == list(other.rules.items())
                and self.start == other.start
                and self.synthetic == other.synthetic)

    __hash__ = None

    @classmethod
    def from_rules(cls, rules: Mapping[str, Expr], start: str | Expr | None = None):
        """Build a grammar; ``start`` defaults to the first rule's nonterminal."""
        if start is None:
            start = next(iter(rules))
        if isinstance(start, str):
            start = Nonterminal(start)
        return cls(rules, start)

    def with_start(self, start: str | Expr) -> Grammar:
        if isinstance(start, str):
            start = Nonterminal(start)
        return Grammar(self.rules, start, self.synthetic)

    @property
    def alphabet(self) -> frozenset:
        symbols = set()
        for body in [*self.rules.values(), self.start]:
            symbols.update(e.symbol for e in subexpressions(body) if isinstance(e, Terminal))
        return frozenset(symbols)

    @cached_property
    def nullable_rules(self) -> dict[str, bool]:
        return _nullable_fixpoint(self)

    @cached_property
    def wf_rules(self) -> dict[str, bool]:
        return _wf_fixpoint(self)

    @cached_property
    def left_recursive(self) -> frozenset:
        return frozenset(_left_recursive(self))


# -- closedness ---------------------------------------------------------------

def referenced_names(expr: Expr) -> list[str]:
    seen = []
    for e in subexpressions(expr):
        if isinstance(e, Nonterminal) and e.name not in seen:
            seen.append(e.name)
    return seen


def validate_closed(grammar: Grammar) -> list[Diagnostic]:
    """One diagnostic per nonterminal that is referenced but has no rule."""
    missing: dict[str, str] = {}
    places = [(name, body) for name, body in grammar.rules.items()]
    places.append(("<start>", grammar.start))
    for where, body in places:
        for name in referenced_names(body):
            if name not in grammar.rules and name not in missing:
                missing[name] = where
    return [Diagnostic(f"undefined nonterminal {name}", rule=where)
            for name, where in missing.items()]


def is_closed(grammar: Grammar) -> bool:
    return not validate_closed(grammar)


# -- nullability --------------------------------------------------------------

def _nullable_expr(expr: Expr, table: Mapping[str, bool]) -> bool:
    if isinstance(expr, (Empty, Star, Not)):
        return True
    if isinstance(expr, (Terminal, Any)):
        return False
    if isinstance(expr, Nonterminal):
        return table.get(expr.name, False)
    if isinstance(expr, Sequence):
        return _nullable_expr(expr.left, table) and _nullable_expr(expr.right, table)
    if isinstance(expr, Choice):
        return _nullable_expr(expr.first, table) or _nullable_expr(expr.second, table)
    raise TypeError(f"not an expression: {expr!r}")


def _nullable_fixpoint(grammar: Grammar) -> dict[str, bool]:
    # least fixed point: grow from all-false
    table = {name: False for name in grammar.rules}
    changed = True
    while changed:
        changed = False
        for name, body in grammar.rules.items():
            if not table[name] and _nullable_expr(body, table):
                table[name] = True
                changed = True
    return table


def nullable(expr: Expr, grammar: Grammar) -> bool:
    """True when ``expr`` may succeed without consuming input."""
    return _nullable_expr(expr, grammar.nullable_rules)


# -- well-formedness ----------------------------------------------------------

def _wf_expr(expr: Expr, wf: Mapping[str, bool], null: Mapping[str, bool]) -> bool:
    if isinstance(expr, (Empty, Terminal, Any)):
        return True
    if isinstance(expr, Nonterminal):
        return wf.get(expr.name, False)
    if isinstance(expr, Choice):
        return _wf_expr(expr.first, wf, null) and _wf_expr(expr.second, wf, null)
    if isinstance(expr, Not):
        return _wf_expr(expr.body, wf, null)
    if isinstance(expr, Star):
        return _wf_expr(expr.body, wf, null) and not _nullable_expr(expr.body, null)
    if isinstance(expr, Sequence):
        if not _wf_expr(expr.left, wf, null):
            return False
        return (not _nullable_expr(expr.left, null)) or _wf_expr(expr.right, wf, null)
    raise TypeError(f"not an expression: {expr!r}")


def _wf_fixpoint(grammar: Grammar) -> dict[str, bool]:
    # least fixed point of the inductive clauses: a rule becomes well-formed
    # only once its body is, so left-recursive cycles never get in
    null = grammar.nullable_rules
    lenient = {name: False for name in grammar.rules}
    changed = True
    while changed:
        changed = False
        for name, body in grammar.rules.items():
            if not lenient[name] and _wf_expr(body, lenient, null):
                lenient[name] = True
                changed = True
    # The sequence clause skips the right operand after a consuming left one,
    # which is what lets ``A <- 'a' A`` in, but it would also admit
    # ``'a' (!'a')*``.  Every subexpression has to pass on its own, and a rule
    # that calls an ill-formed rule is ill-formed too.
    table = {name: lenient[name] and all(_wf_expr(e, lenient, null) for e in subexpressions(body))
             for name, body in grammar.rules.items()}
    changed = True
    while changed:
        changed = False
        for name, body in grammar.rules.items():
            if table[name] and not all(table.get(r, False) for r in referenced_names(body)):
                table[name] = False
                changed = True
    return table


def expr_well_formed(expr: Expr, grammar: Grammar) -> bool:
    """True when ``expr`` and every expression nested in it are well-formed."""
    wf, null = grammar.wf_rules, grammar.nullable_rules
    return all(_wf_expr(e, wf, null) for e in subexpressions(expr))


@dataclass(frozen=True)
class AnalysisReport:
    nullable: dict[str, bool]
    rule_well_formed: dict[str, bool]
    start_well_formed: bool
    left_recursive: frozenset
    diagnostics: list[Diagnostic]

    @property
    def well_formed(self) -> bool:
        return self.start_well_formed and all(self.rule_well_formed.values())

    @property
    def closed(self) -> bool:
        return not any(d.message.startswith("undefined") for d in self.diagnostics)


def well_formed(grammar: Grammar) -> AnalysisReport:
    """Run every static analysis and collect the results."""
    diagnostics = validate_closed(grammar)
    wf = dict(grammar.wf_rules)
    for name, ok in wf.items():
        if not ok:
            diagnostics.append(Diagnostic("rule is not well-formed", rule=name))
    start_ok = expr_well_formed(grammar.start, grammar)
    if not start_ok:
        diagnostics.append(Diagnostic("start expression is not well-formed", rule="<start>"))
    return AnalysisReport(
        nullable=dict(grammar.nullable_rules),
        rule_well_formed=wf,
        start_well_formed=start_ok,
        left_recursive=grammar.left_recursive,
        diagnostics=diagnostics,
    )


# -- left recursion -----------------------------------------------------------

def leftmost_names(expr: Expr, grammar: Grammar) -> set[str]:
    """Nonterminals that ``expr`` may call before consuming any input."""
    null = grammar.nullable_rules
    out: set[str] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Nonterminal):
            out.add(e.name)
        elif isinstance(e, Sequence):
            stack.append(e.left)
            if _nullable_expr(e.left, null):
                stack.append(e.right)
        elif isinstance(e, Choice):
            stack.append(e.first)
            stack.append(e.second)
        elif isinstance(e, (Star, Not)):
            stack.append(e.body)
    return out


def _left_recursive(grammar: Grammar) -> set[str]:
    edges = {name: leftmost_names(body, grammar) & grammar.rules.keys()
             for name, body in grammar.rules.items()}
    found = set()
    for name in grammar.rules:
        seen = set()
        stack = list(edges[name])
        while stack:
            cur = stack.pop()
            if cur == name:
                found.add(name)
                break
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(edges[cur])
    return found


def left_recursive_nonterminals(grammar: Grammar) -> frozenset:
    return grammar.left_recursive


def directly_left_recursive(grammar: Grammar, name: str) -> bool:
    return name in leftmost_names(grammar.rules[name], grammar)


# -- star desugaring ----------------------------------------------------------

def desugar_stars(grammar: Grammar) -> Grammar:
    """Replace every ``p*`` by a fresh rule ``R <- p R / %empty``.

    Fresh names are ``<Rule>_star<i>`` (``start_star<i>`` for the start
    expression), skipping any name already taken.
    """
    taken = set(grammar.rules)
    new_rules: dict[str, Expr] = {}
    extra: dict[str, Expr] = {}

    def rewrite(expr: Expr, owner: str, counter: list) -> Expr:
        if isinstance(expr, Star):
            body = rewrite(expr.body, owner, counter)
            while True:
                name = f"{owner}_star{counter[0]}"
                counter[0] += 1
                if name not in taken:
                    break
            taken.add(name)
            extra[name] = Choice(Sequence(body, Nonterminal(name)), EMPTY)
            return Nonterminal(name)
        if isinstance(expr, Sequence):
            return Sequence(rewrite(expr.left, owner, counter), rewrite(expr.right, owner, counter))
        if isinstance(expr, Choice):
            return Choice(rewrite(expr.first, owner, counter), rewrite(expr.second, owner, counter))
        if isinstance(expr, Not):
            return Not(rewrite(expr.body, owner, counter))
        return expr

    for name, body in grammar.rules.items():
        new_rules[name] = rewrite(body, name, [0])
    start = rewrite(grammar.start, "start", [0])
    if not extra:
        return grammar
    new_rules.update(extra)
    return Grammar(new_rules, start, grammar.synthetic | frozenset(extra))


def has_stars(grammar: Grammar) -> bool:
    return any(isinstance(e, Star)
               for body in [*grammar.rules.values(), grammar.start]
               for e in subexpressions(body))
