"""Textual grammar format.

::

    # comments run to end of line
    E <- E^1 '+' E^2 / E^2 '*' E^2 / 'n'

A grammar is one or more ``Name <- expr`` rules; the first rule is the start.
Expressions, loosest binding first: ordered choice ``a / b``, sequence by
juxtaposition, prefix ``!``, postfix ``*``.  Primaries are quoted literals
(``'abc'`` is the sequence of its symbols, ``''`` is empty), ``.`` for any
symbol, ``%empty``, ``Name`` or ``Name^k`` for a precedence-level-k
occurrence, and parenthesized expressions.  Literals accept the escapes
``\\n \\t \\r \\\\ \\'``, ``\\uXXXX`` and ``\\UXXXXXXXX``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .grammar import (
    ANY, EMPTY, Any, Choice, Diagnostic, Empty, Expr, Grammar, Nonterminal, Not,
    Sequence, Star, Terminal, lit, validate_closed,
)


class GrammarError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


@dataclass
class SourceGrammar:
    text: str
    grammar: Grammar | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.grammar is not None and not self.diagnostics


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<arrow><-)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<level>\^[0-9]+)
  | (?P<literal>'(?:[^'\\\n]|\\.)*')
  | (?P<empty>%empty)
  | (?P<punct>[/!*().])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'"}


@dataclass
class _Token:
    kind: str
    value: str
    line: int
    column: int


class _SyntaxError(Exception):
    def __init__(self, message, line, column):
        self.diagnostic = Diagnostic(message, line=line, column=column)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise _SyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


def _unescape(body: str, tok: _Token) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt == "u" and re.fullmatch(r"[0-9A-Fa-f]{4}", body[i + 2:i + 6]):
            out.append(chr(int(body[i + 2:i + 6], 16)))
            i += 6
        elif nxt == "U" and re.fullmatch(r"[0-9A-Fa-f]{8}", body[i + 2:i + 10]) \
                and int(body[i + 2:i + 10], 16) <= 0x10FFFF:
            out.append(chr(int(body[i + 2:i + 10], 16)))
            i += 10
        else:
            raise _SyntaxError(f"unknown escape \\{nxt}", tok.line, tok.column + i + 1)
    return "".join(out)


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.tok
        raise _SyntaxError(message, tok.line, tok.column)

    def at_rule_start(self):
        return self.tok.kind == "ident" and self.tokens[self.i + 1].kind == "arrow"

    def grammar(self) -> tuple[dict[str, Expr], list[Diagnostic]]:
        rules: dict[str, Expr] = {}
        problems = []
        if self.tok.kind == "eof":
            self.fail("empty grammar: expected a rule")
        while self.tok.kind != "eof":
            if self.tok.kind == "ident" and not self.at_rule_start():
                self.advance()
                self.fail(f"expected '<-' after rule name, found "
                          f"{self.tok.value or 'end of input'!r}")
            if not self.at_rule_start():
                self.fail(f"expected 'Name <-', found {self.tok.value or 'end of input'!r}")
            name_tok = self.advance()
            self.advance()
            body = self.choice()
            if name_tok.value in rules:
                problems.append(Diagnostic(f"duplicate rule {name_tok.value}",
                                           line=name_tok.line, column=name_tok.column))
            else:
                rules[name_tok.value] = body
        return rules, problems

    def choice(self) -> Expr:
        first = self.sequence()
        if self.tok.value == "/" and self.tok.kind == "punct":
            self.advance()
            return Choice(first, self.choice())
        return first

    def sequence(self) -> Expr:
        items = []
        while self.tok.kind in ("ident", "literal", "empty") or self.tok.value in ("!", "(", "."):
            if self.at_rule_start():
                break
            items.append(self.prefix())
        if not items:
            self.fail(f"expected an expression, found {self.tok.value or 'end of input'!r}")
        result = items[0]
        for item in items[1:]:
            result = Sequence(result, item)
        return result

    def prefix(self) -> Expr:
        if self.tok.value == "!" and self.tok.kind == "punct":
            self.advance()
            return Not(self.prefix())
        return self.suffix()

    def suffix(self) -> Expr:
        expr = self.primary()
        while self.tok.value == "*" and self.tok.kind == "punct":
            self.advance()
            expr = Star(expr)
        return expr

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "ident":
            self.advance()
            level = 1
            if self.tok.kind == "level":
                level = int(self.advance().value[1:])
                if level < 1:
                    self.fail("precedence level must be at least 1", tok)
            return Nonterminal(tok.value, level)
        if tok.kind == "literal":
            self.advance()
            return lit(_unescape(tok.value[1:-1], tok))
        if tok.kind == "empty":
            self.advance()
            return EMPTY
        if tok.value == ".":
            self.advance()
            return ANY
        if tok.value == "(":
            self.advance()
            inner = self.choice()
            if self.tok.value != ")":
                self.fail("expected ')'")
            self.advance()
            return inner
        self.fail(f"unexpected {tok.value!r}")


def parse_grammar(text: str) -> SourceGrammar:
    """Parse grammar text; problems are reported as located diagnostics."""
    try:
        rules, problems = _Parser(_tokenize(text)).grammar()
    except _SyntaxError as exc:
        return SourceGrammar(text, None, [exc.diagnostic])
    grammar = Grammar.from_rules(rules)
    problems.extend(_locate(validate_closed(grammar), text))
    return SourceGrammar(text, grammar, problems)


def _locate(diagnostics: list[Diagnostic], text: str) -> list[Diagnostic]:
    out = []
    for d in diagnostics:
        name = d.message.rsplit(" ", 1)[-1]
        for lineno, line in enumerate(text.splitlines(), 1):
            code = line.split("#", 1)[0]
            m = re.search(rf"(?<![A-Za-z0-9_']){re.escape(name)}(?![A-Za-z0-9_])", code)
            if m and not re.match(rf"\s*{re.escape(name)}\s*<-", code[m.start():]):
                out.append(Diagnostic(d.message, rule=d.rule, line=lineno, column=m.start() + 1))
                break
        else:
            out.append(d)
    return out


def load_grammar(text: str) -> Grammar:
    """Parse grammar text or raise :class:`GrammarError`."""
    src = parse_grammar(text)
    if not src.ok:
        raise GrammarError(src.diagnostics)
    return src.grammar


# -- printing -----------------------------------------------------------------

def _literal(symbol: str) -> str:
    out = []
    for c in symbol:
        if c == "\\":
            out.append("\\\\")
        elif c == "'":
            out.append("\\'")
        elif c == "\n":
            out.append("\\n")
        elif c == "\t":
            out.append("\\t")
        elif c == "\r":
            out.append("\\r")
        elif not c.isprintable():
            out.append(f"\\u{ord(c):04x}" if ord(c) < 0x10000 else f"\\U{ord(c):08x}")
        else:
            out.append(c)
    return "'" + "".join(out) + "'"


def format_expr(expr: Expr) -> str:
    if isinstance(expr, Empty):
        return "%empty"
    if isinstance(expr, Terminal):
        return _literal(expr.symbol)
    if isinstance(expr, Any):
        return "."
    if isinstance(expr, Nonterminal):
        return expr.name if expr.level == 1 else f"{expr.name}^{expr.level}"
    if isinstance(expr, Choice):
        first = format_expr(expr.first)
        if isinstance(expr.first, Choice):
            first = f"({first})"
        return f"{first} / {format_expr(expr.second)}"
    if isinstance(expr, Sequence):
        left = format_expr(expr.left)
        if isinstance(expr.left, Choice):
            left = f"({left})"
        right = format_expr(expr.right)
        if isinstance(expr.right, (Choice, Sequence)):
            right = f"({right})"
        return f"{left} {right}"
    if isinstance(expr, Not):
        body = format_expr(expr.body)
        if isinstance(expr.body, (Choice, Sequence)):
            body = f"({body})"
        return f"!{body}"
    if isinstance(expr, Star):
        body = format_expr(expr.body)
        if isinstance(expr.body, (Choice, Sequence, Not)):
            body = f"({body})"
        return f"{body}*"
    raise TypeError(f"not an expression: {expr!r}")


def format_grammar(grammar: Grammar) -> str:
    """Render rules in source order; the start must be the first rule."""
    first = next(iter(grammar.rules), None)
    if first is None or grammar.start != Nonterminal(first):
        raise ValueError("only grammars that start at their first rule can be printed")
    width = max(len(name) for name in grammar.rules)
    return "".join(f"{name:<{width}} <- {format_expr(body)}\n"
                   for name, body in grammar.rules.items())
