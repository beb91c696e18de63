import pytest

from lrpeg import interpreter, load_grammar
from lrpeg.grammar import ANY, EMPTY, Grammar, Not, Sequence, Star, Terminal, nt
from lrpeg.interpreter import (
    DepthLimitExceeded, Interpreter, StepBudgetExceeded, _evaluate,
)
from lrpeg.tree import Leaf, Node, leaves, to_brackets

from checkers import Watched
from corpus import (
    HANDWRITTEN_INPUTS, HANDWRITTEN_WF, LVALUE, MACHINE, NULLABLE_LR, WORKED_CASES, RIGHT_PLUS,
    SUM, LEFT_PLUS, worked_grammars, random_general_grammars, random_inputs, random_wf_grammars,
)


def brackets(source, text, **options):
    r = interpreter.parse(load_grammar(source), text, **options)
    return None if r is None else to_brackets(r.nodes)


@pytest.mark.parametrize("case", WORKED_CASES, ids=lambda c: c.note)
def test_worked_examples(case):
    r = interpreter.parse(load_grammar(case.source), case.text)
    assert r is not None and r.end == len(case.text)
    if case.brackets is not None:
        assert to_brackets(r.nodes) == case.brackets


def test_lvalue_tree():
    assert brackets(LVALUE, "x(n)(n).x(n).x") == "L[P[P[L[P[P[P[L[x]](n)](n)].x]](n)].x]"


def test_sum_consumes_longest_prefix():
    r = interpreter.parse(load_grammar(SUM), "n+n+")
    assert r.end == 3


def test_nullable_left_recursion_accepts_x_plus():
    g = load_grammar(NULLABLE_LR)
    assert to_brackets(interpreter.parse(g, "xxx").nodes) == "S[X[X[X[X[]Y[x]]Y[x]]Y[x]]]"
    for n in range(21):
        assert interpreter.parse(g, "x" * n).end == n


def test_machine_grammar():
    r = interpreter.parse(load_grammar(MACHINE), "aacb")
    assert (r.end, to_brackets(r.nodes)) == (4, "A[aA[aA[cB[b]]]]")
    assert interpreter.parse(load_grammar(MACHINE), "ab") is None


def test_terminal_start_on_empty_input_fails():
    g = Grammar.from_rules({"S": EMPTY}, start=Terminal("a"))
    assert interpreter.parse(g, "") is None


def test_not_and_empty():
    g = Grammar.from_rules({"S": EMPTY})
    assert interpreter.match(g, Not(Terminal("a")), "b") == (0, ())
    assert interpreter.match(g, Not(Terminal("a")), "a") is None
    assert interpreter.match(g, EMPTY, "") == (0, ())
    assert interpreter.match(g, ANY, "") is None


def test_star_contributes_children_without_a_tag():
    r = interpreter.parse(load_grammar("E <- 'n' ('+' 'n')*"), "n+n+n")
    assert to_brackets(r.nodes) == "E[n+n+n]"


def test_star_of_empty_stops():
    g = Grammar.from_rules({"S": Star(EMPTY)})
    assert interpreter.parse(g, "aaa") == (0, (Node("S"),))


def test_match_at_offset():
    g = load_grammar(SUM)
    r = interpreter.match(g, nt("E"), "xxn+n", 2)
    assert r.end == 5 and leaves(r.nodes) == "n+n"
    with pytest.raises(ValueError):
        interpreter.match(g, nt("E"), "n", 3)


def test_explicit_start():
    g = load_grammar("A <- 'a' B\nB <- 'b'")
    assert interpreter.parse(g, "b", start="B").end == 1
    assert interpreter.parse(g, "b", start=Sequence(nt("B"), EMPTY)).end == 1


# -- precedence levels and the left-associative default -----------------------

def test_default_levels_give_right_associativity():
    assert brackets(RIGHT_PLUS, "n+n+n") == "E[E[n]+E[E[n]+E[n]]]"


def test_left_assoc_default_matches_explicit_levels():
    left = brackets(RIGHT_PLUS, "n+n+n", left_assoc_default=True)
    assert left == "E[E[E[n]+E[n]]+E[n]]" == brackets(LEFT_PLUS, "n+n+n")


def test_left_assoc_default_on_other_inputs():
    for text in ["n", "n+n", "n+n+n+n", "n+"]:
        assert (brackets(RIGHT_PLUS, text, left_assoc_default=True)
                == brackets(LEFT_PLUS, text))


def test_raising_the_right_operand_level_makes_product_left_associative():
    src = "E <- E^1 '+' E^2 / E^2 '*' E^3 / 'n'"
    assert brackets(src, "n*n*n") == "E[E[E[n]*E[n]]*E[n]]"
    assert brackets(src, "n*n+n") == "E[E[E[n]*E[n]]+E[n]]"
    assert brackets(src, "n+n*n") == "E[E[n]+E[E[n]*E[n]]]"


# -- engine limits ------------------------------------------------------------

def test_step_budget():
    with pytest.raises(StepBudgetExceeded):
        interpreter.parse(load_grammar(SUM), "n+n+n+n", max_steps=10)


def test_depth_limit():
    g = load_grammar("A <- 'a' A / %empty")
    with pytest.raises(DepthLimitExceeded):
        interpreter.parse(g, "a" * 50, max_depth=20)


def test_long_input_runs_on_big_stack():
    text = "+".join(["n"] * 5000)
    for src in (SUM, "E <- 'n' '+' E / 'n'"):
        assert interpreter.parse(load_grammar(src), text).end == len(text)


def test_undefined_rule_is_a_key_error():
    g = Grammar.from_rules({"S": nt("T")})
    with pytest.raises(KeyError):
        interpreter.parse(g, "")


# -- literal modes agree with the default -------------------------------------

def _corpus(general_len=6):
    groups = [(g, inputs) for _, g, inputs in worked_grammars()]
    groups += [(load_grammar(src), HANDWRITTEN_INPUTS[i]) for i, src in enumerate(HANDWRITTEN_WF)]
    groups += [(g, random_inputs(g, seed=i)) for i, g in enumerate(random_wf_grammars())]
    groups += [(g, random_inputs(g, seed=i, max_len=general_len))
               for i, g in enumerate(random_general_grammars())]
    return groups


def test_literal_increase_bound_rounds_give_same_results():
    for g, inputs in _corpus():
        for text in inputs:
            for la in (False, True):
                fast = interpreter.parse(g, text, left_assoc_default=la)
                try:
                    slow = interpreter.parse(g, text, left_assoc_default=la,
                                             skip_unread_rounds=False, reuse_results=False,
                                             max_steps=200_000)
                except StepBudgetExceeded:
                    continue
                assert fast == slow, (g.rules, text, la)


def test_result_reuse_changes_nothing():
    for g, inputs in _corpus(general_len=8):
        for text in inputs:
            for la in (False, True):
                a = interpreter.parse(g, text, left_assoc_default=la)
                try:
                    b = interpreter.parse(g, text, left_assoc_default=la, reuse_results=False,
                                          max_steps=500_000)
                except StepBudgetExceeded:
                    continue
                assert a == b, (g.rules, text, la)


# -- invariants, observed through the hooks -----------------------------------

def _watch(g, text, **options):
    w = Watched(g, text, **options)
    r = _evaluate(w, w.match, g.start, 0)
    assert w.memo == {} and w.depth == 0
    return w, r


def test_invariants_over_corpus():
    calls = 0
    for g, inputs in _corpus():
        for text in inputs:
            for options in ({}, {"reuse_results": False}, {"left_assoc_default": True}):
                w, r = _watch(g, text, **options)
                calls += w.calls
    assert calls > 10_000


def test_invariants_hold_on_long_inputs():
    for g in random_general_grammars(60):
        for text in random_inputs(g, count=5, max_len=40, seed=7):
            _watch(g, text)


def test_bounds_grow_in_the_sum_grammar():
    w, r = _watch(load_grammar(SUM), "n+n+n")
    assert r.end == 5


def test_bound_sequence_for_sum():
    seen = []

    class Record(Interpreter):
        def on_bound(self, name, pos, end):
            seen.append((name, pos, end))

    g = load_grammar(SUM)
    w = Record(g, "n+n+n")
    w.match(g.start, 0)
    assert seen == [("E", 0, 1), ("E", 0, 3), ("E", 0, 5)]


def test_result_leaves_spell_the_prefix():
    r = interpreter.parse(load_grammar(LVALUE), "x(n)(n).x(n).x")
    assert leaves(r.nodes) == "x(n)(n).x(n).x"
    assert r.nodes[0] == Node("L", r.nodes[0].children)
    assert r.nodes[0].children[-1] == Leaf("x")
