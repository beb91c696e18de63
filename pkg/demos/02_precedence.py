"""Precedence levels on nonterminal uses.

``E^k`` may only reuse a left-recursive result that was itself produced at
level k or higher.  Writing ``E^1 '+' E^2`` makes ``+`` left-associative and
looser than anything on level 2.  The arithmetic grammar in grammars/ puts
four operator classes in a single rule this way.
"""

from lrpeg import load_grammar, parse, to_brackets

from _paths import grammar_source

precedence = load_grammar(grammar_source("precedence"))
for text in ["n+n*n", "n*n+n", "n*n*n", "n+n+n"]:
    print(f"{text:<8} {to_brackets(parse(precedence, text).nodes)}")

arith = load_grammar(grammar_source("arith"))
print()
for text in ["1-2-3", "2^3^2", "1+2*3^4", "-(1+2)*3"]:
    r = parse(arith, text)
    print(f"{text:<10} consumed {r.end}/{len(text)}  {to_brackets(r.nodes)}")

# The same right-recursive rule, read with left-associative defaults: the top
# call runs at level 0 and every nested use needs a strictly higher level.
right = load_grammar("E <- E^1 '+' E^1 / 'n'")
print()
print("plain:             ", to_brackets(parse(right, "n+n+n").nodes))
print("left_assoc_default:", to_brackets(parse(right, "n+n+n", left_assoc_default=True).nodes))
