"""Left recursion grows a match one operator at a time.

A plain PEG interpreter loops forever on ``E <- E '+' 'n' / 'n'``.  Here the
call of E at position 0 first fails, then is re-run with the previous result
available, and stops as soon as a round does not consume more input.  The
bound table below shows the matches that a fixed recursion budget yields, and
the unbounded parse picks the longest of them.
"""

from lrpeg import load_grammar, parse, to_brackets
from lrpeg.oracle import bound_table, select_bound

from _paths import grammar_source

sum_grammar = load_grammar(grammar_source("sum"))
subjects = ["n", "n+n", "n+n+n"]

print("remaining input after E with recursion budget n:")
print("subject  " + "  ".join(f"E^{n:<3}" for n in range(7)))
for subject, row in zip(subjects, bound_table(sum_grammar, "E", subjects, 6)):
    cells = ("fail" if c is None else (c or "ε") for c in row)
    print(f"{subject:<8} " + "  ".join(f"{c:<5}" for c in cells))

print()
for subject in subjects:
    bound, _ = select_bound(sum_grammar, "E", subject)
    result = parse(sum_grammar, subject)
    print(f"{subject:<6} budget {bound}: {to_brackets(result.nodes)}")

# Mutual left recursion needs no special casing.
lvalue = load_grammar(grammar_source("lvalue"))
print()
print(to_brackets(parse(lvalue, "x(n)(n).x(n).x").nodes))
