"""Differential check of the three engines on random grammars.

Random well-formed grammars without left recursion must give the same answer
under the classic PEG oracle and the interpreter.  On any grammar the parsing
machine must consume exactly as much as the interpreter.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from corpus import random_general_grammars, random_inputs, random_wf_grammars  # noqa: E402

from lrpeg import compile_grammar, desugar_stars, format_grammar, interpreter, run  # noqa: E402
from lrpeg.oracle import naive_match  # noqa: E402

agree = total = 0
for i, g in enumerate(random_wf_grammars(50, seed=7)):
    for text in random_inputs(g, count=10, seed=i):
        total += 1
        agree += naive_match(g, text) == interpreter.parse(g, text)
print(f"oracle vs interpreter: {agree}/{total} identical results")

agree = total = 0
grammars = random_general_grammars(50, seed=8)
for i, g in enumerate(grammars):
    program = compile_grammar(desugar_stars(g))
    for text in random_inputs(g, count=10, seed=i):
        r = interpreter.parse(g, text)
        total += 1
        agree += run(program, text) == (None if r is None else r.end)
print(f"machine vs interpreter: {agree}/{total} identical consumption")

sample = random.Random(0).choice([g for g in grammars if g.left_recursive])
print()
print("a left-recursive sample from the corpus:")
print(format_grammar(sample))
