"""Compiling a grammar to the parsing machine and running it.

The machine has eight instructions.  Calls to left-recursive rules push a
frame keyed by (rule address, position), and a Return on such a frame either
re-runs the rule with the longer result or stops.  The machine reports only how
much input was consumed, which the interpreter must agree with.
"""

from lrpeg import compile_grammar, desugar_stars, disassemble, interpreter, load_grammar, run

from _paths import grammar_source

machine = load_grammar(grammar_source("machine"))
print(disassemble(compile_grammar(machine)))

sum_grammar = load_grammar(grammar_source("sum"))
program = compile_grammar(sum_grammar)
print()
for text in ["n", "n+n+n", "n+n+", "+n"]:
    r = interpreter.parse(sum_grammar, text)
    print(f"{text:<7} vm {run(program, text)!s:<5} interpreter {None if r is None else r.end}")

# Stars compile through a fresh right-recursive helper rule.
star = desugar_stars(load_grammar("E <- 'n' ('+' 'n')*"))
print()
print(sorted(star.rules))
print(run(compile_grammar(star), "n+n+n"))
