"""Static checks: closedness, nullability, well-formedness, left recursion.

A grammar that is well-formed and has no left recursion behaves the same under
this engine as under a classic PEG interpreter.  The reports show which rules
are flagged, and why a rule can be refused.
"""

from lrpeg import parse_grammar, well_formed

from _paths import grammar_source

samples = {
    "sum": grammar_source("sum"),
    "nullable_lr": grammar_source("nullable_lr"),
    "star tail": "E <- 'n' ('+' 'n')*",
    "empty loop": "A <- (!'a')*",
    "open": "E <- F '+' 'n'",
}

for title, source in samples.items():
    src = parse_grammar(source)
    print(f"== {title}")
    if not src.ok:
        for d in src.diagnostics:
            print(f"   {d}")
        continue
    grammar = src.grammar
    report = well_formed(grammar)
    print(f"   nullable:       {sorted(n for n, v in grammar.nullable_rules.items() if v)}")
    print(f"   left-recursive: {sorted(report.left_recursive)}")
    print(f"   well-formed:    {report.well_formed}")
