"""Command-line front end.

Exit codes: 0 success, 1 parse failure, 2 engine disagreement, 3 usage error,
4 unreadable or invalid grammar/input, 5 engine gave up (step or depth limit).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import interpreter, oracle, vm
from .grammar import desugar_stars, directly_left_recursive, well_formed
from .text import format_expr, parse_grammar
from .tree import to_brackets, to_structured

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_MISMATCH = 2
EXIT_USAGE = 3
EXIT_INPUT = 4
EXIT_ENGINE = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _strip_newline(text: str) -> str:
    if text.endswith("\r\n"):
        return text[:-2]
    if text.endswith("\n"):
        return text[:-1]
    return text


def _load(args, require_closed=True):
    src = parse_grammar(_read(args.grammar))
    if src.grammar is None or (require_closed and src.diagnostics):
        for d in src.diagnostics:
            print(f"{args.grammar}:{d}", file=sys.stderr)
        raise CliError("grammar has errors")
    grammar = src.grammar
    if getattr(args, "start", None):
        if args.start not in grammar.rules:
            raise CliError(f"no rule named {args.start}")
        grammar = grammar.with_start(args.start)
    return src, grammar


def _inputs(args) -> list[str]:
    out = list(args.text or [])
    if args.input:
        out.append(_strip_newline(_read(args.input)))
    return out


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


# -- commands -----------------------------------------------------------------

def cmd_check(args) -> int:
    src, grammar = _load(args, require_closed=False)
    report = well_formed(grammar)
    closed = not src.diagnostics
    print(f"closed: {_yes(closed)}")
    for d in src.diagnostics:
        print(f"  {d}")
    print(f"start: {format_expr(grammar.start)}")
    width = max(4, *(len(n) for n in grammar.rules))
    print(f"{'rule':<{width}}  nullable  well-formed  left-recursive")
    for name in grammar.rules:
        print(f"{name:<{width}}  {_yes(report.nullable[name]):<8}  "
              f"{_yes(report.rule_well_formed[name]):<11}  "
              f"{_yes(name in report.left_recursive)}")
    lr = ", ".join(n for n in grammar.rules if n in report.left_recursive)
    print(f"left-recursive: {lr or '(none)'}")
    print(f"well-formed: {_yes(report.well_formed)}")
    return EXIT_OK if closed else EXIT_FAIL


def _run_interpreter(grammar, text, args):
    return interpreter.parse(grammar, text, left_assoc_default=args.left_assoc_default,
                             max_steps=args.max_steps)


def _run_vm(grammar, text, args):
    program = vm.compile_grammar(desugar_stars(grammar))
    return vm.run(program, text, left_assoc_default=args.left_assoc_default,
                  max_steps=args.max_steps)


def cmd_parse(args) -> int:
    _, grammar = _load(args)
    texts = _inputs(args)
    if len(texts) != 1:
        raise CliError("parse needs exactly one of --input or --text", EXIT_USAGE)
    text = texts[0]
    total = len(text)
    interp = machine = None
    if args.engine in ("interpreter", "both"):
        interp = _run_interpreter(grammar, text, args)
    if args.engine in ("vm", "both"):
        machine = _run_vm(grammar, text, args)

    verdict = None
    if args.engine == "both":
        same = (interp is None) == (machine is None)
        if same and interp is not None:
            same = interp.end == machine
        verdict = "MATCH" if same else "MISMATCH"

    if args.format == "structured":
        doc = {"length": total}
        if args.engine in ("interpreter", "both"):
            doc["interpreter"] = (
                {"status": "fail"} if interp is None else
                {"status": "success", "consumed": interp.end,
                 "tree": to_structured(interp.nodes)})
        if args.engine in ("vm", "both"):
            doc["vm"] = ({"status": "fail"} if machine is None else
                         {"status": "success", "consumed": machine})
        if verdict:
            doc["verdict"] = verdict
        # trees of long left-recursive parses nest deeply; the encoder recurses
        print(interpreter.run_deep(json.dumps, doc, ensure_ascii=False))
    else:
        if args.engine in ("interpreter", "both"):
            prefix = "interpreter: " if args.engine == "both" else ""
            if interp is None:
                print(f"{prefix}fail")
            else:
                print(f"{prefix}{to_brackets(interp.nodes)}")
                print(f"{prefix}consumed {interp.end}/{total}")
        if args.engine in ("vm", "both"):
            prefix = "vm: " if args.engine == "both" else ""
            print(f"{prefix}fail" if machine is None else f"{prefix}consumed {machine}/{total}")
        if verdict:
            print(verdict)

    if verdict == "MISMATCH":
        return EXIT_MISMATCH
    ok = interp if args.engine != "vm" else machine
    return EXIT_OK if ok is not None else EXIT_FAIL


def cmd_compile(args) -> int:
    _, grammar = _load(args)
    program = vm.compile_grammar(desugar_stars(grammar), tail_calls=not args.no_tail_calls)
    if args.format == "structured":
        print(json.dumps(program.to_records(), ensure_ascii=False, indent=1))
    else:
        sys.stdout.write(vm.disassemble(program))
    return EXIT_OK


def cmd_bound(args) -> int:
    _, grammar = _load(args)
    name = args.rule
    if name is None:
        candidates = [n for n in grammar.rules if n in grammar.left_recursive]
        if len(candidates) != 1 or not directly_left_recursive(grammar, candidates[0]):
            raise CliError("bound needs a grammar with exactly one directly "
                           f"left-recursive nonterminal (found: {', '.join(candidates) or 'none'})")
        name = candidates[0]
    try:
        oracle.check_bounded_grammar(grammar, name)
    except oracle.UnsupportedGrammar as exc:
        raise CliError(f"bound: {exc}") from None
    subjects = _inputs(args)
    if not subjects:
        raise CliError("bound needs at least one subject (--text or --input)", EXIT_USAGE)
    table = oracle.bound_table(grammar, name, subjects, args.bound)
    headers = ["subject"] + [f"{name}^{n}" for n in range(args.bound + 1)]
    rows = [[s or "ε"] + ["fail" if c is None else (c or "ε") for c in row]
            for s, row in zip(subjects, table)]
    widths = [max(len(r[i]) for r in [headers, *rows]) for i in range(len(headers))]
    for r in [headers, *rows]:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip())
    return EXIT_OK


BENCH_GRAMMARS = {
    "left-recursive": "E <- E '+' 'n' / 'n'",
    "right-recursive": "E <- 'n' '+' E / 'n'",
    "star": "E <- 'n' ('+' 'n')*",
}


def bench_rows(size: int, engines=("interpreter", "vm"), grammars=None, repeat=1):
    """Time each engine on ``n+n+...+n`` with ``size`` terms."""
    from .text import load_grammar

    text = "+".join(["n"] * size)
    rows = []
    for label, source in (grammars or BENCH_GRAMMARS).items():
        grammar = load_grammar(source)
        program = vm.compile_grammar(desugar_stars(grammar))
        for engine in engines:
            best = None
            for _ in range(repeat):
                t0 = time.perf_counter()
                if engine == "vm":
                    machine = vm.Machine(program, text)
                    consumed = machine.run()
                    steps = machine.steps
                else:
                    interp = interpreter.Interpreter(grammar, text)
                    r = interpreter._evaluate(interp, interp.match, grammar.start, 0)
                    consumed = None if r is None else r.end
                    steps = interp.steps
                elapsed = time.perf_counter() - t0
                best = elapsed if best is None else min(best, elapsed)
            rows.append({"grammar": label, "engine": engine, "terms": size,
                         "consumed": consumed, "steps": steps, "seconds": best})
    return rows


def cmd_bench(args) -> int:
    engines = ("interpreter", "vm") if args.engine == "both" else (args.engine,)
    grammars = {k: BENCH_GRAMMARS[k] for k in args.grammars}
    rows = bench_rows(args.size, engines, grammars, repeat=args.repeat)
    print(f"{'grammar':<16} {'engine':<12} {'terms':>7} {'steps':>10} {'seconds':>10}")
    for r in rows:
        print(f"{r['grammar']:<16} {r['engine']:<12} {r['terms']:>7} {r['steps']:>10} "
              f"{r['seconds']:>10.4f}")
    return EXIT_OK


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lrpeg", description="Left-recursive PEG toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grammar_arg(sp):
        sp.add_argument("grammar", help="grammar file, or - for standard input")

    def input_args(sp):
        sp.add_argument("--input", metavar="FILE", help="input file, or - for standard input "
                        "(one trailing newline is dropped)")
        sp.add_argument("--text", action="append", metavar="STRING", help="inline input")

    sp = sub.add_parser("check", help="report closedness, nullability, well-formedness, "
                        "left recursion")
    grammar_arg(sp)
    sp.add_argument("--start", metavar="NAME")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("parse", help="parse an input")
    grammar_arg(sp)
    input_args(sp)
    sp.add_argument("--engine", choices=("interpreter", "vm", "both"), default="interpreter")
    sp.add_argument("--format", choices=("brackets", "structured"), default="brackets")
    sp.add_argument("--start", metavar="NAME")
    sp.add_argument("--left-assoc-default", action="store_true")
    sp.add_argument("--max-steps", type=int, default=None, help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("compile", help="print the machine program")
    grammar_arg(sp)
    sp.add_argument("--format", choices=("text", "structured"), default="text")
    sp.add_argument("--start", metavar="NAME")
    sp.add_argument("--no-tail-calls", action="store_true",
                    help="keep Call/Return pairs instead of Jump")
    sp.set_defaults(func=cmd_compile)

    sp = sub.add_parser("bound", help="tabulate bounded matches of a left-recursive rule")
    grammar_arg(sp)
    input_args(sp)
    sp.add_argument("--bound", type=int, default=6, metavar="N")
    sp.add_argument("--rule", metavar="NAME", help="left-recursive rule (default: the only one)")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("bench", help="time the engines on additive expressions")
    sp.add_argument("--size", type=int, default=10_000, help="number of terms")
    sp.add_argument("--engine", choices=("interpreter", "vm", "both"), default="both")
    sp.add_argument("--grammars", nargs="+", choices=tuple(BENCH_GRAMMARS),
                    default=["left-recursive", "right-recursive"])
    sp.add_argument("--repeat", type=int, default=1)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "bound", 0) is not None and getattr(args, "bound", 0) < 0:
        print("lrpeg: error: --bound must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"lrpeg: {exc}", file=sys.stderr)
        return exc.code
    except interpreter.EngineError as exc:
        print(f"lrpeg: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    except BrokenPipeError:
        # reader went away (e.g. piped into head); stay quiet
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
