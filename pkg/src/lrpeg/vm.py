"""A parsing machine for left-recursive PEGs.

Programs use eight opcodes: ``Char``, ``Any``, ``Choice``, ``Jump``, ``Call``,
``Return``, ``Commit`` and ``Fail``.  Offsets are relative to the
instruction's own address.  ``Call`` carries a precedence level and pushes a
left-recursive call frame ``(return pc, rule pc, position, result, level)``
that doubles as the memo entry for that rule at that position; ``Return``
either restarts the rule with a longer stored result or pops the frame.

The machine reports how much input was consumed; it builds no trees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .grammar import (
    Any, Choice, Empty, Expr, Grammar, Nonterminal, Not, Sequence, Star, Terminal,
    has_stars, validate_closed,
)
from .interpreter import EngineError, StepBudgetExceeded

OPCODES = ("Char", "Any", "Choice", "Jump", "Call", "Return", "Commit", "Fail")


class Instruction(NamedTuple):
    op: str
    arg: object = None      # symbol for Char, relative offset for jumps
    level: int = 1          # Call only

    def __str__(self):
        if self.op == "Char":
            return f"Char {self.arg!r}"
        if self.op == "Call":
            return f"Call {self.arg:+d} {self.level}"
        if self.arg is None:
            return self.op
        return f"{self.op} {self.arg:+d}"


class CompileError(ValueError):
    pass


@dataclass
class Program:
    instructions: list[Instruction]
    rule_address: dict[str, int]
    left_recursive: frozenset = frozenset()   # addresses of left-recursive rules
    source_map: dict[int, str] = field(default_factory=dict)
    entry: int = 0

    @property
    def halt(self) -> int:
        # the top-level Call returns here with an empty stack
        return self.entry + 1

    def __len__(self):
        return len(self.instructions)

    def to_records(self) -> list[dict]:
        labels = _labels(self)
        out = []
        for addr, ins in enumerate(self.instructions):
            rec = {"address": addr, "opcode": ins.op, "label": labels.get(addr)}
            if ins.op == "Char":
                rec["operand"] = ins.arg
            elif ins.arg is not None:
                rec["operand"] = addr + ins.arg
                rec["target"] = labels.get(addr + ins.arg)
            if ins.op == "Call":
                rec["level"] = ins.level
            if addr in self.source_map:
                rec["source"] = self.source_map[addr]
            out.append(rec)
        return out


# -- compilation --------------------------------------------------------------

def compile_grammar(grammar: Grammar, *, tail_calls: bool = True) -> Program:
    """Translate a star-free, closed grammar into a machine program.

    The program is ``Call <start>`` followed by each rule's body and a
    ``Return``.  With ``tail_calls``, a call to a non-left-recursive rule that
    is immediately followed by ``Return`` becomes a ``Jump``; this is exact
    because such a rule can never consult its own frame.
    """
    if has_stars(grammar):
        raise CompileError("grammar contains repetitions; run desugar_stars first")
    missing = validate_closed(grammar)
    if missing:
        raise CompileError("; ".join(str(d) for d in missing))

    rules = dict(grammar.rules)
    start = grammar.start
    if not isinstance(start, Nonterminal):
        name = "start"
        while name in rules:
            name += "_"
        rules[name] = start
        grammar = Grammar(rules, Nonterminal(name), grammar.synthetic | {name})
        start = grammar.start

    code: list[list] = [["Call", start.name, start.level]]
    source_map: dict[int, str] = {0: "<start>"}
    rule_address: dict[str, int] = {}

    def emit(op, arg=None, level=1, where=None):
        code.append([op, arg, level])
        if where is not None:
            source_map[len(code) - 1] = where
        return len(code) - 1

    def patch(addr):
        code[addr][1] = len(code) - addr

    def gen(e: Expr, where: str):
        if isinstance(e, Empty):
            return
        if isinstance(e, Terminal):
            emit("Char", e.symbol, where=where)
        elif isinstance(e, Any):
            emit("Any", where=where)
        elif isinstance(e, Nonterminal):
            emit("Call", e.name, e.level, where=where)
        elif isinstance(e, Sequence):
            gen(e.left, where)
            gen(e.right, where)
        elif isinstance(e, Choice):
            choice = emit("Choice", 0, where=where)
            gen(e.first, where)
            commit = emit("Commit", 0, where=where)
            patch(choice)
            gen(e.second, where)
            patch(commit)
        elif isinstance(e, Not):
            choice = emit("Choice", 0, where=where)
            gen(e.body, where)
            commit = emit("Commit", 0, where=where)
            patch(commit)
            emit("Fail", where=where)
            patch(choice)
        else:
            raise CompileError(f"cannot compile {e!r}")

    for name, body in rules.items():
        rule_address[name] = len(code)
        gen(body, name)
        emit("Return", where=name)

    lr = grammar.left_recursive
    instructions = []
    for addr, (op, arg, level) in enumerate(code):
        if op == "Call":
            offset = rule_address[arg] - addr
            if (tail_calls and addr > 0 and arg not in lr
                    and code[addr + 1][0] == "Return"):
                instructions.append(Instruction("Jump", offset))
            else:
                instructions.append(Instruction("Call", offset, level))
        else:
            instructions.append(Instruction(op, arg))
    return Program(
        instructions=instructions,
        rule_address=rule_address,
        left_recursive=frozenset(rule_address[n] for n in lr),
        source_map=source_map,
    )


# -- machine state ------------------------------------------------------------

class ReturnFrame(NamedTuple):
    pc: int


class BacktrackFrame(NamedTuple):
    pc: int
    pos: int


class LRFrame:
    """Left-recursive call frame; ``result`` is ``None`` for failure."""

    __slots__ = ("pc_r", "pc_a", "pos", "result", "level", "read", "index", "floor", "touched")

    def __init__(self, pc_r, pc_a, pos, result=None, level=1):
        self.pc_r = pc_r
        self.pc_a = pc_a
        self.pos = pos
        self.result = result
        self.level = level
        # bookkeeping for result reuse, see Machine
        self.read = False
        self.index = 0
        self.floor = 0
        self.touched = {pc_a}

    def astuple(self):
        return (self.pc_r, self.pc_a, self.pos, self.result, self.level)

    def __eq__(self, other):
        return isinstance(other, LRFrame) and self.astuple() == other.astuple()

    def __repr__(self):
        return "LRFrame(%r, %r, %r, %r, %r)" % self.astuple()


@dataclass
class Running:
    pc: int
    pos: int
    stack: list


@dataclass
class Failing:
    stack: list


@dataclass
class Halted:
    pos: int


@dataclass
class HaltedFail:
    pass


class Machine:
    """Executes a program over one input.

    ``plain_calls`` pushes ordinary return frames for calls to rules that are
    not left-recursive.  ``left_assoc_default`` makes a re-entrant call with
    the same level fail instead of succeed; the entry call then runs at
    level 0 so the start rule can still grow.  ``skip_unread_rounds`` pops a
    frame at ``Return`` when no call consulted it during the round just
    finished, since another round would repeat the same result.
    ``reuse_results`` keeps the outcome of finished calls that did not depend
    on an enclosing frame, exactly as the interpreter option of that name.
    """

    def __init__(self, program: Program, text: str, *, plain_calls: bool = False,
                 left_assoc_default: bool = False, skip_unread_rounds: bool = True,
                 reuse_results: bool = True, max_steps: int | None = None):
        self.program = program
        self.code = program.instructions
        self.text = text
        self.plain_calls = plain_calls
        self.left_assoc_default = left_assoc_default
        self.skip_unread_rounds = skip_unread_rounds
        self.reuse_results = reuse_results
        self.max_steps = max_steps
        self.live: dict[tuple[int, int], LRFrame] = {}
        self.frames: list[LRFrame] = []
        self.finished: dict[tuple[int, int, int], tuple] = {}
        self.steps = 0

    def initial(self) -> Running:
        self.live.clear()
        self.frames.clear()
        self.finished.clear()
        return Running(self.program.entry, 0, [])

    def _push(self, stack, frame):
        stack.append(frame)
        if type(frame) is LRFrame:
            self.live[frame.pc_a, frame.pos] = frame
            frame.index = frame.floor = len(self.frames)
            self.frames.append(frame)

    def _pop(self, stack):
        frame = stack.pop()
        if type(frame) is LRFrame:
            del self.live[frame.pc_a, frame.pos]
            self.frames.pop()
        return frame

    def _finish(self, frame, result):
        """Record a popped frame's final outcome and pass its dependencies up."""
        if self.reuse_results and frame.floor >= frame.index:
            self.finished[frame.pc_a, frame.pos, frame.level] = (result, frozenset(frame.touched))
        if self.frames:
            parent = self.frames[-1]
            if frame.floor < parent.floor:
                parent.floor = frame.floor
            if parent.pos == frame.pos:
                parent.touched |= frame.touched

    def _resume(self, pc, pos, stack):
        if not stack and pc == self.program.halt:
            return Halted(pos)
        return Running(pc, pos, stack)

    def step(self, state):
        """Perform exactly one transition."""
        if isinstance(state, Failing):
            stack = state.stack
            if not stack:
                return HaltedFail()
            frame = self._pop(stack)
            t = type(frame)
            if t is BacktrackFrame:
                return Running(frame.pc, frame.pos, stack)
            if t is LRFrame:
                self._finish(frame, frame.result)
                if frame.result is not None:
                    return self._resume(frame.pc_r, frame.result, stack)
            return state
        if not isinstance(state, Running):
            raise ValueError(f"cannot step from {state!r}")

        pc, pos, stack = state.pc, state.pos, state.stack
        if not 0 <= pc < len(self.code):
            raise IndexError(f"program counter {pc} outside program")
        op, arg, level = self.code[pc]
        text = self.text

        if op == "Char":
            if pos < len(text) and text[pos] == arg:
                return Running(pc + 1, pos + 1, stack)
            return Failing(stack)
        if op == "Any":
            if pos < len(text):
                return Running(pc + 1, pos + 1, stack)
            return Failing(stack)
        if op == "Choice":
            self._push(stack, BacktrackFrame(pc + arg, pos))
            return Running(pc + 1, pos, stack)
        if op == "Jump":
            return Running(pc + arg, pos, stack)
        if op == "Commit":
            self._pop(stack)
            return Running(pc + arg, pos, stack)
        if op == "Fail":
            return Failing(stack)
        if op == "Call":
            target = pc + arg
            if self.plain_calls and target not in self.program.left_recursive:
                self._push(stack, ReturnFrame(pc + 1))
                return Running(target, pos, stack)
            if pc == self.program.entry and self.left_assoc_default:
                level = 0
            frame = self.live.get((target, pos))
            if frame is None:
                if self.reuse_results:
                    done = self.finished.get((target, pos, level))
                    if done is not None:
                        result, touched = done
                        live = self.live
                        if not any((other, pos) in live for other in touched):
                            if self.frames and self.frames[-1].pos == pos:
                                self.frames[-1].touched |= touched
                            if result is None:
                                return Failing(stack)
                            return self._resume(pc + 1, result, stack)
                self._push(stack, LRFrame(pc + 1, target, pos, None, level))
                return Running(target, pos, stack)
            frame.read = True
            caller = self.frames[-1]
            caller.touched.add(target)
            if frame.index < caller.floor:
                caller.floor = frame.index
            if frame.result is None:
                return Failing(stack)
            if level > frame.level or (level == frame.level and not self.left_assoc_default):
                return Running(pc + 1, frame.result, stack)
            return Failing(stack)
        if op == "Return":
            frame = stack[-1]
            if type(frame) is ReturnFrame:
                stack.pop()
                return self._resume(frame.pc, pos, stack)
            if frame.result is None or pos > frame.result:
                if self.skip_unread_rounds and not frame.read:
                    self._pop(stack)
                    self._finish(frame, pos)
                    return self._resume(frame.pc_r, pos, stack)
                frame.result = pos
                frame.read = False
                return Running(frame.pc_a, frame.pos, stack)
            self._pop(stack)
            self._finish(frame, frame.result)
            return self._resume(frame.pc_r, frame.result, stack)
        raise ValueError(f"unknown opcode {op}")

    def run(self) -> int | None:
        """Consumed length on success, ``None`` on failure."""
        state = self.initial()
        step = self.step
        max_steps = self.max_steps
        while True:
            t = type(state)
            if t is Halted:
                return state.pos
            if t is HaltedFail:
                return None
            self.steps += 1
            if max_steps is not None and self.steps > max_steps:
                raise StepBudgetExceeded(f"machine ran more than {max_steps} steps")
            state = step(state)


def run(program: Program, text: str, **options) -> int | None:
    """Run ``program`` on ``text``; see :class:`Machine` for the options."""
    machine = Machine(program, text, **options)
    result = machine.run()
    if machine.live:
        raise EngineError("left-recursive frames left live at halt")
    return result


# -- listings -----------------------------------------------------------------

def _labels(program: Program) -> dict[int, str]:
    labels = {addr: name for name, addr in program.rule_address.items()}
    used = set(labels.values())
    owners = sorted(program.rule_address.items(), key=lambda kv: kv[1])
    counters = {}
    for addr, ins in enumerate(program.instructions):
        if ins.op in ("Choice", "Jump", "Commit", "Call") and ins.arg is not None:
            target = addr + ins.arg
            if target in labels:
                continue
            owner = "L"
            for name, start in owners:
                if start <= addr:
                    owner = name
            while True:
                counters[owner] = counters.get(owner, 0) + 1
                label = f"{owner}{counters[owner]}"
                if label not in used:
                    break
            labels[target] = label
            used.add(label)
    return labels


def disassemble(program: Program) -> str:
    """One instruction per line; rules and jump targets get labels.

    ``Call`` operands are rule names, with ``^k`` appended when the level is
    not 1; ``Char`` operands are quoted.
    """
    labels = _labels(program)
    lines = []
    for addr, ins in enumerate(program.instructions):
        prefix = f"{labels[addr]}:" if addr in labels else ""
        if ins.op == "Char":
            text = f"Char {_quote(ins.arg)}"
        elif ins.op in ("Choice", "Jump", "Commit", "Call"):
            text = f"{ins.op} {labels[addr + ins.arg]}"
            if ins.op == "Call" and ins.level != 1:
                text += f"^{ins.level}"
        else:
            text = ins.op
        lines.append(f"{prefix:<10}{text}".rstrip())
    return "\n".join(lines) + "\n"


def _quote(symbol: str) -> str:
    escaped = symbol.encode("unicode_escape").decode("ascii").replace("'", "\\'")
    return f"'{escaped}'"


_LINE = re.compile(r"^(?:(?P<label>[^\s:]+):)?\s*(?P<op>[A-Za-z]+)(?:\s+(?P<arg>.+?))?\s*$")


def assemble(listing: str) -> list[Instruction]:
    """Read a :func:`disassemble` listing back into instructions."""
    rows = []
    labels = {}
    for line in listing.splitlines():
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m or m.group("op") not in OPCODES:
            raise ValueError(f"bad listing line: {line!r}")
        if m.group("label"):
            labels[m.group("label")] = len(rows)
        rows.append((m.group("op"), m.group("arg")))
    out = []
    for addr, (op, arg) in enumerate(rows):
        if op == "Char":
            symbol = arg[1:-1].replace("\\'", "'").encode("ascii").decode("unicode_escape")
            out.append(Instruction("Char", symbol))
        elif op in ("Choice", "Jump", "Commit", "Call"):
            level = 1
            if op == "Call" and "^" in arg:
                arg, lvl = arg.rsplit("^", 1)
                level = int(lvl)
            offset = labels[arg] - addr
            out.append(Instruction(op, offset, level) if op == "Call" else Instruction(op, offset))
        else:
            out.append(Instruction(op))
    return out


def step(program: Program, text: str, state, **options):
    """Single transition from ``state``; its stack is updated in place."""
    machine = Machine(program, text, **options)
    if isinstance(state, (Running, Failing)):
        machine.frames = [f for f in state.stack if type(f) is LRFrame]
        machine.live = {(f.pc_a, f.pos): f for f in machine.frames}
        for i, f in enumerate(machine.frames):
            f.index = i
    return machine.step(state)
