"""Parse trees and their two serializations.

A parse is a tuple of :class:`Leaf` and :class:`Node` values.  ``to_brackets``
linearizes it as ``E[E[n]+n]``; ``to_structured`` produces JSON-ready records
with the input span of every node, and ``from_structured`` reads them back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union


@dataclass(frozen=True)
class Leaf:
    symbol: str


@dataclass(frozen=True)
class Node:
    tag: str
    children: tuple = ()
    synthetic: bool = False


ParseNode = Union[Leaf, Node]


def leaves(nodes: Iterable[ParseNode]) -> str:
    """Concatenate leaf symbols left to right."""
    out = []
    stack = list(reversed(tuple(nodes)))
    while stack:
        n = stack.pop()
        if isinstance(n, Leaf):
            out.append(n.symbol)
        else:
            stack.extend(reversed(n.children))
    return "".join(out)


def erase_synthetic(nodes: Iterable[ParseNode]) -> tuple:
    """Splice the children of synthetic nodes into their parents."""
    out = []
    for n in nodes:
        if isinstance(n, Leaf):
            out.append(n)
        elif n.synthetic:
            out.extend(erase_synthetic(n.children))
        else:
            out.append(Node(n.tag, erase_synthetic(n.children)))
    return tuple(out)


def to_brackets(nodes: Iterable[ParseNode] | ParseNode) -> str:
    if isinstance(nodes, (Leaf, Node)):
        nodes = (nodes,)
    out = []
    # explicit stack: left-recursive parses nest as deep as the input is long
    stack: list = [iter(nodes)]
    while stack:
        n = next(stack[-1], None)
        if n is None:
            stack.pop()
            continue
        if n is _CLOSE:
            out.append("]")
        elif isinstance(n, Leaf):
            out.append(n.symbol)
        elif n.synthetic:
            stack.append(iter(n.children))
        else:
            out.append(n.tag)
            out.append("[")
            stack.append(iter((*n.children, _CLOSE)))
    return "".join(out)


_CLOSE = object()


def to_structured(nodes: Iterable[ParseNode] | ParseNode, start: int = 0) -> list[dict]:
    """Encode a parse as nested records with ``[start, end)`` spans.

    Leaf records are ``{"leaf": symbol, "start": i, "end": i + 1}``; node
    records are ``{"tag": name, "start": i, "end": j, "children": [...]}``,
    plus ``"synthetic": true`` for rules introduced by star desugaring.
    """
    if isinstance(nodes, (Leaf, Node)):
        nodes = (nodes,)
    records, _ = _encode(tuple(nodes), start)
    return records


def _encode(nodes: tuple, pos: int) -> tuple[list, int]:
    root: list = []
    stack = [(iter(nodes), root, None)]
    while stack:
        it, out, rec = stack[-1]
        n = next(it, None)
        if n is None:
            stack.pop()
            if rec is not None:
                rec["end"] = pos
        elif isinstance(n, Leaf):
            out.append({"leaf": n.symbol, "start": pos, "end": pos + 1})
            pos += 1
        else:
            child = {"tag": n.tag, "start": pos, "end": None, "children": []}
            if n.synthetic:
                child["synthetic"] = True
            out.append(child)
            stack.append((iter(n.children), child["children"], child))
    return root, pos


def from_structured(records: list[dict]) -> tuple:
    """Inverse of :func:`to_structured`; raises ``ValueError`` on bad spans."""
    nodes, _ = _decode(records, records[0]["start"] if records else 0)
    return nodes


def _decode(records: list[dict], pos: int) -> tuple[tuple, int]:
    root: list = []
    stack = [(iter(records), root, None)]
    while stack:
        it, out, rec = stack[-1]
        r = next(it, None)
        if r is None:
            stack.pop()
            if rec is not None:
                if pos != rec["end"]:
                    raise ValueError(f"node {rec['tag']} ends at {rec['end']}, "
                                     f"children end at {pos}")
                stack[-1][1].append(Node(rec["tag"], tuple(out), rec.get("synthetic", False)))
            continue
        if r["start"] != pos:
            raise ValueError(f"span starts at {r['start']}, expected {pos}")
        if "leaf" in r:
            if r["end"] != pos + 1:
                raise ValueError(f"leaf span [{r['start']}, {r['end']}) is not one symbol")
            out.append(Leaf(r["leaf"]))
            pos += 1
        else:
            stack.append((iter(r["children"]), [], r))
    return tuple(root), pos
