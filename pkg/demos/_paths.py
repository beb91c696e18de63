from pathlib import Path

GRAMMARS = Path(__file__).resolve().parent.parent / "grammars"


def grammar_source(name: str) -> str:
    return (GRAMMARS / f"{name}.peg").read_text(encoding="utf-8")
