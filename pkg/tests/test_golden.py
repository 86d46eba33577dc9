"""Golden files for parse, eval and normalize over the shipped examples.

Regenerate with QUONLANG_REGEN_GOLDEN=1 after an intended output change.
"""

import io
import os
from pathlib import Path

import pytest

from quonlang.cli import run
from quonlang.dsl import parse, render

ROOT = Path(__file__).parent.parent
GOLDEN = Path(__file__).parent / "golden"
EXAMPLES = sorted((ROOT / "quon_examples").glob("*.quon"))
REGEN = os.environ.get("QUONLANG_REGEN_GOLDEN") == "1"


def produce(kind: str, path: Path) -> str:
    if kind == "parse":
        return render(parse(path.read_text(encoding="utf-8")))
    out = io.StringIO()
    assert run([kind, str(path)], out=out) == 0
    return out.getvalue()


@pytest.mark.parametrize("kind", ["parse", "eval", "normalize"])
@pytest.mark.parametrize("path", EXAMPLES, ids=lambda p: p.stem)
def test_golden(kind, path):
    got = produce(kind, path)
    target = GOLDEN / f"{path.stem}.{kind}.txt"
    if REGEN:
        target.write_text(got, encoding="utf-8")
    assert target.exists(), f"missing golden {target.name}; regenerate with QUONLANG_REGEN_GOLDEN=1"
    assert got == target.read_text(encoding="utf-8")
