"""Regenerate the shipped catalog JSON from the concrete group models.

Run as ``python -m nilmalle.catalog_build [output]``.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

from .catalog import sequence_to_json
from .groups.core import build_group
from .groups.models import all_sequences
from .param.obstruction import derive_spec

DESCRIPTIONS = {
    "C2": "cyclic of order 2",
    "V4": "Klein four group",
    "C4": "cyclic of order 4; theta_2 = x1 x1",
    "C8": "cyclic of order 8; theta_3 is the carry cocycle of Z/4",
    "C2xC4": "C2 x C4 (the A:C4 family with A = C2, where inversion is trivial)",
    "C2^3": "elementary abelian of order 8",
    "D4": "dihedral of order 8; theta_3 = x1 x2",
    "Q8": "quaternion group; theta_3 = x1 x1 + x1 x2 + x2 x2; i = (1,0,0), j = (0,1,0)",
    "C2^2xC4": "C2^2 x C4 (the A:C4 family with A = C2^2, where inversion is trivial)",
    "G64": "F2[x1,x2]/(x1^2,x2^2) semidirect F2^2 with (1,0) acting by 1+x1 and (0,1) by 1+x2",
    "Heis27": "Heisenberg group of upper unitriangular 3x3 matrices over F3",
}


def build_records() -> list[dict]:
    records = []
    for name, seq in all_sequences().items():
        G = build_group(seq, name=name)
        spec = derive_spec(G) if G.l == 2 else None
        records.append(sequence_to_json(name, seq, spec, DESCRIPTIONS.get(name, "")))
    return records


def render() -> str:
    return json.dumps(build_records(), separators=(",", ":")) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0]) if argv else Path(__file__).with_name("data") / "catalog.json"
    out.write_text(render(), encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
