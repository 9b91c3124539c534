"""The shipped group catalog: admissible sequences plus obstruction specs."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .groups.core import AdmissibleSequence, CocycleTable, GroupError, LGroup, build_group
from .param.obstruction import ObstructionSpec, check_spec, derive_spec

CATALOG_FILE = "catalog.json"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    group: LGroup
    spec: ObstructionSpec
    description: str = ""


def sequence_to_json(name: str, seq: AdmissibleSequence, spec: ObstructionSpec | None, description: str = "") -> dict:
    out = {
        "name": name,
        "description": description,
        "l": seq.l,
        "r": seq.r,
        "cocycles": [c.flat() for c in seq.cocycles],
    }
    if spec is not None:
        out["steps"] = spec.to_json()
    return out


def entry_from_json(data: dict) -> CatalogEntry:
    """Validate and build one catalog record; raises GroupError subclasses on bad data."""
    l, r = int(data["l"]), int(data["r"])
    raw = data["cocycles"]
    if len(raw) != r:
        raise GroupError(f"{data.get('name')}: expected {r} cocycles, found {len(raw)}")
    cocycles = []
    for i, flat in enumerate(raw, start=1):
        n = l ** (i - 1)
        if len(flat) != n * n:
            raise GroupError(f"step {i}: cocycle has {len(flat)} entries, expected {n * n}")
        cocycles.append(CocycleTable(l, np.array(flat, dtype=np.int64).reshape(n, n)))
    G = build_group(AdmissibleSequence(l, tuple(cocycles)), name=data["name"])
    if "steps" in data:
        spec = ObstructionSpec.from_json(data["steps"])
        if l == 2:
            check_spec(G, spec)
    else:
        spec = derive_spec(G)
    return CatalogEntry(data["name"], G, spec, data.get("description", ""))


def _catalog_text() -> str:
    return resources.files("nilmalle.data").joinpath(CATALOG_FILE).read_text(encoding="utf-8")


def catalog_hash() -> str:
    return hashlib.sha256(_catalog_text().encode("utf-8")).hexdigest()[:16]


@lru_cache(maxsize=None)
def load_catalog() -> dict[str, CatalogEntry]:
    records = json.loads(_catalog_text())
    return {rec["name"]: entry_from_json(rec) for rec in records}


def load_file(path: str | Path) -> dict[str, CatalogEntry]:
    records = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(records, dict):
        records = [records]
    return {rec["name"]: entry_from_json(rec) for rec in records}


def get(name: str) -> CatalogEntry:
    cat = load_catalog()
    if name not in cat:
        raise KeyError(f"unknown group {name!r}; known: {', '.join(cat)}")
    return cat[name]


def names() -> list[str]:
    return list(load_catalog())
