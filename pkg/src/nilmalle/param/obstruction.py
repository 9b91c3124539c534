"""Per-step descriptions of the embedding obstruction and their local invariants.

A step whose cocycle is cohomologous to a sum of cup products of
coordinate characters x_j (from earlier split steps) has obstruction
class sum (w_j, w_k), whose local invariants are Hilbert symbols.  Other
nonzero steps are decided through Frobenius data and a lift search.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from ..arith.sieve import trial_factor
from ..arith.symbols import INFINITY, TWO, Place, hilbert
from ..groups.core import LGroup, TableGroup, is_coboundary
from ..groups.linalg import solve_mod


@dataclass(frozen=True)
class CoordChar:
    j: int


@dataclass(frozen=True)
class ConstChar:
    c: int


Factor = Union[CoordChar, ConstChar]


@dataclass(frozen=True)
class TrivialTheta:
    kind = "trivial"


@dataclass(frozen=True)
class CupExpression:
    terms: tuple[tuple[Factor, Factor], ...]
    kind = "cup"


@dataclass(frozen=True)
class FrobCondition:
    abelian: bool
    kind = "frob"


Step = Union[TrivialTheta, CupExpression, FrobCondition]


class SpecMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ObstructionSpec:
    steps: tuple[Step, ...]

    def to_json(self) -> list[dict]:
        out = []
        for s in self.steps:
            if isinstance(s, TrivialTheta):
                out.append({"kind": "trivial"})
            elif isinstance(s, CupExpression):
                out.append({"kind": "cup", "terms": [[_factor_json(f) for f in t] for t in s.terms]})
            else:
                out.append({"kind": "frob", "abelian": s.abelian})
        return out

    @classmethod
    def from_json(cls, data: Sequence[dict]) -> "ObstructionSpec":
        steps: list[Step] = []
        for d in data:
            kind = d["kind"]
            if kind == "trivial":
                steps.append(TrivialTheta())
            elif kind == "cup":
                steps.append(CupExpression(tuple(tuple(_factor_from(f) for f in t) for t in d["terms"])))
            elif kind == "frob":
                steps.append(FrobCondition(bool(d["abelian"])))
            else:
                raise SpecMismatch(f"unknown step kind {kind!r}")
        return cls(tuple(steps))


def _factor_json(f: Factor) -> dict:
    return {"coord": f.j} if isinstance(f, CoordChar) else {"const": f.c}


def _factor_from(d: dict) -> Factor:
    if "coord" in d:
        return CoordChar(int(d["coord"]))
    return ConstChar(int(d["const"]))


def cup_cochain(G: TableGroup, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x u y)(g, h) = x(g) y(h) for F_2-valued functions on G."""
    return np.outer(x, y) % 2


def coordinate_function(G: LGroup, j: int) -> np.ndarray:
    return np.array([G.coord(g, j) for g in range(G.order)], dtype=np.int64)


def find_cup_expression(G: LGroup, i: int) -> CupExpression | None:
    """Express theta_i, up to a coboundary, as a sum of cups of split coordinates below i."""
    if G.l != 2:
        return None
    H = G.level(i - 1)
    theta = G.theta(i).table
    n = H.order
    split = [j for j in range(1, i) if G.theta(j).is_zero()]
    pairs = [(j, k) for a, j in enumerate(split) for k in split[a:]]
    if not pairs:
        return None
    xs = {j: coordinate_function(H, j) for j in split}
    cols = [cup_cochain(H, xs[j], xs[k]).reshape(-1) for j, k in pairs]
    # coboundary columns for c(g), g != id: c(g) + c(h) - c(gh)
    gi = np.repeat(np.arange(n), n)
    hi = np.tile(np.arange(n), n)
    prod_ = H.table[gi, hi]
    for g in range(1, n):
        col = (gi == g).astype(np.int64) + (hi == g) - (prod_ == g)
        cols.append(col % 2)
    mat = np.stack(cols, axis=1)
    sol = solve_mod(mat, theta.reshape(-1), 2)
    if sol is None:
        return None
    terms = tuple((CoordChar(j), CoordChar(k)) for (j, k), a in zip(pairs, sol[: len(pairs)]) if a)
    return CupExpression(terms)


def derive_spec(G: LGroup) -> ObstructionSpec:
    steps: list[Step] = []
    for i in range(1, G.r + 1):
        if G.theta(i).is_zero():
            steps.append(TrivialTheta())
            continue
        cup = find_cup_expression(G, i)
        if cup is not None:
            steps.append(cup)
        else:
            steps.append(FrobCondition(abelian=G.level(i - 1).is_abelian))
    return ObstructionSpec(tuple(steps))


def frob_only_spec(G: LGroup) -> ObstructionSpec:
    """Same steps, but every nonzero one decided through Frobenius data."""
    return ObstructionSpec(
        tuple(
            TrivialTheta() if G.theta(i).is_zero() else FrobCondition(abelian=G.level(i - 1).is_abelian)
            for i in range(1, G.r + 1)
        )
    )


def check_spec(G: LGroup, spec: ObstructionSpec) -> None:
    """Structural checks: step count, zero steps, coordinate references, cohomology of cup steps."""
    if len(spec.steps) != G.r:
        raise SpecMismatch(f"spec has {len(spec.steps)} steps, group has {G.r}")
    if not isinstance(spec.steps[0], TrivialTheta):
        raise SpecMismatch("step 1 must be trivial")
    for i, s in enumerate(spec.steps, start=1):
        zero = G.theta(i).is_zero()
        if isinstance(s, TrivialTheta) != zero:
            raise SpecMismatch(f"step {i}: trivial marker disagrees with cocycle")
        if isinstance(s, CupExpression):
            refs = [f.j for t in s.terms for f in t if isinstance(f, CoordChar)]
            if any(j >= i or not G.theta(j).is_zero() for j in refs):
                raise SpecMismatch(f"step {i}: cup refers to a non-split or later coordinate")
            if all(isinstance(f, CoordChar) for t in s.terms for f in t):
                H = G.level(i - 1)
                total = np.zeros((H.order, H.order), dtype=np.int64)
                for f1, f2 in s.terms:
                    total += cup_cochain(H, coordinate_function(H, f1.j), coordinate_function(H, f2.j))
                if is_coboundary(H, (G.theta(i).table - total) % 2, 2) is None:
                    raise SpecMismatch(f"step {i}: cup expression not cohomologous to the cocycle")
        if isinstance(s, FrobCondition) and s.abelian != G.level(i - 1).is_abelian:
            raise SpecMismatch(f"step {i}: abelian flag is wrong")


def eval_factor(f: Factor, w: Sequence[int]) -> int:
    return w[f.j - 1] if isinstance(f, CoordChar) else f.c


def step_obstruction_invariants(w: Sequence[int], step: CupExpression, primes: Iterable[int] | None = None) -> dict[Place, int]:
    """Local invariants of sum (f, f') at infinity, 2 and every odd prime of the involved values.

    ``w`` are the Pow coordinates; ``primes`` may supply the odd primes
    dividing them, so they need not be factored again.
    """
    vals = [(eval_factor(a, w), eval_factor(b, w)) for a, b in step.terms]
    if primes is None:
        ps: set[int] = set()
        for a, b in vals:
            ps.update(trial_factor(a))
            ps.update(trial_factor(b))
    else:
        ps = set(primes)
    places = [Place.odd(p) for p in sorted(ps) if p != 2] + [TWO, INFINITY]
    out: dict[Place, int] = {}
    for v in places:
        s = 0
        for a, b in vals:
            s ^= hilbert(a, b, v)
        out[v] = s
    return out


def reciprocity_audit(w: Sequence[int], spec: ObstructionSpec) -> bool:
    for s in spec.steps:
        if isinstance(s, CupExpression):
            if sum(step_obstruction_invariants(w, s).values()) % 2:
                return False
    return True
