"""Squarefree tuples indexed by the nonidentity elements of a group."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod
from typing import Mapping, Sequence

from ..arith.sieve import is_squarefree, trial_factor
from ..groups.core import LGroup, NilpotentGroup, TableGroup


class NotPrim(ValueError):
    pass


@dataclass(frozen=True)
class SquarefreeTuple:
    """Entries v_g for g = 1 .. #G - 1 (element indices), with their prime factors.

    ``primes[g - 1]`` lists the primes (2 included) dividing ``values[g - 1]``.
    """

    group: TableGroup
    values: tuple[int, ...]
    primes: tuple[tuple[int, ...], ...]

    def value(self, g: int) -> int:
        return self.values[g - 1]

    def items(self):
        return zip(range(1, self.group.order), self.values, self.primes)

    def as_dict(self) -> dict[int, int]:
        return {g: v for g, v, _ in self.items() if v != 1}

    def negative_count(self) -> int:
        return sum(1 for v in self.values if v < 0)


def make_tuple(G: TableGroup, entries: Mapping[int, int] | Sequence[int], check: bool = True) -> SquarefreeTuple:
    """Build a tuple from {g: v_g} (missing entries are 1) or a full value list."""
    n = G.order
    if isinstance(entries, Mapping):
        vals = [1] * (n - 1)
        for g, v in entries.items():
            if not 1 <= g < n:
                raise NotPrim(f"element {g} out of range")
            vals[g - 1] = int(v)
    else:
        vals = [int(v) for v in entries]
        if len(vals) != n - 1:
            raise NotPrim(f"expected {n - 1} entries")
    primes = tuple(tuple(trial_factor(v)) for v in vals)
    tup = SquarefreeTuple(G, tuple(vals), primes)
    if check:
        validate(tup)
    return tup


def allowed_prime(G: TableGroup, g: int, p: int) -> bool:
    """Support rule: may the prime p divide v_g?"""
    if isinstance(G, LGroup) and G.l == 2:
        return True
    if G.order % p == 0:
        return False
    o = G.element_order(g)
    return all(p % q == 1 for q in trial_factor(o))


def validate(tup: SquarefreeTuple) -> None:
    G = tup.group
    signed = isinstance(G, LGroup) and G.l == 2
    seen: dict[int, int] = {}
    for g, v, ps in tup.items():
        if v == 0 or not is_squarefree(v):
            raise NotPrim(f"v_{g} = {v} is not squarefree")
        if v < 0 and not signed:
            raise NotPrim("negative entries only allowed for 2-groups")
        for p in ps:
            if p in seen:
                raise NotPrim(f"prime {p} divides v_{seen[p]} and v_{g}")
            seen[p] = g
            if not allowed_prime(G, g, p):
                raise NotPrim(f"prime {p} not allowed in v_{g}")
    if tup.negative_count() > 1:
        raise NotPrim("more than one negative entry")


def pairwise_coprime(values: Sequence[int]) -> bool:
    vals = [abs(v) for v in values]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if gcd(vals[i], vals[j]) != 1:
                return False
    return sum(1 for v in values if v < 0) <= 1


def weight(tup: SquarefreeTuple, exps: Sequence[int]) -> int:
    """prod |v_g|^{e_g} in exact integers."""
    return prod(abs(v) ** e for v, e in zip(tup.values, exps))


def nilpotent_components(G: NilpotentGroup, tup: SquarefreeTuple) -> list[SquarefreeTuple]:
    """Split a tuple for a direct product into one tuple per factor.

    The entry of the factor element h collects v_g over all g whose
    component in that factor is h.
    """
    out = []
    for j, F in enumerate(G.factors):
        vals = [1] * (F.order - 1)
        prs: list[list[int]] = [[] for _ in range(F.order - 1)]
        for g, v, ps in tup.items():
            h = G.components(g)[j]
            if h:
                vals[h - 1] *= v
                prs[h - 1].extend(ps)
        out.append(SquarefreeTuple(F, tuple(vals), tuple(tuple(sorted(p)) for p in prs)))
    return out
