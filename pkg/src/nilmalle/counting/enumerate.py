"""Deterministic enumeration of squarefree tuples under a weighted bound."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterator, Sequence

import numpy as np

from ..arith.sieve import SieveTables, sieve, trial_factor
from ..groups.core import LGroup, TableGroup
from ..groups.invariants import exponent_e
from ..param.tuples import SquarefreeTuple


def iroot(n: int, k: int) -> int:
    """Largest x >= 0 with x**k <= n."""
    if n < 1:
        return 0
    if k == 1:
        return n
    x = int(round(n ** (1.0 / k))) if n < 1 << 1000 else 1 << (n.bit_length() // k + 1)
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class Shard:
    count: int = 1
    index: int = 0

    def __post_init__(self):
        if self.count < 1 or not 0 <= self.index < self.count:
            raise ValueError(f"bad shard {self.index}/{self.count}")


@dataclass(frozen=True)
class EnumConstraints:
    """Bound and side conditions for the tuple stream.

    ``exponents[g - 1]`` is e_g; the bound is prod |v_g|^{e_g} <= X.
    ``two_unramified`` keeps odd entries whose assembled coordinates are
    all 1 mod 4 (2-groups) so that no prime above 2 ramifies.
    """

    X: int
    exponents: tuple[int, ...]
    signed: bool
    two_unramified: bool = False
    include_trivial: bool = False
    shard: Shard = field(default_factory=Shard)

    @classmethod
    def for_group(cls, G: TableGroup, X: int, **kw) -> "EnumConstraints":
        exps = tuple(exponent_e(G, g) for g in range(1, G.order))
        signed = isinstance(G, LGroup) and G.l == 2
        return cls(int(X), exps, signed, **kw)


def variable_order(exps: Sequence[int]) -> list[int]:
    """Element indices by decreasing exponent, ties broken by index."""
    return sorted(range(1, len(exps) + 1), key=lambda g: (-exps[g - 1], g))


def _support_key(G: TableGroup, g: int) -> tuple[int, ...]:
    if isinstance(G, LGroup) and G.l == 2:
        return ()
    return tuple(trial_factor(G.element_order(g)))


@lru_cache(maxsize=64)
def _allowed_mask(N: int, key: tuple[int, ...], order: int, odd_only: bool) -> np.ndarray:
    """Squarefree n <= N all of whose primes satisfy the support rule encoded by ``key``.

    key == () means every prime is allowed; otherwise primes must avoid
    ``order`` and be 1 mod each prime in key.
    """
    tab = sieve(max(N, 2))
    mask = tab.squarefree[: N + 1].copy()
    mask[0] = False
    if key:
        bad = [int(p) for p in tab.primes if p <= N and (order % p == 0 or any(p % q != 1 for q in key))]
        for p in bad:
            mask[p::p] = False
    if odd_only:
        mask[0::2] = False
    return mask


def candidate_values(G: TableGroup, g: int, N: int, odd_only: bool = False) -> np.ndarray:
    """Admissible |v_g| in 1..N in increasing order."""
    mask = _allowed_mask(N, _support_key(G, g), G.order, odd_only)
    return np.nonzero(mask)[0]


def coords_one_mod_4(G: LGroup, values: Sequence[int]) -> bool:
    for j in range(G.r):
        w = 1
        for g, v in enumerate(values, start=1):
            if (g >> j) & 1:
                w *= v
        if w % 4 != 1:
            return False
    return True


class TupleWalker:
    """Recursive assignment of variables in decreasing-exponent order.

    The last ``bulk_tail`` variables are left unassigned so that callers may
    count them in bulk; each yielded state is (values, primes, remaining
    budget, product of |v| for assigned odd entries).
    """

    def __init__(self, G: TableGroup, cons: EnumConstraints, bulk_tail: int = 0):
        self.G = G
        self.cons = cons
        self.order = variable_order(cons.exponents)
        self.bulk_tail = bulk_tail
        e_min = min(cons.exponents) if cons.exponents else 1
        self.N = max(iroot(cons.X, e_min), 1)
        self.tab: SieveTables = sieve(max(self.N, 2))
        self.cands = {
            g: candidate_values(G, g, self.N, cons.two_unramified) for g in set(self.order)
        }

    def walk(self) -> Iterator[tuple[list[int], list[tuple[int, ...]], int, bool]]:
        n = self.G.order
        values = [1] * (n - 1)
        primes: list[tuple[int, ...]] = [()] * (n - 1)
        explicit = self.order[: len(self.order) - self.bulk_tail]
        cons = self.cons
        tab = self.tab
        shard = cons.shard

        def rec(depth: int, budget: int, used: int, neg: bool):
            if depth == len(explicit):
                yield values, primes, budget, neg
                return
            g = explicit[depth]
            e = cons.exponents[g - 1]
            bound = iroot(budget, e)
            cands = self.cands[g]
            hi = int(np.searchsorted(cands, bound, side="right"))
            idx = 0
            for a in cands[:hi].tolist():
                if a > 1 and gcd(a, used) != 1:
                    continue
                signs = (1, -1) if (cons.signed and not neg) else (1,)
                for s in signs:
                    if depth == 0 and shard.count > 1:
                        take = idx % shard.count == shard.index
                        idx += 1
                        if not take:
                            continue
                    values[g - 1] = s * a
                    primes[g - 1] = tuple(tab.factor(a)) if a > 1 else ()
                    yield from rec(depth + 1, budget // a**e, used * a, neg or s < 0)
                values[g - 1] = 1
                primes[g - 1] = ()

        if cons.X < 1:
            return
        yield from rec(0, cons.X, 1, False)


def enumerate_tuples(G: TableGroup, cons: EnumConstraints) -> Iterator[SquarefreeTuple]:
    """Every admissible tuple with weight <= X, once each, in a fixed order."""
    check_two = cons.two_unramified and isinstance(G, LGroup) and G.l == 2
    for values, primes, _, _ in TupleWalker(G, cons).walk():
        if not cons.include_trivial and all(v == 1 for v in values):
            continue
        if check_two and not coords_one_mod_4(G, values):
            continue
        yield SquarefreeTuple(G, tuple(values), tuple(primes))
