"""Minimum block weight over index-2 refinements of the upper central series.

For a 2-group G, a refinement R is a chain 1 = G_r < ... < G_0 = G of
subgroups normal in G, each of index 2 in the previous one, passing
through every term of the upper central series.  Writing A_i = G_{i-1} - G_i,
the weight d(R) is the total size of the blocks A_i that contain an
involution, and kluners_d is its minimum over all refinements.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import GroupError, TableGroup, TooLarge
from .invariants import involution_locus, upper_central_series

SEARCH_LIMIT = 2**8


@dataclass(frozen=True)
class KlunersResult:
    value: int
    chain: tuple[frozenset[int], ...]
    involutions: int

    @property
    def slack(self) -> int:
        return self.value - self.involutions


def _bits(s) -> int:
    out = 0
    for g in s:
        out |= 1 << g
    return out


def _members(mask: int) -> list[int]:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return out


def maximal_normal_subgroups(G: TableGroup, H: frozenset[int]) -> list[frozenset[int]]:
    """Subgroups of index 2 in H that are normal in G."""
    hl = sorted(H)
    frat_gens = {G.mul(x, x) for x in hl} | {G.commutator(x, y) for x in hl for y in hl}
    phi = G.closure(frat_gens)
    # basis of H / Phi(H) by greedy extension
    basis: list[int] = []
    span = phi
    for x in hl:
        if x not in span:
            basis.append(x)
            span = G.closure(list(phi) + basis)
    k = len(basis)
    out = []
    for f in range(1, 2**k):
        gens = list(phi)
        ones = [b for j, b in enumerate(basis) if f >> j & 1]
        zeros = [b for j, b in enumerate(basis) if not f >> j & 1]
        gens += zeros
        gens += [G.mul(ones[0], b) for b in ones[1:]]
        N = G.closure(gens)
        if len(N) * 2 != len(H):
            raise GroupError("hyperplane construction failed")
        if all(G.conj(x, n) in N for n in N for x in range(G.order)):
            out.append(N)
    return out


def kluners_d(G: TableGroup) -> KlunersResult:
    if G.order > SEARCH_LIMIT:
        raise TooLarge(f"order {G.order} exceeds {SEARCH_LIMIT}")
    if G.order & (G.order - 1):
        raise GroupError("kluners_d is defined for 2-groups only")
    inv_mask = _bits(involution_locus(G))
    series = upper_central_series(G)
    series_masks = [_bits(z) for z in series]

    def floor_term(mask: int) -> int:
        best = 1
        for z in series_masks:
            if z != mask and (z & mask) == z and bin(z).count("1") > bin(best).count("1"):
                best = z
        return best

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, tuple[int, ...]]:
        if mask == 1:
            return 0, (mask,)
        H = frozenset(_members(mask))
        need = floor_term(mask)
        size = len(H) // 2
        top = (float("inf"), ())
        for N in maximal_normal_subgroups(G, H):
            nm = _bits(N)
            if nm & need != need:
                continue
            block = mask & ~nm
            cost = size if block & inv_mask else 0
            sub, chain = best(nm)
            if cost + sub < top[0]:
                top = (cost + sub, (mask,) + chain)
        return top  # type: ignore[return-value]

    value, chain = best(_bits(range(G.order)))
    return KlunersResult(
        value=int(value),
        chain=tuple(frozenset(_members(m)) for m in chain),
        involutions=len(involution_locus(G)),
    )
