"""The Pow bijection between element-indexed tuples and coordinate characters."""
from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Sequence

from ..arith.sieve import trial_factor
from ..groups.core import LGroup
from .tuples import NotPrim, SquarefreeTuple, make_tuple, pairwise_coprime


def pow_forward(G: LGroup, tup: SquarefreeTuple) -> list[int]:
    """For l = 2: coordinate j is the product of v_g over g with g_j = 1."""
    if G.l != 2:
        raise ValueError("use pow_forward_general for odd l")
    w = [1] * G.r
    for g, v, _ in tup.items():
        if v == 1:
            continue
        for j in range(G.r):
            if (g >> j) & 1:
                w[j] *= v
    return w


def pow_forward_values(r: int, values: Mapping[int, int]) -> list[int]:
    """pow_forward on a bare {element index: value} map (l = 2)."""
    if not pairwise_coprime(list(values.values())):
        raise NotPrim("entries are not pairwise coprime")
    w = [1] * r
    for g, v in values.items():
        for j in range(r):
            if (g >> j) & 1:
                w[j] *= v
    return w


def _support_atoms(w: Sequence[int]) -> dict[int, int]:
    """Map each atom t in {-1, 2, odd primes} to the bitmask of coordinates it divides."""
    atoms: dict[int, int] = defaultdict(int)
    for j, x in enumerate(w):
        if x == 0:
            raise ValueError("zero coordinate")
        if x < 0:
            atoms[-1] |= 1 << j
        for p in trial_factor(x):
            atoms[p] |= 1 << j
    return dict(atoms)


def pow_inverse_values(w: Sequence[int]) -> dict[int, int]:
    """Inverse of Pow for l = 2: v_B is the product of atoms whose support is exactly B."""
    out: dict[int, int] = {}
    for t, mask in _support_atoms(w).items():
        out[mask] = out.get(mask, 1) * t
    return out


def pow_inverse(G: LGroup, w: Sequence[int]) -> SquarefreeTuple:
    if len(w) != G.r:
        raise ValueError(f"expected {G.r} coordinates")
    return make_tuple(G, pow_inverse_values(w))


# General l: coordinate j is a formal sum of prime characters with multiplicities.
FormalChar = dict[int, int]  # prime -> exponent in F_l


def pow_forward_general(l: int, r: int, values: Mapping[int, int]) -> list[FormalChar]:
    """Coordinate j = sum over g of coord_j(g) * (characters of the primes dividing v_g)."""
    if not pairwise_coprime(list(values.values())):
        raise NotPrim("entries are not pairwise coprime")
    out: list[FormalChar] = [dict() for _ in range(r)]
    for g, v in values.items():
        coords = []
        x = g
        for _ in range(r):
            x, d = divmod(x, l)
            coords.append(d)
        for p in trial_factor(v):
            for j, c in enumerate(coords):
                if c:
                    out[j][p] = c
    return out


def pow_inverse_general(l: int, chars: Sequence[FormalChar]) -> dict[int, int]:
    """Group primes by their coordinate vector; v_g is the product of primes with vector g."""
    vec: dict[int, int] = defaultdict(int)
    for j, ch in enumerate(chars):
        for p, c in ch.items():
            if c % l:
                vec[p] += (c % l) * l**j
    out: dict[int, int] = {}
    for p, g in vec.items():
        out[g] = out.get(g, 1) * p
    return out
