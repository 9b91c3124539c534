"""Kronecker and Hilbert symbols over Q, written additively in F_2."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .sieve import CapExceeded, trial_factor


class ZeroArgument(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Place:
    """A place of Q: an odd prime, the prime 2, or the real place.

    Places sort with odd primes first (ascending), then 2, then infinity.
    """

    rank: int
    p: int

    @classmethod
    def odd(cls, p: int) -> "Place":
        if p < 3 or p % 2 == 0:
            raise ValueError(f"{p} is not an odd prime")
        return cls(0, p)

    @property
    def is_odd(self) -> bool:
        return self.rank == 0

    @property
    def is_two(self) -> bool:
        return self.rank == 1

    @property
    def is_infinite(self) -> bool:
        return self.rank == 2

    def __str__(self) -> str:
        if self.is_odd:
            return str(self.p)
        return "2" if self.is_two else "inf"


TWO = Place(1, 2)
INFINITY = Place(2, 0)


def place_from_str(s: str) -> Place:
    if s == "2":
        return TWO
    if s in ("inf", "infinity"):
        return INFINITY
    return Place.odd(int(s))


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) with (a/2) from a mod 8 and (a/-1) = sign(a)."""
    if a == 0 and n == 0:
        raise ZeroArgument("kronecker(0, 0)")
    if n == 0:
        return 1 if abs(a) == 1 else 0
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            t = -t
    if n == 1:
        return t
    return t * jacobi(a, n)


def legendre(a: int, p: int) -> int:
    return kronecker(a, p)


def _split(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert(a: int, b: int, v: Place) -> int:
    """Hilbert symbol (a, b)_v: 0 if z^2 = a x^2 + b y^2 has a nonzero solution over Q_v, else 1."""
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol of zero")
    if v.is_infinite:
        return int(a < 0 and b < 0)
    p = v.p
    alpha, u = _split(a, p)
    beta, w = _split(b, p)
    if v.is_odd:
        s = (alpha * beta * ((p - 1) // 2)) % 2
        if beta % 2:
            s ^= int(legendre(u, p) == -1)
        if alpha % 2:
            s ^= int(legendre(w, p) == -1)
        return s

    def eps(x: int) -> int:
        return ((x - 1) // 2) % 2

    def omg(x: int) -> int:
        return ((x * x - 1) // 8) % 2

    return (eps(u) * eps(w) + alpha * omg(w) + beta * omg(u)) % 2


def relevant_places(*values: int) -> list[Place]:
    primes: set[int] = set()
    for x in values:
        primes.update(q for q in trial_factor(x) if q != 2)
    return [Place.odd(q) for q in sorted(primes)] + [TWO, INFINITY]


def squarefree_part(a: int) -> int:
    sign = -1 if a < 0 else 1
    a = abs(a)
    out = 1
    for p in trial_factor(a):
        v, a = _split(a, p)
        if v % 2:
            out *= p
    return sign * out


@lru_cache(maxsize=None)
def _square_tables(p: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    mod = p**k
    z = np.arange(mod, dtype=np.int64)
    all_sq = np.zeros(mod, dtype=bool)
    all_sq[(z * z) % mod] = True
    unit_sq = np.zeros(mod, dtype=bool)
    unit_sq[(z[z % p != 0] ** 2) % mod] = True
    return all_sq, unit_sq


def _search_modulus(a: int, b: int, p: int) -> int:
    """Exponent k such that a primitive solution mod p^k lifts to Q_p.

    With a, b squarefree, Hensel's lemma (v(F) > 2 v(F')) shows that
    k = v_p(ab) + 1 suffices for odd p and k = v_2(4ab) + 3 suffices at 2.
    """
    if p == 2:
        return _split(4 * a * b, 2)[0] + 3
    return _split(a * b, p)[0] + 1


@lru_cache(maxsize=None)
def _brute_local(a: int, b: int, p: int) -> int:
    k = _search_modulus(a, b, p)
    mod = p**k
    if mod > 1 << 22:
        raise CapExceeded(f"modulus {mod} too large for brute force")
    all_sq, unit_sq = _square_tables(p, k)
    t = np.arange(mod, dtype=np.int64)
    # primitive solutions up to unit scaling: x = 1, or p | x and y = 1, or p | x, y and z a unit
    if all_sq[(a + b * t * t) % mod].any():
        return 0
    mult = t[t % p == 0]
    if all_sq[(a * mult * mult + b) % mod].any():
        return 0
    if mult.size * mult.size <= 1 << 24:
        vals = (a * (mult[:, None] ** 2) + b * (mult[None, :] ** 2)) % mod
        if unit_sq[vals].any():
            return 0
    else:
        for x in mult:
            if unit_sq[(a * x * x + b * mult * mult) % mod].any():
                return 0
    return 1


def hilbert_bruteforce(a: int, b: int, v: Place) -> int:
    """Decide solubility of z^2 = a x^2 + b y^2 by a primitive-solution search mod p^k.

    Inputs are first reduced to squarefree representatives of their square
    classes; see ``_search_modulus`` for the modulus used.
    """
    if a == 0 or b == 0:
        raise ZeroArgument("Hilbert symbol of zero")
    if abs(a) > 10**4 or abs(b) > 10**4:
        raise CapExceeded("brute force limited to |a|, |b| <= 10^4")
    if v.is_infinite:
        # a x^2 + b y^2 takes a nonnegative value at some nonzero (x, y) unless both are negative
        return int(a < 0 and b < 0)
    return _brute_local(squarefree_part(a), squarefree_part(b), v.p)
