"""Independent count of epimorphisms G_Q -> A for finite abelian A.

By Kronecker-Weber such an epimorphism is a surjective homomorphism from
the units mod some m onto A.  We enumerate these by their local components
at each prime of the conductor, so each epimorphism appears once at its
conductor, and compute discriminants by the conductor-discriminant formula
over the character group of A.

Nothing here uses the squarefree-tuple parametrization.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from ..arith.sieve import CapExceeded, sieve, trial_factor

Elt = tuple[int, ...]
UNIT_GROUP_CAP = 10**6


@dataclass(frozen=True)
class AbelianGroup:
    """Z/n_1 x ... x Z/n_k with elements as integer vectors."""

    ns: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.ns)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.ns) if self.ns else 1

    @property
    def zero(self) -> Elt:
        return tuple(0 for _ in self.ns)

    def add(self, x: Elt, y: Elt) -> Elt:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.ns))

    def scale(self, k: int, x: Elt) -> Elt:
        return tuple((k * a) % n for a, n in zip(x, self.ns))

    def elements(self) -> Iterator[Elt]:
        return itertools.product(*(range(n) for n in self.ns))

    def order_of(self, x: Elt) -> int:
        o = 1
        for a, n in zip(x, self.ns):
            o = math.lcm(o, n // math.gcd(a, n))
        return o

    def span(self, gens: Sequence[Elt]) -> set[Elt]:
        out = {self.zero}
        frontier = [self.zero]
        gens = [g for g in gens if any(g)]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in out:
                        out.add(y)
                        nxt.append(y)
            frontier = nxt
        return out

    def generates(self, gens: Sequence[Elt]) -> bool:
        return len(self.span(gens)) == self.order

    def pairing(self, c: Elt, x: Elt) -> int:
        """Character c evaluated at x, as an element of Z/exponent."""
        N = self.exponent
        return sum(a * b * (N // n) for a, b, n in zip(c, x, self.ns)) % N

    def killed_by(self, k: int) -> list[Elt]:
        return [x for x in self.elements() if not any(self.scale(k, x))]

    @lru_cache(maxsize=None)
    def automorphism_count(self) -> int:
        choices = [self.killed_by(n) for n in self.ns]
        count = 0
        for imgs in itertools.product(*choices):
            if self.generates(list(imgs)):
                count += 1
        return count


def invariant_factors(G) -> tuple[int, ...]:
    """Cyclic decomposition of an abelian table group of prime-power order, from its order census."""
    if not G.is_abelian:
        raise ValueError("group is not abelian")
    n = G.order
    p = trial_factor(n)[0]
    if p ** round(math.log(n, p)) != n:
        raise ValueError("only prime-power orders are supported")
    orders = np.asarray(G.orders)
    counts = []
    k = 0
    while True:
        counts.append(int(np.sum(p**k % orders == 0)))
        if counts[-1] == n:
            break
        k += 1
    # number of cyclic factors of order >= p^k is log_p(N_k / N_{k-1})
    at_least = [round(math.log(counts[j] / counts[j - 1], p)) for j in range(1, len(counts))]
    ns = []
    for j, c in enumerate(at_least, start=1):
        nxt = at_least[j] if j < len(at_least) else 0
        ns += [p**j] * (c - nxt)
    return tuple(sorted(ns))


@dataclass(frozen=True)
class UnitGroupStructure:
    m: int
    generators: tuple[tuple[int, int], ...]  # (residue mod m, order)

    @property
    def order(self) -> int:
        return math.prod(o for _, o in self.generators)


def _crt_lift(residue: int, modulus: int, m: int) -> int:
    other = m // modulus
    if other == 1:
        return residue % m
    # x = residue mod modulus, x = 1 mod other
    t = ((residue - 1) * pow(other, -1, modulus)) % modulus
    return (1 + other * t) % m


def _primitive_root_prime_power(p: int, k: int) -> int:
    fac = trial_factor(p - 1)
    g = 2
    while any(pow(g, (p - 1) // f, p) == 1 for f in fac):
        g += 1
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


def unit_group(m: int) -> UnitGroupStructure:
    if m > UNIT_GROUP_CAP:
        raise CapExceeded(f"modulus {m} above {UNIT_GROUP_CAP}")
    gens: list[tuple[int, int]] = []
    x = m
    k2 = 0
    while x % 2 == 0:
        x //= 2
        k2 += 1
    if k2 >= 2:
        gens.append((_crt_lift(-1, 2**k2, m), 2))
    if k2 >= 3:
        gens.append((_crt_lift(5, 2**k2, m), 2 ** (k2 - 2)))
    for p in trial_factor(x):
        k = 0
        y = x
        while y % p == 0:
            y //= p
            k += 1
        pk = p**k
        gens.append((_crt_lift(_primitive_root_prime_power(p, k), pk, m), (p - 1) * p ** (k - 1)))
    return UnitGroupStructure(m, tuple(gens))


@dataclass(frozen=True)
class DirichletEpi:
    """A surjection onto A, given by local components at the primes of its conductor.

    ``odd[p]`` is the image of the least primitive root mod p; ``two`` is
    the pair of images of -1 and 5 (zero when the conductor is odd).
    """

    modulus: int
    two_exp: int
    two: tuple[Elt, Elt]
    odd: tuple[tuple[int, Elt], ...]
    disc: int

    @property
    def conductor(self) -> int:
        return self.modulus


def _two_conductor_exp(A: AbelianGroup, c: Elt, a_m1: Elt, a_5: Elt) -> int:
    v5 = A.pairing(c, a_5)
    if v5:
        N = A.exponent
        order = N // math.gcd(v5, N)
        return order.bit_length() - 1 + 2
    return 2 if A.pairing(c, a_m1) else 0


def discriminant(A: AbelianGroup, two_exp: int, two: tuple[Elt, Elt], odd: Sequence[tuple[int, Elt]]) -> int:
    """Product over characters c of A of the conductor of c composed with the epimorphism."""
    disc = 1
    for c in A.elements():
        f = 1
        for p, a in odd:
            if A.pairing(c, a):
                f *= p
        if two_exp:
            f *= 2 ** _two_conductor_exp(A, c, *two)
        disc *= f
    return disc


def _two_components(A: AbelianGroup, max_exp: int) -> list[tuple[int, tuple[Elt, Elt]]]:
    """Primitive 2-adic components (conductor exponent, (image of -1, image of 5))."""
    zero = A.zero
    out: list[tuple[int, tuple[Elt, Elt]]] = [(0, (zero, zero))]
    invols = A.killed_by(2)
    if max_exp >= 2:
        out += [(2, (a, zero)) for a in invols if any(a)]
    k = 3
    while k <= max_exp and 2 ** (k - 2) <= A.exponent:
        for a5 in A.killed_by(2 ** (k - 2)):
            if A.order_of(a5) == 2 ** (k - 2):
                out += [(k, (a, a5)) for a in invols]
        k += 1
    return out


def enumerate_epis(A: AbelianGroup, M: int, two_unramified: bool = False) -> list[DirichletEpi]:
    """All epimorphisms onto A of conductor at most M, each listed once at its conductor."""
    if M > 10**7:
        raise CapExceeded(f"modulus cap {M} too large")
    tab = sieve(max(M, 2))
    primes = [int(p) for p in tab.primes if p != 2 and p <= M]
    max_two = 0 if two_unramified else max(M.bit_length() - 1, 0)
    twos = _two_components(A, max_two)
    local_choices: dict[int, list[Elt]] = {}

    def choices(p: int) -> list[Elt]:
        if p not in local_choices:
            local_choices[p] = [a for a in A.killed_by(math.gcd(p - 1, A.exponent)) if any(a)]
        return local_choices[p]

    out: list[DirichletEpi] = []
    for k2, two in twos:
        base = 2**k2 if k2 else 1
        if base > M:
            continue

        def rec(start: int, m: int, comps: list[tuple[int, Elt]]):
            gens = [two[0], two[1]] + [a for _, a in comps]
            if A.generates(gens):
                out.append(DirichletEpi(m, k2, two, tuple(comps), discriminant(A, k2, two, comps)))
            for idx in range(start, len(primes)):
                p = primes[idx]
                if m * p > M:
                    break
                for a in choices(p):
                    comps.append((p, a))
                    rec(idx + 1, m * p, comps)
                    comps.pop()

        rec(0, base, [])
    out.sort(key=lambda e: (e.disc, e.modulus, e.two, e.odd))
    return out


def modulus_bound(A: AbelianGroup, X: int) -> int:
    """Largest conductor compatible with disc <= X, using disc >= conductor^(#A/2)."""
    if X < 1:
        return 0
    m = int(round(X ** (2.0 / A.order)))
    while m > 1 and m ** A.order > X * X:
        m -= 1
    while (m + 1) ** A.order <= X * X:
        m += 1
    return m


@dataclass(frozen=True)
class OracleResult:
    count: int
    discs: list[int]
    epis: list[DirichletEpi]


def oracle_count(A: AbelianGroup, X: int, two_unramified: bool = False) -> OracleResult:
    M = modulus_bound(A, X)
    epis = [e for e in enumerate_epis(A, M, two_unramified) if e.disc <= X] if M >= 1 else []
    return OracleResult(len(epis), sorted(e.disc for e in epis), epis)


def field_key(A: AbelianGroup, e: DirichletEpi) -> frozenset:
    """The set of Dirichlet characters c o psi, which determines the field."""
    out = set()
    for c in A.elements():
        loc = tuple((p, A.pairing(c, a)) for p, a in e.odd if A.pairing(c, a))
        two = (A.pairing(c, e.two[0]), A.pairing(c, e.two[1]))
        out.add((loc, two))
    return frozenset(out)


def epis_per_field(A: AbelianGroup, epis: Sequence[DirichletEpi]) -> Counter:
    groups: dict[frozenset, int] = defaultdict(int)
    for e in epis:
        groups[field_key(A, e)] += 1
    return Counter(groups.values())


# -- brute-force checks on explicit unit groups --------------------------------


def unit_group_table(m: int) -> dict[int, tuple[int, ...]]:
    """Map each unit mod m to its exponent vector in the standard generators (small m only)."""
    U = unit_group(m)
    out: dict[int, tuple[int, ...]] = {}
    for exps in itertools.product(*(range(o) for _, o in U.generators)):
        x = 1
        for (g, _), e in zip(U.generators, exps):
            x = x * pow(g, e, m) % m
        out[x] = exps
    return out


def count_surjections(m: int, A: AbelianGroup) -> int:
    U = unit_group(m)
    choices = [A.killed_by(o) for _, o in U.generators]
    return sum(1 for imgs in itertools.product(*choices) if A.generates(list(imgs)))


def conductor_of_hom(m: int, A: AbelianGroup, images: Sequence[Elt]) -> int:
    """Least d | m such that the homomorphism kills every unit = 1 mod d (brute force)."""
    table = unit_group_table(m)

    def value(u: int) -> Elt:
        acc = A.zero
        for a, e in zip(images, table[u % m]):
            acc = A.add(acc, A.scale(e, a))
        return acc

    for d in sorted(x for x in range(1, m + 1) if m % x == 0):
        if all(not any(value(u)) for u in table if u % d == 1 % d):
            return d
    return m


def epi_images_at(e: DirichletEpi, m: int, A: AbelianGroup) -> list[Elt]:
    """Images of the standard generators of (Z/m)^* under e, for a multiple m of its conductor."""
    U = unit_group(m)
    imgs = []
    local = dict(e.odd)
    for g, _ in U.generators:
        acc = A.zero
        for p, a in local.items():
            r = _primitive_root_prime_power(p, 1)
            # exponent k with g = r^k mod p
            k = next(k for k in range(p - 1) if pow(r, k, p) == g % p)
            acc = A.add(acc, A.scale(k, a))
        if e.two_exp:
            mod = 2**e.two_exp
            u = g % mod
            a_exp = int(u % 4 == 3)
            u1 = (-u) % mod if a_exp else u
            b = next(b for b in range(mod) if pow(5, b, mod) == u1)
            acc = A.add(acc, A.scale(a_exp, e.two[0]))
            acc = A.add(acc, A.scale(b, e.two[1]))
        imgs.append(acc)
    return imgs
