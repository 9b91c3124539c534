"""Group-theoretic invariants consumed by the counting code."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    CocycleTable,
    GroupError,
    InvalidCyclotomicDegree,
    LGroup,
    NilpotentGroup,
    NotAVectorSpace,
    TableGroup,
    smallest_prime,
)


class NotInCentralizer(GroupError):
    pass


def involution_locus(G: TableGroup) -> frozenset[int]:
    """I(G): nonidentity elements whose order is the smallest prime dividing #G."""
    lg = smallest_prime(G)
    return frozenset(int(g) for g in range(1, G.order) if G.orders[g] == lg)


def h_subgroup(G: TableGroup) -> frozenset[int]:
    return involution_locus(G) | {0}


def h_dimension(G: TableGroup) -> int:
    """Dimension of H(G) = I(G) u {id} over F_{l_G}; requires a commuting subgroup."""
    H = h_subgroup(G)
    for x in H:
        for y in H:
            if G.mul(x, y) not in H or G.mul(x, y) != G.mul(y, x):
                raise NotAVectorSpace("H(G) is not an elementary abelian subgroup")
    lg = smallest_prime(G)
    dim = round(math.log(len(H), lg))
    assert lg**dim == len(H)
    return dim


def commutator_pairing(G: LGroup, h: int, theta: CocycleTable, x: int, ext: LGroup | None = None) -> int:
    """Fiber coordinate of the commutator of lifts of x and h in (F_l x G, *_theta).

    x must centralize h; the value is independent of the lifts chosen.
    """
    if G.mul(x, h) != G.mul(h, x):
        raise NotInCentralizer(f"{x} does not commute with {h}")
    E = ext if ext is not None else G.extension(theta)
    c = E.commutator(x, h)  # lifts with zero fiber coordinate
    assert c % G.order == 0
    return c // G.order


@dataclass(frozen=True)
class TildeCentralizer:
    members: frozenset[int]
    centralizer: frozenset[int]

    @property
    def index(self) -> int:
        return len(self.centralizer) // len(self.members)


def tilde_centralizer(G: LGroup, h: int, theta: CocycleTable, ext: LGroup | None = None) -> TildeCentralizer:
    """Kernel of the commutator pairing inside Cent(h); its index is 1 or l."""
    E = ext if ext is not None else G.extension(theta)
    cent = G.centralizer(h)
    ker = frozenset(x for x in cent if commutator_pairing(G, h, theta, x, ext=E) == 0)
    out = TildeCentralizer(ker, cent)
    if out.index not in (1, G.l):
        raise AssertionError(f"tilde-centralizer index {out.index} is not 1 or {G.l}")
    return out


def is_theta_stable(G: LGroup, h: int, theta: CocycleTable, ext: LGroup | None = None) -> bool:
    """True iff the lift (0, h) has the same order as h."""
    E = ext if ext is not None else G.extension(theta)
    return E.element_order(h) == G.element_order(h)


def breaks(G: LGroup, g: int) -> int:
    """Number of steps at which the tilde-centralizer of the image of g has index l."""
    count = 0
    for i in range(2, G.r + 1):
        Gi = G.level(i - 1)
        ext = G.level(i)
        if tilde_centralizer(Gi, G.project(g, i - 1), G.theta(i), ext=ext).index == G.l:
            count += 1
    return count


def exponent_e(G: TableGroup, g: int) -> int:
    """Tame discriminant exponent #G (1 - 1/ord(g))."""
    o = G.element_order(g)
    return G.order - G.order // o


@dataclass(frozen=True)
class ConstantsReport:
    a: Fraction
    b: Fraction
    i: Fraction
    d_input: int


def classes_in_locus(G: TableGroup) -> list[frozenset[int]]:
    inv = involution_locus(G)
    return [c for c in G.conjugacy_classes if next(iter(c)) in inv]


def constants(G: TableGroup, d: int) -> ConstantsReport:
    lg = smallest_prime(G)
    if d < 1 or (lg - 1) % d:
        raise InvalidCyclotomicDegree(f"d = {d} does not divide l_G - 1 = {lg - 1}")
    n_inv = len(involution_locus(G))
    n_cls = len(classes_in_locus(G))
    if n_inv % d or n_cls % d:
        raise InvalidCyclotomicDegree(f"d = {d} does not divide the class count {n_cls}")
    a = Fraction(lg, (lg - 1) * G.order)
    return ConstantsReport(a=a, b=Fraction(n_cls, d), i=Fraction(n_inv, d), d_input=d)


def power_map_orbits(G: TableGroup, d: int) -> list[int]:
    """Orbit sizes of C -> C^k on classes inside I(G), with k of multiplicative order d mod l_G."""
    lg = smallest_prime(G)
    if (lg - 1) % d:
        raise InvalidCyclotomicDegree(f"d = {d} does not divide {lg - 1}")
    k = next(k for k in range(1, lg) if _mult_order(k, lg) == d)
    classes = classes_in_locus(G)
    index = {}
    for j, c in enumerate(classes):
        for g in c:
            index[g] = j
    seen: set[int] = set()
    sizes = []
    for j, c in enumerate(classes):
        if j in seen:
            continue
        orbit = []
        cur = j
        while cur not in orbit:
            orbit.append(cur)
            rep = next(iter(classes[cur]))
            cur = index[G.power(rep, k)]
        seen.update(orbit)
        sizes.append(len(orbit))
    return sizes


def _mult_order(k: int, p: int) -> int:
    o, x = 1, k % p
    while x != 1:
        x = x * k % p
        o += 1
    return o


def upper_central_series(G: TableGroup) -> list[frozenset[int]]:
    """[Z_0 = 1, Z_1 = Z(G), ..., Z_c = G]."""
    series = [frozenset({0})]
    while len(series[-1]) < G.order:
        prev = series[-1]
        nxt = frozenset(g for g in range(G.order) if all(G.commutator(g, x) in prev for x in range(G.order)))
        if nxt == prev:
            raise GroupError("group is not nilpotent")
        series.append(nxt)
    return series


def is_normal(G: TableGroup, H: frozenset[int]) -> bool:
    return all(G.conj(x, h) in H for h in H for x in range(G.order))


def describe_orders(G: TableGroup) -> dict[int, int]:
    out: dict[int, int] = {}
    for o in G.orders:
        out[int(o)] = out.get(int(o), 0) + 1
    return dict(sorted(out.items()))


def is_nilpotent_product(G: TableGroup) -> bool:
    return isinstance(G, (LGroup, NilpotentGroup))
