"""Step-by-step decision of whether a squarefree tuple gives an epimorphism onto G.

Each step i either adds a split coordinate (which must give a character
independent of the earlier split ones) or a non-split coordinate (whose
embedding obstruction must vanish at every place).  Inertia generators
are normalized so that the image of every generator has coordinates equal
to the values of the coordinate characters on it; Frobenius images for
abelian quotients come from the idelic product formula with the local
characters read off those inertia images.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from ..arith.characters import CharBasisDecomposition, chi_basis_decompose
from ..arith.sieve import trial_factor
from ..arith.symbols import INFINITY, Place
from ..groups.core import LGroup, TableGroup
from ..groups.invariants import exponent_e
from .obstruction import (
    CoordChar,
    CupExpression,
    FrobCondition,
    ObstructionSpec,
    SpecMismatch,
    TrivialTheta,
    check_spec,
    step_obstruction_invariants,
)
from .tuples import SquarefreeTuple


class NotNormalizing(ValueError):
    pass


class UnsupportedGroup(ValueError):
    pass


@dataclass(frozen=True)
class TrivialChar:
    pass


@dataclass(frozen=True)
class Dependent:
    step: int


@dataclass(frozen=True)
class LocalObstruction:
    step: int
    place: Place


@dataclass(frozen=True)
class EpiData:
    inertia: dict[int, int]
    odd_disc: int
    decompositions: tuple[CharBasisDecomposition, ...]
    mod8: tuple[int, ...]


@dataclass(frozen=True)
class Epi:
    data: EpiData


@dataclass(frozen=True)
class Bullet:
    reason: Union[TrivialChar, Dependent, LocalObstruction]


@dataclass(frozen=True)
class Unknown:
    step: int
    place: Place


Verdict = Union[Epi, Bullet, Unknown]


def exponents(G: TableGroup) -> list[int]:
    """e_g for g = 1 .. #G - 1."""
    return [exponent_e(G, g) for g in range(1, G.order)]


def read_inertia(tup: SquarefreeTuple, p: int) -> int:
    """The unique g with p | v_g, or the identity 0."""
    for g, v, _ in tup.items():
        if v % p == 0:
            return g
    return 0


def disc_odd(tup: SquarefreeTuple) -> int:
    out = 1
    for (g, v, _), e in zip(tup.items(), exponents(tup.group)):
        odd = abs(v)
        while odd % 2 == 0:
            odd //= 2
        out *= odd**e
    return out


class F2Span:
    """Incremental span of square classes, as bit vectors over {-1} and primes."""

    def __init__(self):
        self._bit: dict[int, int] = {}
        self._pivots: dict[int, int] = {}

    def vector(self, sign: int, primes: Sequence[int]) -> int:
        v = 1 if sign < 0 else 0
        for p in primes:
            if p not in self._bit:
                self._bit[p] = 1 << (len(self._bit) + 1)
            v ^= self._bit[p]
        return v

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            piv = self._pivots.get(top)
            if piv is None:
                return v
            v ^= piv
        return 0

    def add(self, v: int) -> bool:
        """Insert v; return False if it was already in the span."""
        r = self.reduce(v)
        if not r:
            return False
        self._pivots[r.bit_length() - 1] = r
        return True


def char_independence(d_new: int, ds: Sequence[int]) -> bool:
    span = F2Span()
    for d in ds:
        span.add(span.vector(d, trial_factor(d)))
    return span.reduce(span.vector(d_new, trial_factor(d_new))) != 0


def tame_lift_test(E: LGroup, sigma_bar: int, frob_bar: int, q: int) -> bool:
    """Is there a lift s of sigma_bar in E with f s f^-1 = s^q (f any lift of frob_bar)?"""
    n = E.order // E.l
    H = E.level(E.r - 1)
    if q % 2 == 0:
        raise ValueError("q must be odd")
    if sigma_bar and (q - 1) % E.l:
        raise ValueError(f"q must be 1 mod {E.l}")
    cyc = {H.power(sigma_bar, k) for k in range(H.element_order(sigma_bar))}
    if H.conj(frob_bar, sigma_bar) not in cyc:
        raise NotNormalizing(f"{frob_bar} does not normalize <{sigma_bar}>")
    for a in range(E.l):
        s = sigma_bar + n * a
        if E.conj(frob_bar, s) == E.power(s, q):
            return True
    return False


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    fac = trial_factor(p - 1)
    g = 2
    while any(pow(g, (p - 1) // f, p) == 1 for f in fac):
        g += 1
    return g


def dlog_mod(u: int, p: int, e: int) -> int:
    """k in [0, e) with u^((p-1)/e) = g^(k (p-1)/e) mod p, for e | p - 1 and g the least primitive root."""
    if e == 1:
        return 0
    if (p - 1) % e:
        raise ValueError(f"{e} does not divide {p} - 1")
    x = pow(u, (p - 1) // e, p)
    y = pow(primitive_root(p), (p - 1) // e, p)
    cur = 1
    for k in range(e):
        if cur == x:
            return k
        cur = cur * y % p
    raise ArithmeticError("discrete log not found")


def dlog_two(u: int, e: int) -> tuple[int, int]:
    """Write odd u = (-1)^a 5^b in Z_2^*; return (a, b mod e) for a power of two e."""
    a = int(u % 4 == 3)
    u1 = -u if a else u
    if e == 1:
        return a, 0
    mod = 4 * e
    target = u1 % mod
    cur = 1
    for b in range(e):
        if cur == target:
            return a, b
        cur = cur * 5 % mod
    raise ArithmeticError("2-adic log not found")


@dataclass
class _AbelianImage:
    """H -> H^ab with H^ab as a table group."""

    H: LGroup
    label: np.ndarray
    ab: TableGroup

    @classmethod
    def of(cls, H: LGroup) -> "_AbelianImage":
        comm = H.closure({H.commutator(x, y) for x in range(H.order) for y in range(H.order)})
        label = np.full(H.order, -1, dtype=np.int64)
        reps: list[int] = []
        for g in range(H.order):
            if label[g] < 0:
                for k in comm:
                    label[H.mul(g, k)] = len(reps)
                reps.append(g)
        m = len(reps)
        tab = np.array([[label[H.mul(reps[x], reps[y])] for y in range(m)] for x in range(m)], dtype=np.int32)
        return cls(H, label, TableGroup(tab))


@dataclass
class _StepData:
    i: int
    step: object
    H: LGroup
    E: LGroup
    ab: _AbelianImage | None = None


class Pipeline:
    """Cached per-group state for deciding tuples."""

    def __init__(self, G: LGroup, spec: ObstructionSpec):
        if not isinstance(G, LGroup) or G.l != 2:
            raise UnsupportedGroup("the decision pipeline is implemented for 2-groups")
        check_spec(G, spec)
        self.G = G
        self.spec = spec
        self.exps = exponents(G)
        self.steps: list[_StepData] = []
        for i, s in enumerate(spec.steps, start=1):
            sd = _StepData(i, s, G.level(i - 1), G.level(i))
            if isinstance(s, FrobCondition):
                sd.ab = _AbelianImage.of(sd.H)
            self.steps.append(sd)

    # -- helpers -----------------------------------------------------------
    def _images(self, tup: SquarefreeTuple) -> dict[int, int]:
        """Odd prime p -> inertia image g_p in G."""
        out = {}
        for g, _, ps in tup.items():
            for p in ps:
                if p != 2:
                    out[p] = g
        return out

    def _two_images(self, w: Sequence[int], i: int) -> tuple[int, int]:
        """Images of sigma_2(1) and sigma_2(2) in G_{i-1}, read from coordinates j < i."""
        a1 = a2 = 0
        for j in range(i - 1):
            x = w[j]
            if x % 2 == 0:
                a1 |= 1 << j
            odd = x
            while odd % 2 == 0:
                odd //= 2
            if odd % 4 == 3:
                a2 |= 1 << j
        return a1, a2

    def _frob_step(self, sd: _StepData, w: Sequence[int], images: dict[int, int]) -> Verdict | None:
        H, E, ab = sd.H, sd.E, sd.ab
        assert ab is not None
        A = ab.ab
        n = H.order
        local = {p: g % n for p, g in images.items() if g % n}
        a1, a2 = self._two_images(w, sd.i)
        b1, b2 = int(ab.label[a1]), int(ab.label[a2])
        e1 = A.element_order(b1)

        def psi_ab(u: int, skip: int | None) -> int:
            """Product over ramified p != skip of psi_p(u), times psi_2(u), in H^ab."""
            acc = 0
            for p, s in local.items():
                if p == skip:
                    continue
                t = int(ab.label[s])
                e = A.element_order(t)
                acc = A.mul(acc, A.power(t, dlog_mod(u % p, p, e)))
            a, b = dlog_two(u, e1)
            acc = A.mul(acc, A.power(b2, a))
            acc = A.mul(acc, A.power(b1, b))
            return acc

        for q in sorted(local):
            # for nonabelian H the order of s need not divide q - 1: Frobenius may act on <s>
            s = local[q]
            f_ab = psi_ab(q, q)
            verdicts = set()
            s_ab = int(ab.label[s])
            coset = {A.mul(f_ab, A.power(s_ab, k)) for k in range(A.element_order(s_ab))}
            coset |= {int(A.inv[c]) for c in coset}
            for f in range(n):
                if int(ab.label[f]) in coset and H.conj(f, s) == H.power(s, q):
                    verdicts.add(tame_lift_test(E, s, f, q))
                    if len(verdicts) == 2:
                        break
            if not verdicts:
                raise AssertionError("no Frobenius candidate found")
            if verdicts == {False}:
                return Bullet(LocalObstruction(sd.i, Place.odd(q)))
            if len(verdicts) == 2:
                return Unknown(sd.i, Place.odd(q))
        # real place: image of complex conjugation is psi(-1)^-1, an element of order <= 2
        c_ab = psi_ab(-1, None)
        c_ab = int(A.inv[c_ab])
        verdicts = set()
        for x in range(n):
            if int(ab.label[x]) == c_ab and H.element_order(x) <= 2:
                verdicts.add(E.element_order(x) == H.element_order(x))
        if not verdicts:
            raise AssertionError("no candidate for complex conjugation")
        if verdicts == {False}:
            return Bullet(LocalObstruction(sd.i, INFINITY))
        if len(verdicts) == 2:
            return Unknown(sd.i, INFINITY)
        return None

    # -- main entry --------------------------------------------------------
    def run(self, tup: SquarefreeTuple) -> Verdict:
        G = self.G
        if tup.group.order != G.order:
            raise SpecMismatch("tuple belongs to another group")
        r = G.r
        w = [1] * r
        signs = [1] * r
        cprimes: list[list[int]] = [[] for _ in range(r)]
        for g, v, ps in tup.items():
            if v == 1:
                continue
            for j in range(r):
                if (g >> j) & 1:
                    w[j] *= v
                    cprimes[j].extend(ps)
                    if v < 0:
                        signs[j] = -signs[j]
        if w[0] == 1:
            return Bullet(TrivialChar())
        span = F2Span()
        images: dict[int, int] | None = None
        for sd in self.steps:
            j = sd.i - 1
            s = sd.step
            if isinstance(s, TrivialTheta):
                vec = span.vector(signs[j], cprimes[j])
                if not span.add(vec):
                    return Bullet(Dependent(sd.i)) if sd.i > 1 else Bullet(TrivialChar())
            elif isinstance(s, CupExpression):
                involved = set()
                for t in s.terms:
                    for f in t:
                        if isinstance(f, CoordChar):
                            involved.update(p for p in cprimes[f.j - 1] if p != 2)
                        else:
                            involved.update(p for p in trial_factor(f.c) if p != 2)
                inv = step_obstruction_invariants(w, s, involved)
                bad = [v for v, x in inv.items() if x]
                if bad:
                    return Bullet(LocalObstruction(sd.i, min(bad)))
            else:
                if images is None:
                    images = self._images(tup)
                out = self._frob_step(sd, w, images)
                if out is not None:
                    return out
        if images is None:
            images = self._images(tup)
        data = EpiData(
            inertia=images,
            odd_disc=disc_odd(tup),
            decompositions=tuple(chi_basis_decompose(x) for x in w),
            mod8=tuple(v % 8 for v in tup.values),
        )
        return Epi(data)


_PIPELINES: dict[tuple[int, int], Pipeline] = {}


def get_pipeline(G: LGroup, spec: ObstructionSpec) -> Pipeline:
    key = (id(G), id(spec))
    p = _PIPELINES.get(key)
    if p is None or p.G is not G or p.spec is not spec:
        p = Pipeline(G, spec)
        _PIPELINES[key] = p
    return p


def solvable(G: LGroup, spec: ObstructionSpec, tup: SquarefreeTuple) -> Verdict:
    return get_pipeline(G, spec).run(tup)
