"""Finite l-groups presented as towers of central extensions by F_l.

An element of a group of order l^r is stored as an integer index whose
base-l digits are its coordinates; digit ``i - 1`` (least significant
first) is the fiber coordinate added at step ``i``.  With this encoding the
projection onto the step-``i`` quotient is simply ``index % l**i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .linalg import solve_mod

MAX_TABLE_ORDER = 2**12


class GroupError(ValueError):
    """Base class for invalid group data."""


class CocycleViolation(GroupError):
    def __init__(self, step: int, triple: tuple[int, int, int]):
        self.step = step
        self.triple = triple
        super().__init__(f"cocycle identity fails at step {step} for triple {triple}")


class TrivialityRuleViolation(GroupError):
    def __init__(self, step: int):
        self.step = step
        super().__init__(f"step {step}: nonzero cocycle is a coboundary")


class NotAVectorSpace(GroupError):
    pass


class DuplicatePrime(GroupError):
    pass


class TooLarge(GroupError):
    pass


class InvalidCyclotomicDegree(GroupError):
    pass


class TableGroup:
    """A finite group given by a dense multiplication table (identity = 0)."""

    def __init__(self, table: np.ndarray, name: str = ""):
        table = np.asarray(table, dtype=np.int32)
        n = table.shape[0]
        if table.shape != (n, n):
            raise GroupError("multiplication table must be square")
        self.table = table
        self.order = n
        self.name = name
        if not np.array_equal(table[0], np.arange(n)) or not np.array_equal(table[:, 0], np.arange(n)):
            raise GroupError("element 0 must be the identity")
        ident = table == 0
        if not np.all(ident.sum(axis=1) == 1):
            raise GroupError("inverses are not unique")
        self.inv = np.argmax(ident, axis=1).astype(np.int32)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def power(self, x: int, k: int) -> int:
        k %= self.element_order(x)
        result, base = 0, x
        while k:
            if k & 1:
                result = int(self.table[result, base])
            base = int(self.table[base, base])
            k >>= 1
        return result

    def conj(self, x: int, g: int) -> int:
        """Return x g x^{-1}."""
        return int(self.table[self.table[x, g], self.inv[x]])

    def commutator(self, x: int, y: int) -> int:
        """Return x y x^{-1} y^{-1}."""
        return int(self.table[self.table[self.table[x, y], self.inv[x]], self.inv[y]])

    @cached_property
    def orders(self) -> np.ndarray:
        n = self.order
        out = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        pending = np.ones(n, dtype=bool)
        while pending.any():
            done = pending & (cur == 0)
            out[done] = k
            pending &= ~done
            cur = self.table[cur, np.arange(n)]
            k += 1
        return out

    def element_order(self, g: int) -> int:
        return int(self.orders[g])

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.orders))

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def center(self) -> frozenset[int]:
        return frozenset(int(g) for g in np.nonzero(np.all(self.table == self.table.T, axis=0))[0])

    def conjugacy_class(self, g: int) -> frozenset[int]:
        return frozenset(int(c) for c in self.table[self.table[:, g], self.inv])

    def centralizer(self, g: int) -> frozenset[int]:
        return frozenset(int(x) for x in np.nonzero(self.table[:, g] == self.table[g, :])[0])

    @cached_property
    def conjugacy_classes(self) -> tuple[frozenset[int], ...]:
        seen: set[int] = set()
        classes = []
        for g in range(self.order):
            if g not in seen:
                c = self.conjugacy_class(g)
                seen |= c
                classes.append(c)
        return tuple(classes)

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens``."""
        members = {0}
        frontier = [int(g) for g in gens]
        gens_list = list(frontier)
        while frontier:
            new = []
            for x in frontier:
                if x in members:
                    continue
                members.add(x)
                new.extend(int(self.table[x, g]) for g in gens_list)
            frontier = new
        return frozenset(members)

    def check_associative(self, samples: int | None = None, seed: int = 0) -> bool:
        t = self.table
        n = self.order
        if samples is None:
            for g in range(n):
                lhs = t[t[g, :], :]  # (g h) k
                rhs = t[g, t]  # g (h k)
                if not np.array_equal(lhs, rhs):
                    return False
            return True
        rng = np.random.default_rng(seed)
        g, h, k = rng.integers(0, n, size=(3, samples))
        return bool(np.array_equal(t[t[g, h], k], t[g, t[h, k]]))


@dataclass(frozen=True)
class CocycleTable:
    """A normalized 2-cochain G_{i-1} x G_{i-1} -> F_l as a dense table."""

    l: int
    table: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.int64) % self.l
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise GroupError("cocycle table must be square")
        object.__setattr__(self, "table", arr)

    @property
    def level_order(self) -> int:
        return self.table.shape[0]

    @classmethod
    def zero(cls, l: int, n: int) -> "CocycleTable":
        return cls(l, np.zeros((n, n), dtype=np.int64))

    def is_zero(self) -> bool:
        return not self.table.any()

    def __call__(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def flat(self) -> list[int]:
        return [int(x) for x in self.table.reshape(-1)]


@dataclass(frozen=True)
class AdmissibleSequence:
    l: int
    cocycles: tuple[CocycleTable, ...]

    @property
    def r(self) -> int:
        return len(self.cocycles)

    def prefix(self, i: int) -> "AdmissibleSequence":
        return AdmissibleSequence(self.l, self.cocycles[:i])


def cocycle_defect(base: TableGroup, theta: np.ndarray, l: int) -> tuple[int, int, int] | None:
    """First triple (g, h, k) where the cocycle identity fails, if any."""
    t = base.table
    for g in range(base.order):
        diff = (theta[g, :][:, None] + theta[t[g, :], :] - theta - theta[g, t]) % l
        bad = np.nonzero(diff)
        if bad[0].size:
            return (g, int(bad[0][0]), int(bad[1][0]))
    return None


def generating_set(G: TableGroup) -> list[int]:
    """A small generating set, chosen greedily by element index."""
    gens: list[int] = []
    span = frozenset({0})
    for g in range(G.order):
        if g not in span:
            gens.append(g)
            span = G.closure(gens)
            if len(span) == G.order:
                break
    return gens


def is_coboundary(base: TableGroup, theta: CocycleTable | np.ndarray, l: int | None = None) -> np.ndarray | None:
    """Return a 1-cochain c with dc = theta and c(id) = 0, or None if the class is nontrivial.

    Here (dc)(g, h) = c(g) + c(h) - c(gh).  The unknowns are the values of c
    on a generating set; a spanning tree expresses every c(g) affinely in
    them, and each remaining edge (g, g*s) contributes one linear equation.
    Holding on all edges (g, s) with s a generator is equivalent to holding
    on all pairs, because g -> (-c(g), g) is then a section that is
    multiplicative against generators and hence a homomorphism.
    """
    if isinstance(theta, CocycleTable):
        l = theta.l
        arr = theta.table
    else:
        arr = np.asarray(theta, dtype=np.int64)
    assert l is not None
    n = base.order
    if not arr.any():
        return np.zeros(n, dtype=np.int64)
    gens = generating_set(base)
    k = len(gens)
    # c(g) = const[g] + coef[g] . x  over F_l
    const = np.zeros(n, dtype=np.int64)
    coef = np.zeros((n, k), dtype=np.int64)
    known = np.zeros(n, dtype=bool)
    known[0] = True
    order = [0]
    for g in order:
        for j, s in enumerate(gens):
            gs = int(base.table[g, s])
            if not known[gs]:
                # c(gs) = c(g) + c(s) - theta(g, s); c(s) = x_j
                const[gs] = (const[g] - arr[g, s]) % l
                coef[gs] = coef[g].copy()
                coef[gs, j] += 1
                coef[gs] %= l
                known[gs] = True
                order.append(gs)
    rows = []
    rhs = []
    for g in range(n):
        for j, s in enumerate(gens):
            gs = int(base.table[g, s])
            # c(gs) - c(g) - x_j + theta(g,s) = 0
            row = coef[gs] - coef[g]
            row[j] -= 1
            rows.append(row % l)
            rhs.append((const[g] - const[gs] - arr[g, s]) % l)
    sol = solve_mod(np.array(rows), np.array(rhs), l)
    if sol is None:
        return None
    c = (const + coef @ sol) % l
    return c


def coboundary_of(base: TableGroup, c: Sequence[int], l: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    return (c[:, None] + c[None, :] - c[base.table]) % l


def extend_table(base_table: np.ndarray, theta: np.ndarray, l: int) -> np.ndarray:
    """Multiplication table of (F_l x G, *_theta) with index g + n*a."""
    n = base_table.shape[0]
    a = np.arange(l)
    # x = g + n*a, y = g' + n*a'
    g = np.tile(np.arange(n), l)
    av = np.repeat(a, n)
    prod_g = base_table[g[:, None], g[None, :]]
    fiber = (av[:, None] + av[None, :] + theta[g[:, None], g[None, :]]) % l
    return (prod_g + n * fiber).astype(np.int32)


class LGroup(TableGroup):
    """The group G_r of an admissible sequence, with access to every level G_i."""

    def __init__(self, seq: AdmissibleSequence, name: str = "", levels: list[np.ndarray] | None = None):
        self.seq = seq
        self.l = seq.l
        self.r = seq.r
        if levels is None:
            levels = [np.zeros((1, 1), dtype=np.int32)]
            for th in seq.cocycles:
                levels.append(extend_table(levels[-1], th.table, seq.l))
        self._levels = levels
        super().__init__(levels[-1], name=name)

    def level(self, i: int) -> "LGroup":
        """The quotient G_i (coordinates 1..i)."""
        if i == self.r:
            return self
        return LGroup(self.seq.prefix(i), name=f"{self.name}[{i}]", levels=self._levels[: i + 1])

    def theta(self, i: int) -> CocycleTable:
        """Cocycle theta_i, defined on G_{i-1}."""
        return self.seq.cocycles[i - 1]

    def project(self, g: int, i: int) -> int:
        return g % (self.l**i)

    def coords(self, g: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.r):
            g, d = divmod(g, self.l)
            out.append(d)
        return tuple(out)

    def element(self, coords: Sequence[int]) -> int:
        if len(coords) != self.r:
            raise GroupError(f"expected {self.r} coordinates")
        idx = 0
        for c in reversed(coords):
            idx = idx * self.l + (int(c) % self.l)
        return idx

    def coord(self, g: int, j: int) -> int:
        """Coordinate j (1-based) of g."""
        return (g // self.l ** (j - 1)) % self.l

    def trivial_steps(self) -> list[int]:
        return [i for i in range(1, self.r + 1) if self.theta(i).is_zero()]

    def extension(self, theta: CocycleTable) -> "LGroup":
        """The group (F_l x G, *_theta) one level above this one."""
        seq = AdmissibleSequence(self.l, self.seq.cocycles + (theta,))
        levels = self._levels + [extend_table(self.table, theta.table, self.l)]
        return LGroup(seq, name=f"{self.name}+", levels=levels)


def build_group(seq: AdmissibleSequence, name: str = "", check: bool = True) -> LGroup:
    """Build G_r from an admissible sequence, validating every cocycle."""
    l = seq.l
    if l < 2 or any(l % p == 0 for p in range(2, int(l**0.5) + 1)):
        raise GroupError(f"l = {l} is not prime")
    if l**seq.r > MAX_TABLE_ORDER:
        raise TooLarge(f"order {l}**{seq.r} exceeds {MAX_TABLE_ORDER}")
    levels = [np.zeros((1, 1), dtype=np.int32)]
    for i, th in enumerate(seq.cocycles, start=1):
        n = levels[-1].shape[0]
        if th.l != l or th.level_order != n:
            raise GroupError(f"step {i}: cocycle table has wrong shape or prime")
        if check:
            if th.table[0, 0] != 0:
                raise CocycleViolation(i, (0, 0, 0))
            base = TableGroup(levels[-1])
            bad = cocycle_defect(base, th.table, l)
            if bad is not None:
                raise CocycleViolation(i, bad)
            if not th.is_zero() and is_coboundary(base, th) is not None:
                raise TrivialityRuleViolation(i)
        levels.append(extend_table(levels[-1], th.table, l))
    return LGroup(seq, name=name, levels=levels)


class NilpotentGroup(TableGroup):
    """Direct product of l-groups for pairwise distinct primes l_1 < ... < l_c.

    Elements are mixed-radix indices: the component in factor j is
    ``(index // stride_j) % #G_j`` with the first factor least significant.
    """

    def __init__(self, factors: Sequence[LGroup], name: str = ""):
        primes = [f.l for f in factors]
        if len(set(primes)) != len(primes):
            raise DuplicatePrime(f"repeated prime among {primes}")
        order_idx = sorted(range(len(factors)), key=lambda j: primes[j])
        self.factors = tuple(factors[j] for j in order_idx)
        self.primes = tuple(f.l for f in self.factors)
        sizes = [f.order for f in self.factors]
        total = int(np.prod(sizes))
        if total > MAX_TABLE_ORDER:
            raise TooLarge(f"order {total} exceeds {MAX_TABLE_ORDER}")
        self.strides = tuple(int(np.prod(sizes[:j])) for j in range(len(sizes)))
        idx = np.arange(total)
        table = np.zeros((total, total), dtype=np.int64)
        for f, s in zip(self.factors, self.strides):
            comp = (idx // s) % f.order
            table += s * f.table[comp[:, None], comp[None, :]]
        super().__init__(table.astype(np.int32), name=name or "x".join(f.name for f in self.factors))

    @property
    def l_min(self) -> int:
        return self.primes[0]

    def components(self, g: int) -> tuple[int, ...]:
        return tuple((g // s) % f.order for f, s in zip(self.factors, self.strides))

    def element(self, comps: Sequence[int]) -> int:
        return sum(int(c) * s for c, s in zip(comps, self.strides))

    def is_epi_tuple(self, component_epis: Sequence[bool]) -> bool:
        """A tuple of maps onto the factors is onto the product iff each component is onto."""
        if len(component_epis) != len(self.factors):
            raise GroupError("one verdict per factor required")
        return all(component_epis)


def direct_product(factors: Sequence[LGroup], name: str = "") -> NilpotentGroup:
    return NilpotentGroup(factors, name=name)


def smallest_prime(G: TableGroup) -> int:
    if isinstance(G, LGroup):
        return G.l
    if isinstance(G, NilpotentGroup):
        return G.l_min
    n = G.order
    p = 2
    while n % p:
        p += 1
    return p
