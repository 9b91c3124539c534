"""Numerical checks of mean values of multiplicative functions.

Sums of z^omega(n) over squarefree n with restricted prime factors, the
hyperbola-method convolution constant, and the roots-of-unity filter used to
impose congruence conditions on numbers of prime factors.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from ..arith.sieve import CapExceeded, sieve, sieve_cap
from ..counting.fit import FitReport, InsufficientData, fit_asymptotic
from ..counting.prefix import admissible_mask

SERIES_TOL = 1e-12
SERIES_MAX_TERMS = 10_000
FILTER_MAX_N = 12
FILTER_MAX_SIZE = 3**6


class SeriesDivergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrimeCondition:
    """Primes p with p mod m in ``residues`` and p not in ``excluded``.

    With m = 1 every prime passes except the excluded ones.
    """

    modulus: int = 1
    residues: frozenset[int] = frozenset({0})
    excluded: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.modulus > 1:
            bad = [r for r in self.residues if math.gcd(r, self.modulus) != 1]
            if bad:
                raise ValueError(f"residues {bad} not coprime to {self.modulus}")

    @property
    def density(self) -> float:
        if self.modulus == 1:
            return 1.0
        phi = sum(1 for r in range(1, self.modulus + 1) if math.gcd(r, self.modulus) == 1)
        return len(self.residues) / phi

    def allows(self, p: int) -> bool:
        if p in self.excluded:
            return False
        if self.modulus == 1:
            return True
        return p % self.modulus in self.residues

    @classmethod
    def residue(cls, m: int, *rs: int, excluded: Sequence[int] = ()) -> "PrimeCondition":
        return cls(m, frozenset(r % m for r in rs), frozenset(excluded))


def _check_bound(x: int) -> None:
    if x > sieve_cap():
        raise CapExceeded(f"x = {x} above the sieve cap {sieve_cap()}")


@lru_cache(maxsize=16)
def _omega_counts(x: int, cond: PrimeCondition) -> tuple[int, ...]:
    """Counts c_k of admissible squarefree n <= x with omega(n) = k."""
    _check_bound(x)
    if x < 1:
        return ()
    mask = admissible_mask(x, cond.allows)
    mask[1] = True
    om = sieve(max(x, 2)).omega[: x + 1]
    return tuple(int(c) for c in np.bincount(om[mask]))


def a_z_sum(x: int, z: complex, cond: PrimeCondition = PrimeCondition()) -> complex:
    """sum over squarefree n <= x with admissible primes of z^omega(n), as a polynomial in z."""
    if abs(z) > 16:
        raise ValueError("|z| must be at most 16")
    counts = _omega_counts(int(x), cond)
    total = 0j
    for c in reversed(counts):
        total = total * z + c
    return total


def a_z_sum_direct(x: int, z: complex, cond: PrimeCondition = PrimeCondition()) -> complex:
    """The same sum, accumulated n by n from factorizations."""
    tab = sieve(max(int(x), 2))
    total = 0j
    for n in range(1, int(x) + 1):
        if not tab.squarefree[n]:
            continue
        ps = tab.factor(n)
        if all(cond.allows(p) for p in ps):
            total += z ** len(ps)
    return total


def sd_shape_check(z: complex, cond: PrimeCondition, xs: Sequence[int]) -> FitReport:
    """Fit A_z(x) against C x (log x)^(Re z * density - 1); see ``expected_log_power``."""
    pts = [(int(x), abs(a_z_sum(int(x), z, cond))) for x in xs]
    return fit_asymptotic(pts, 1)


def expected_log_power(z: complex, cond: PrimeCondition) -> float:
    return complex(z).real * cond.density - 1


def dyadic_xs(x_max: int, cond: PrimeCondition, z: complex = 1, min_value: float = 100) -> list[int]:
    xs = []
    x = int(x_max)
    while x >= 2:
        if abs(a_z_sum(x, z, cond)) < min_value:
            break
        xs.append(x)
        x //= 2
    xs.reverse()
    if len(xs) < 6:
        raise InsufficientData("fewer than 6 dyadic points")
    return xs


# -- convolutions --------------------------------------------------------------


@dataclass(frozen=True)
class ArithmeticFunctionSpec:
    """f with sum_{n <= x} f(n) ~ C x (log x)^A and an exact table of values.

    ``unit`` marks the identity of Dirichlet convolution (1 at n = 1 only),
    whose partial sums have no such main term.
    """

    name: str
    C: float
    A: float
    values: Callable[[int], np.ndarray] = field(compare=False)
    unit: bool = False

    def __post_init__(self):
        if not self.unit and self.A <= -1:
            raise SeriesDivergence(f"{self.name}: need A > -1")


def _squarefree_values(N: int) -> np.ndarray:
    v = sieve(max(N, 2)).squarefree[: N + 1].astype(np.int64)
    v[0] = 0
    return v


def _unit_values(N: int) -> np.ndarray:
    v = np.zeros(N + 1, dtype=np.int64)
    if N >= 1:
        v[1] = 1
    return v


SQUAREFREE = ArithmeticFunctionSpec("squarefree", 6 / math.pi**2, 0.0, _squarefree_values)
UNIT = ArithmeticFunctionSpec("unit", 1.0, 0.0, _unit_values, unit=True)


def gen_binom(a: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


def binomial_series(A: float, B: float) -> float:
    """2^(-A-1) sum_k (-1)^k binom(B, k) / (2^k (A + k + 1)), summed until terms drop below 1e-12."""
    if A <= -1:
        raise SeriesDivergence("A must exceed -1")
    total = 0.0
    for k in range(SERIES_MAX_TERMS):
        term = (-1) ** k * gen_binom(B, k) / (2**k * (A + k + 1))
        total += term
        if abs(term) < SERIES_TOL and k > 0:
            return 2 ** (-A - 1) * total
    raise SeriesDivergence("binomial series did not settle")


def c3_constant(f: ArithmeticFunctionSpec, g: ArithmeticFunctionSpec) -> float:
    """Leading constant of the convolution of two functions with log-power main terms."""
    if f.unit or g.unit:
        raise SeriesDivergence("the unit function has no log-power main term")
    return f.C * g.C * (binomial_series(f.A, g.A) + binomial_series(g.A, f.A))


@dataclass(frozen=True)
class ConvolutionCheck:
    x: int
    direct: float
    predicted: float
    relative_error: float


def hyperbola_sum(fv: np.ndarray, gv: np.ndarray, x: int) -> float:
    """sum_{n <= x} (f * g)(n) from the two partial-sum tables."""
    F = np.cumsum(fv)
    G = np.cumsum(gv)
    r = math.isqrt(x)
    a = np.arange(1, r + 1)
    s1 = fv[1 : r + 1] * G[x // a]
    s2 = gv[1 : r + 1] * F[x // a]
    return s1.sum() + s2.sum() - F[r] * G[r]


def convolution_check(f: ArithmeticFunctionSpec, g: ArithmeticFunctionSpec, x: int) -> ConvolutionCheck:
    _check_bound(x)
    fv, gv = f.values(x), g.values(x)
    direct = hyperbola_sum(fv, gv, x)
    if f.unit and g.unit:
        pred = 1.0
    elif f.unit or g.unit:
        other = g if f.unit else f
        pred = other.C * x * math.log(x) ** other.A
    else:
        pred = c3_constant(f, g) * x * math.log(x) ** (f.A + g.A + 1)
    direct = float(direct)
    return ConvolutionCheck(x, direct, pred, abs(direct - pred) / pred)


# -- roots-of-unity filter -----------------------------------------------------


@dataclass(frozen=True)
class FilterCheck:
    lhs: float
    rhs: complex
    error: float
    main_term: float
    approx_error: float
    approx_bound: float


def _count_splittings(l: int, k: int, a: Sequence[int], n: int) -> int:
    """Ways to distribute n distinct primes over k slots with slot g holding a_g mod l primes."""
    count = 0
    for assign in itertools.product(range(k), repeat=n):
        sizes = [0] * k
        for s in assign:
            sizes[s] += 1
        if all((sizes[g] - a[g]) % l == 0 for g in range(k)):
            count += 1
    return count


def filter_identity_check(l: int, k: int, a: Sequence[int], n: int, d: int = 1) -> FilterCheck:
    """Compare a brute-force count of factorizations with its character-sum expression.

    The left side is (d/k)^n f(I) for a squarefree I with n prime factors,
    where f(I) counts ordered factorizations I = I_1 ... I_k with prescribed
    omega(I_g) mod l, divided by d^n.
    """
    if n > FILTER_MAX_N or l**k > FILTER_MAX_SIZE:
        raise CapExceeded("filter identity check is limited to n <= 12 and l^k <= 729")
    if len(a) != k:
        raise ValueError("a must have k entries")
    f = _count_splittings(l, k, a, n) / d**n
    lhs = (d / k) ** n * f
    zeta = cmath.exp(2j * math.pi / l)
    re, im = [], []
    approx_max = 0.0
    for c in itertools.product(range(l), repeat=k):
        inner = sum(zeta ** c[g] for g in range(k)) / k
        term = zeta ** (-sum(cg * ag for cg, ag in zip(c, a))) * inner**n
        re.append(term.real)
        im.append(term.imag)
        if len(set(c)) > 1:
            approx_max = max(approx_max, abs(inner))
    rhs = complex(math.fsum(re), math.fsum(im)) / l**k
    main = l ** (-k + 1) * (1.0 if (n - sum(a)) % l == 0 else 0.0)
    return FilterCheck(
        lhs=lhs,
        rhs=rhs,
        error=abs(lhs - rhs),
        main_term=main,
        approx_error=abs(rhs - main),
        approx_bound=k * approx_max**n,
    )
