"""Prefix sums of z^omega(n) over squarefree n and their coprime restrictions.

Two devices keep the bulk counts cheap:

* for a single trailing variable that must avoid a finite prime set P, the
  identity F_P(B) = sum_k (-z)^k F_{P - p}(B / p^k) peels one prime at a
  time;
* for whole counts, the local factor 1 + sum_e c_e t^e at each prime is
  divided by the light factor 1 + z t^a, leaving a sparse correction series
  R that is enumerated explicitly while the light part is a table lookup.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from ..arith.sieve import sieve


@dataclass
class PrefixTable:
    """cum[B] = sum over admissible squarefree n <= B of z^omega(n)."""

    N: int
    z: float | int
    cum: np.ndarray

    def __call__(self, B: np.ndarray) -> np.ndarray:
        B = np.asarray(B, dtype=np.int64)
        if B.size and int(B.max()) > self.N:
            raise ValueError(f"prefix table bound {self.N} exceeded by {int(B.max())}")
        out = self.cum[np.clip(B, 0, None)]
        return np.where(B >= 1, out, 0)


def admissible_mask(N: int, prime_ok: Callable[[int], bool] | None, odd_only: bool = False) -> np.ndarray:
    tab = sieve(max(N, 2))
    mask = tab.squarefree[: N + 1].copy()
    mask[0] = False
    if prime_ok is not None:
        for p in tab.primes[tab.primes <= N].tolist():
            if not prime_ok(p):
                mask[p::p] = False
    if odd_only:
        mask[0::2] = False
    return mask


def prefix_table(N: int, z: float | int, mask: np.ndarray) -> PrefixTable:
    tab = sieve(max(N, 2))
    om = tab.omega[: N + 1].astype(np.int64)
    if isinstance(z, (int, np.integer)):
        vals = np.where(mask, np.power(np.int64(z), om), 0).astype(np.int64)
    else:
        vals = np.where(mask, np.power(float(z), om), 0.0)
    cum = np.cumsum(vals)
    return PrefixTable(N, z, cum)


def residue_tables(N: int, mask: np.ndarray) -> dict[int, PrefixTable]:
    """Counts of admissible odd n by residue mod 4 (keys 1 and 3)."""
    n = np.arange(N + 1)
    out = {}
    for c in (1, 3):
        m = mask & (n % 4 == c)
        out[c] = PrefixTable(N, 1, np.cumsum(m.astype(np.int64)))
    return out


def coprime_sum(table: PrefixTable, B: np.ndarray, P: Sequence[int]) -> np.ndarray:
    """sum over admissible n <= B coprime to every prime in P of z^omega(n)."""
    B = np.asarray(B, dtype=np.int64)
    if not P:
        return table(B)
    p, rest = P[0], P[1:]
    z = table.z
    total = None
    coef = 1
    cur = B
    while cur.size and int(cur.max()) >= 1:
        term = coprime_sum(table, cur, rest) * coef
        total = term if total is None else total + term
        coef = -coef * z
        cur = cur // p
    return total if total is not None else np.zeros_like(B)


def coprime_sum_mod4(tables: dict[int, PrefixTable], B: np.ndarray, P: Sequence[int], c: int) -> np.ndarray:
    """Admissible odd n <= B, n = c mod 4, coprime to the odd primes in P."""
    B = np.asarray(B, dtype=np.int64)
    P = [p for p in P if p != 2]
    if not P:
        return tables[c](B)
    p, rest = P[0], P[1:]
    total = np.zeros_like(B)
    sign = 1
    cur = B
    res = c
    while cur.size and int(cur.max()) >= 1:
        total = total + sign * coprime_sum_mod4(tables, cur, rest, res)
        sign = -sign
        cur = cur // p
        res = (res * p) % 4
    return total


def correction_series(coeffs: dict[int, float | int], a: int, z: float | int, kmax: int) -> list:
    """Coefficients r_0..r_kmax of (1 + sum_e c_e t^e) / (1 + z t^a)."""
    num = [0] * (kmax + 1)
    num[0] = 1
    for e, c in coeffs.items():
        if e <= kmax:
            num[e] += c
    r = [0] * (kmax + 1)
    for k in range(kmax + 1):
        v = num[k]
        if k >= a:
            v -= z * r[k - a]
        r[k] = v
    return r


def correction_terms(
    X: int, primes: Sequence[int], coeffs: dict[int, float | int], a: int, z: float | int
) -> Iterator[tuple[int, float | int]]:
    """All m <= X with nonzero correction coefficient, as (m, R(m))."""
    heavy = [e for e, c in coeffs.items() if e != a and c]
    if not heavy:
        yield 1, 1
        return
    kmin = min(heavy)
    kmax = max(1, X.bit_length())
    r = correction_series(coeffs, a, z, kmax)
    ks = [k for k in range(1, kmax + 1) if r[k] != 0]
    if ks and ks[0] < kmin:
        raise AssertionError("correction series has a term below the heavy exponents")

    def rec(idx: int, m: int, coef) -> Iterator[tuple[int, float | int]]:
        yield m, coef
        for j in range(idx, len(primes)):
            p = primes[j]
            if m * p**kmin > X:
                break
            for k in ks:
                pk = p**k
                if m * pk > X:
                    break
                yield from rec(j + 1, m * pk, coef * r[k])

    yield from rec(0, 1, 1)
