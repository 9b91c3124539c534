"""Mobius, omega and least-prime-factor tables with an optional on-disk cache."""
from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

MAGIC = b"NMSIEVE1"
VERSION = 1
DEFAULT_CAP = 6 * 10**7


class CapExceeded(ValueError):
    pass


def sieve_cap() -> int:
    return int(os.environ.get("MALLE_SIEVE_CAP", DEFAULT_CAP))


@dataclass(frozen=True)
class SieveTables:
    N: int
    mu: np.ndarray
    omega: np.ndarray
    lpf: np.ndarray

    @cached_property
    def squarefree(self) -> np.ndarray:
        return self.mu != 0

    @cached_property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.N + 1)
        return np.nonzero((self.lpf == idx) & (idx >= 2))[0]

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self.lpf[n]) == n

    def factor(self, n: int) -> list[int]:
        """Distinct prime factors of |n| (n within the table or by trial division beyond it)."""
        n = abs(int(n))
        out: list[int] = []
        if n > self.N:
            return trial_factor(n)
        while n > 1:
            p = int(self.lpf[n])
            out.append(p)
            while n % p == 0:
                n //= p
        return out

    def is_squarefree(self, n: int) -> bool:
        n = abs(int(n))
        if n <= self.N:
            return bool(self.mu[n] != 0)
        return is_squarefree(n)


def trial_factor(n: int) -> list[int]:
    n = abs(int(n))
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def is_squarefree(n: int) -> bool:
    n = abs(int(n))
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return True


def _compute(N: int) -> SieveTables:
    lpf = np.zeros(N + 1, dtype=np.int32)
    r = int(N**0.5)
    while r * r > N:
        r -= 1
    while (r + 1) * (r + 1) <= N:
        r += 1
    for p in range(2, r + 1):
        if lpf[p] == 0:
            seg = lpf[p * p :: p]
            seg[seg == 0] = p
    idx = np.arange(N + 1, dtype=np.int32)
    is_p = (lpf == 0) & (idx >= 2)
    lpf[is_p] = idx[is_p]
    if N >= 1:
        lpf[1] = 1
    omega = np.zeros(N + 1, dtype=np.int8)
    primes = np.nonzero(is_p)[0]
    for p in primes:
        omega[p::p] += 1
    sqfree = np.ones(N + 1, dtype=bool)
    sqfree[0] = False
    for p in primes[primes <= r]:
        sqfree[p * p :: p * p] = False
    mu = np.where(sqfree, np.where(omega % 2 == 0, 1, -1), 0).astype(np.int8)
    return SieveTables(N=N, mu=mu, omega=omega, lpf=lpf)


def _cache_path(N: int, cache_dir: str | os.PathLike | None) -> Path | None:
    base = cache_dir if cache_dir is not None else os.environ.get("MALLE_CACHE_DIR")
    if not base:
        return None
    return Path(base) / f"sieve_{N}.bin"


def _write(path: Path, tab: SieveTables) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", VERSION, tab.N))
        fh.write(tab.mu.tobytes())
        fh.write(tab.omega.tobytes())
        fh.write(tab.lpf.tobytes())
    os.replace(tmp, path)


def _read(path: Path, N: int) -> SieveTables | None:
    try:
        raw = path.read_bytes()
    except OSError:
        return None
    head = len(MAGIC) + 12
    if len(raw) != head + (N + 1) * 6 or raw[: len(MAGIC)] != MAGIC:
        return None
    version, n = struct.unpack("<IQ", raw[len(MAGIC) : head])
    if version != VERSION or n != N:
        return None
    off = head
    mu = np.frombuffer(raw, dtype=np.int8, count=N + 1, offset=off).copy()
    off += N + 1
    omega = np.frombuffer(raw, dtype=np.int8, count=N + 1, offset=off).copy()
    off += N + 1
    lpf = np.frombuffer(raw, dtype=np.int32, count=N + 1, offset=off).copy()
    return SieveTables(N=N, mu=mu, omega=omega, lpf=lpf)


_MEMO: dict[int, SieveTables] = {}


def sieve(N: int, cache_dir: str | os.PathLike | None = None) -> SieveTables:
    """Exact sieve tables up to N, reusing any larger table already in memory."""
    N = max(int(N), 1)
    if N > sieve_cap():
        raise CapExceeded(f"sieve bound {N} exceeds cap {sieve_cap()}")
    for M, tab in _MEMO.items():
        if M >= N:
            return tab if M == N else SieveTables(N, tab.mu[: N + 1], tab.omega[: N + 1], tab.lpf[: N + 1])
    path = _cache_path(N, cache_dir)
    tab = _read(path, N) if path is not None else None
    if tab is None:
        tab = _compute(N)
        if path is not None:
            try:
                _write(path, tab)
            except OSError as exc:  # cache is optional
                log.warning("could not write sieve cache %s: %s", path, exc)
    _MEMO.clear()
    _MEMO[N] = tab
    return tab
