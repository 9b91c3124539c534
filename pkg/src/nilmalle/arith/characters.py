"""Quadratic characters chi_d and their values at inertia generators and Frobenius.

Inertia generators: sigma_p for odd p, and sigma_2(1), sigma_2(2) at 2,
normalized so that chi_2 and chi_{-1} form the dual basis at 2:
chi_2(sigma_2(1)) = 1, chi_2(sigma_2(2)) = 0, chi_{-1}(sigma_2(1)) = 0,
chi_{-1}(sigma_2(2)) = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable

from .sieve import is_squarefree, trial_factor
from .symbols import kronecker


class Ramified(ValueError):
    pass


class UnitInput(ValueError):
    pass


@dataclass(frozen=True)
class SquarefreeInt:
    sign: int
    primes: tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        ps = tuple(sorted(self.primes))
        if len(set(ps)) != len(ps):
            raise ValueError("repeated prime")
        object.__setattr__(self, "primes", ps)

    @classmethod
    def from_int(cls, d: int, primes: Iterable[int] | None = None) -> "SquarefreeInt":
        if d == 0:
            raise ValueError("zero is not squarefree")
        ps = tuple(primes) if primes is not None else tuple(trial_factor(d))
        if primes is None and not is_squarefree(d):
            raise ValueError(f"{d} is not squarefree")
        return cls(-1 if d < 0 else 1, ps)

    @property
    def value(self) -> int:
        return self.sign * prod(self.primes)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class CharBasisDecomposition:
    coeff_minus1: int
    coeff_2: int
    odd_primes: tuple[int, ...]

    def reassemble(self) -> int:
        """The squarefree integer whose character has these coordinates."""
        out = (-1) ** self.coeff_minus1 * 2**self.coeff_2
        for p in self.odd_primes:
            out *= p if p % 4 == 1 else -p
        return out


def _as_int(d) -> int:
    return int(d)


def chi_basis_decompose(d) -> CharBasisDecomposition:
    d = _as_int(d)
    if d == 0:
        raise ValueError("d must be nonzero")
    ps = trial_factor(d)
    odd = tuple(p for p in ps if p != 2)
    c1 = (int(d < 0) + sum(1 for p in odd if p % 4 == 3)) % 2
    return CharBasisDecomposition(coeff_minus1=c1, coeff_2=int(d % 2 == 0), odd_primes=odd)


def chi_sigma_p(d, p: int) -> int:
    return int(_as_int(d) % p == 0)


def chi_sigma_2(d, k: int) -> int:
    """Value of chi_d at sigma_2(k), k in {1, 2}."""
    d = _as_int(d)
    if k == 1:
        return int(d % 2 == 0)
    if k == 2:
        odd = d
        while odd % 2 == 0:
            odd //= 2
        # parity of [d < 0] + #{p | d : p = 3 mod 4} equals [odd part = 3 mod 4]
        return int(odd % 4 == 3)
    raise ValueError("k must be 1 or 2")


@dataclass(frozen=True)
class InertiaGen:
    """sigma_p (kind 'p') or sigma_2(k) (kind '2', index k)."""

    kind: str
    index: int

    @classmethod
    def sigma_p(cls, p: int) -> "InertiaGen":
        return cls("p", p)

    @classmethod
    def sigma_2(cls, k: int) -> "InertiaGen":
        return cls("2", k)


def chi_eval_inertia(d, gen: InertiaGen) -> int:
    if gen.kind == "p":
        return chi_sigma_p(d, gen.index)
    return chi_sigma_2(d, gen.index)


def chi_eval_frob(d, q: int) -> int:
    """0 if the odd prime q splits in Q(sqrt d), 1 if it is inert."""
    d = _as_int(d)
    if q % 2 == 0 or d % q == 0:
        raise Ramified(f"{q} ramifies in Q(sqrt({d}))")
    return int(kronecker(d, q) == -1)


def quadratic_disc(d) -> int:
    d = _as_int(d)
    if d == 1:
        raise UnitInput("d = 1 has no quadratic field")
    return abs(d) if d % 4 == 1 else 4 * abs(d)
