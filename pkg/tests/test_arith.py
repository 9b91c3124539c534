import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

import nilmalle.arith.sieve as sv
from nilmalle.arith.characters import (
    InertiaGen,
    Ramified,
    SquarefreeInt,
    UnitInput,
    chi_basis_decompose,
    chi_eval_frob,
    chi_eval_inertia,
    quadratic_disc,
)
from nilmalle.arith.sieve import CapExceeded, is_squarefree, sieve, trial_factor
from nilmalle.arith.symbols import (
    INFINITY,
    TWO,
    Place,
    ZeroArgument,
    hilbert,
    hilbert_bruteforce,
    kronecker,
    relevant_places,
    squarefree_part,
)

SMALL_PRIMES = [p for p in range(3, 100) if all(p % q for q in range(2, p))]


def squarefree_ints(lo=-(10**9), hi=10**9):
    return st.integers(lo, hi).filter(lambda d: d != 0 and is_squarefree(d))


# -- sieve ---------------------------------------------------------------------


def test_sieve_small_values():
    t = sieve(100)
    assert t.mu[1] == 1 and t.omega[1] == 0
    assert t.mu[12] == 0 and t.omega[12] == 2
    assert t.mu[30] == -1 and t.omega[30] == 3
    assert all(t.mu[p] == -1 for p in SMALL_PRIMES)


def test_squarefree_density():
    t = sieve(10**6)
    share = int(t.squarefree[1:].sum()) / 10**6
    assert 0.6078 <= share <= 0.6080


def test_sieve_matches_trial_division():
    t = sieve(5000)
    for n in range(2, 5000):
        assert t.factor(n) == trial_factor(n)
        assert t.omega[n] == len(trial_factor(n))


def test_sieve_cap(monkeypatch):
    monkeypatch.setenv("MALLE_SIEVE_CAP", "1000")
    with pytest.raises(CapExceeded):
        sieve(2000)


@pytest.fixture
def fresh_memo(monkeypatch):
    monkeypatch.setattr(sv, "_MEMO", {})


def test_sieve_cache_roundtrip(tmp_path, fresh_memo):
    a = sieve(3000, cache_dir=tmp_path)
    assert list(tmp_path.iterdir())
    sv._MEMO.clear()
    b = sieve(3000, cache_dir=tmp_path)
    assert np.array_equal(a.mu, b.mu) and np.array_equal(a.lpf, b.lpf)


def test_corrupt_cache_is_rebuilt(tmp_path, fresh_memo):
    good = sieve(2500, cache_dir=tmp_path)
    for f in tmp_path.iterdir():
        f.write_bytes(b"garbage")
    sv._MEMO.clear()
    t = sieve(2500, cache_dir=tmp_path)
    assert np.array_equal(t.mu, good.mu)


# -- Kronecker -----------------------------------------------------------------


def test_kronecker_one():
    assert all(kronecker(1, n) == 1 for n in range(1, 200))


def test_euler_criterion():
    for p in SMALL_PRIMES:
        for a in range(1, p):
            e = pow(a, (p - 1) // 2, p)
            assert kronecker(a, p) == (1 if e == 1 else -1)


def _legendre_euler(a, p):
    e = pow(a % p, (p - 1) // 2, p)
    return 0 if a % p == 0 else (1 if e == 1 else -1)


def _jacobi_euler(m, n):
    out = 1
    for p in trial_factor(n):
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out *= _legendre_euler(m, p) ** k
    return out


def test_quadratic_reciprocity():
    rng = random.Random(3)
    odd = range(3, 500, 2)
    for _ in range(3000):
        m, n = rng.choice(odd), rng.choice(odd)
        if np.gcd(m, n) != 1:
            continue
        sign = -1 if (m % 4 == 3 and n % 4 == 3) else 1
        assert _jacobi_euler(m, n) * _jacobi_euler(n, m) == sign
        assert kronecker(m, n) * kronecker(n, m) == sign


# -- Hilbert symbols -----------------------------------------------------------


def test_hilbert_examples():
    assert hilbert(-1, -1, INFINITY) == 1
    assert hilbert(-1, -1, TWO) == 1
    assert hilbert_bruteforce(-1, -1, TWO) == 1
    for v in (TWO, Place.odd(5), INFINITY, Place.odd(3)):
        assert hilbert(-1, 5, v) == 0
        assert hilbert_bruteforce(-1, 5, v) == 0


def test_hilbert_zero_argument():
    with pytest.raises(ZeroArgument):
        hilbert(0, 3, TWO)
    with pytest.raises(ZeroArgument):
        hilbert_bruteforce(3, 0, TWO)


def test_bruteforce_one_is_trivial():
    for b in range(-30, 31):
        if b:
            for v in relevant_places(2, b):
                assert hilbert_bruteforce(1, b, v) == 0


def test_hilbert_matches_bruteforce_exhaustively():
    vals = [x for x in range(-50, 51) if x]
    for a in vals:
        for b in vals:
            for v in relevant_places(2, a, b):
                assert hilbert(a, b, v) == hilbert_bruteforce(a, b, v), (a, b, v)


def test_place_ordering():
    assert sorted([INFINITY, TWO, Place.odd(7), Place.odd(3)]) == [Place.odd(3), Place.odd(7), TWO, INFINITY]


@given(st.integers(-(10**6), 10**6).filter(bool), st.integers(-(10**6), 10**6).filter(bool))
def test_hilbert_reciprocity(a, b):
    assert sum(hilbert(a, b, v) for v in relevant_places(2, a, b)) % 2 == 0


def test_hilbert_reciprocity_random_pairs():
    rng = random.Random(11)
    for _ in range(10**4):
        a = rng.choice([-1, 1]) * rng.randint(1, 10**4)
        b = rng.choice([-1, 1]) * rng.randint(1, 10**4)
        assert sum(hilbert(a, b, v) for v in relevant_places(2, a, b)) % 2 == 0


def test_hilbert_symmetric_and_bilinear():
    vals = [x for x in range(-30, 31) if x and is_squarefree(x)]
    rng = random.Random(5)
    for _ in range(4000):
        a, b, c = (rng.choice(vals) for _ in range(3))
        for v in relevant_places(2, a, b, c):
            assert hilbert(a, b, v) == hilbert(b, a, v)
            bc = squarefree_part(b * c)
            assert (hilbert(a, b, v) + hilbert(a, c, v)) % 2 == hilbert(a, bc, v)


# -- characters ----------------------------------------------------------------


def test_decompose_examples():
    d = chi_basis_decompose(-1)
    assert (d.coeff_minus1, d.coeff_2, d.odd_primes) == (1, 0, ())
    d = chi_basis_decompose(3)
    assert (d.coeff_minus1, d.coeff_2, d.odd_primes) == (1, 0, (3,))
    d = chi_basis_decompose(5)
    assert (d.coeff_minus1, d.coeff_2, d.odd_primes) == (0, 0, (5,))


@given(squarefree_ints())
def test_decompose_roundtrip(d):
    assert chi_basis_decompose(d).reassemble() == d


def test_decompose_roundtrip_bulk():
    rng = random.Random(7)
    done = 0
    while done < 10**4:
        d = rng.choice([-1, 1]) * rng.randint(1, 10**9)
        if not is_squarefree(d):
            continue
        assert chi_basis_decompose(d).reassemble() == d
        done += 1


def test_inertia_examples():
    assert chi_eval_inertia(15, InertiaGen.sigma_p(3)) == 1
    assert chi_eval_inertia(15, InertiaGen.sigma_p(7)) == 0
    assert chi_eval_inertia(-1, InertiaGen.sigma_2(1)) == 0
    assert chi_eval_inertia(-1, InertiaGen.sigma_2(2)) == 1
    assert chi_eval_inertia(5, InertiaGen.sigma_2(1)) == 0
    assert chi_eval_inertia(5, InertiaGen.sigma_2(2)) == 0
    assert quadratic_disc(5) == 5


@given(squarefree_ints(-(10**5), 10**5))
def test_inertia_vanishes_only_on_trivial_class(d):
    gens = [InertiaGen.sigma_2(1), InertiaGen.sigma_2(2)] + [InertiaGen.sigma_p(p) for p in trial_factor(d) if p != 2]
    vanishes = all(chi_eval_inertia(d, g) == 0 for g in gens)
    assert vanishes == (d == 1)


@given(squarefree_ints(-(10**5), 10**5))
def test_inertia_at_two_matches_decomposition(d):
    dec = chi_basis_decompose(d)
    assert chi_eval_inertia(d, InertiaGen.sigma_2(1)) == dec.coeff_2
    assert chi_eval_inertia(d, InertiaGen.sigma_2(2)) == dec.coeff_minus1


def test_frob_examples():
    assert all(chi_eval_frob(1, q) == 0 for q in SMALL_PRIMES)
    assert chi_eval_frob(-1, 5) == 0
    assert chi_eval_frob(-1, 7) == 1
    with pytest.raises(Ramified):
        chi_eval_frob(15, 5)


@given(squarefree_ints(-3000, 3000), squarefree_ints(-3000, 3000), st.sampled_from(SMALL_PRIMES))
def test_frob_multiplicative(d1, d2, q):
    if np.gcd(d1, d2) != 1 or d1 % q == 0 or d2 % q == 0:
        return
    assert chi_eval_frob(d1 * d2, q) == (chi_eval_frob(d1, q) + chi_eval_frob(d2, q)) % 2


def test_quadratic_disc_examples():
    assert quadratic_disc(5) == 5
    assert quadratic_disc(-1) == 4
    assert quadratic_disc(-15) == 15
    assert quadratic_disc(SquarefreeInt.from_int(-6)) == 24
    with pytest.raises(UnitInput):
        quadratic_disc(1)


def test_squarefree_int():
    s = SquarefreeInt.from_int(-30)
    assert s.sign == -1 and s.primes == (2, 3, 5) and s.value == -30
    assert SquarefreeInt.from_int(-1).primes == ()
    with pytest.raises(ValueError):
        SquarefreeInt.from_int(12)
