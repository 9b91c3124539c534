import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilmalle.analytic.sums import (
    SQUAREFREE,
    UNIT,
    ArithmeticFunctionSpec,
    PrimeCondition,
    SeriesDivergence,
    a_z_sum,
    a_z_sum_direct,
    binomial_series,
    c3_constant,
    convolution_check,
    dyadic_xs,
    expected_log_power,
    filter_identity_check,
    hyperbola_sum,
    sd_shape_check,
)
from nilmalle.arith.sieve import CapExceeded, sieve

ONE_MOD_4 = PrimeCondition.residue(4, 1)


def test_prime_condition():
    assert ONE_MOD_4.density == 0.5
    assert ONE_MOD_4.allows(5) and not ONE_MOD_4.allows(7) and not ONE_MOD_4.allows(2)
    assert PrimeCondition().allows(2)
    assert not PrimeCondition(excluded=frozenset({3})).allows(3)
    assert PrimeCondition.residue(3, 1, 2).density == 1.0
    with pytest.raises(ValueError):
        PrimeCondition.residue(4, 2)


def test_a_z_trivial_cases():
    assert a_z_sum(1000, 0) == 1
    t = sieve(10**5)
    assert a_z_sum(10**5, 1) == int(t.squarefree[1:].sum())


def test_a_z_bounds():
    with pytest.raises(ValueError):
        a_z_sum(100, 17)
    with pytest.raises(CapExceeded):
        a_z_sum(10**12, 1)


def test_a_z_polynomial_matches_direct():
    rng = random.Random(20)
    conds = [PrimeCondition(), ONE_MOD_4, PrimeCondition.residue(3, 2, excluded=(5,))]
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        for cond in conds:
            assert a_z_sum(10**4, z, cond) == pytest.approx(a_z_sum_direct(10**4, z, cond), rel=1e-9)


def test_a2_mod4_stabilizes():
    r6 = a_z_sum(10**6, 2, ONE_MOD_4).real / 10**6
    r7 = a_z_sum(10**7, 2, ONE_MOD_4).real / 10**7
    assert abs(r7 - r6) / r7 < 0.03


def test_expected_log_power():
    assert expected_log_power(3, ONE_MOD_4) == 0.5
    assert expected_log_power(1, PrimeCondition()) == 0


def test_sd_shape_z1():
    rep = sd_shape_check(1, PrimeCondition(), dyadic_xs(10**6, PrimeCondition()))
    assert abs(rep.log_power) < 0.1


# -- convolution ---------------------------------------------------------------


def test_c3_collapses_for_squarefree_pair():
    assert binomial_series(0, 0) == pytest.approx(0.5, abs=1e-15)
    assert c3_constant(SQUAREFREE, SQUAREFREE) == pytest.approx(SQUAREFREE.C**2, rel=1e-14)


def _dummy(A):
    return ArithmeticFunctionSpec(f"A={A}", 1.0, A, lambda N: np.zeros(N + 1))


@pytest.mark.parametrize("A,B", list(itertools.product([-0.5, 0, 0.5, 1, 2], repeat=2)))
def test_c3_positive(A, B):
    assert c3_constant(_dummy(A), _dummy(B)) > 0


def test_binomial_series_against_integral():
    # the series equals int_0^{1/2} t^A (1 - t)^B dt
    for A, B in [(0.5, 1.0), (0, 2), (1.5, -0.5), (-0.5, 0.5)]:
        n = 200000
        t = (np.arange(n) + 0.5) / n * 0.5
        integral = float(np.sum(t**A * (1 - t) ** B) * 0.5 / n)
        assert binomial_series(A, B) == pytest.approx(integral, rel=2e-3)


def test_divergent_exponent_rejected():
    with pytest.raises(SeriesDivergence):
        _dummy(-1.0)
    with pytest.raises(SeriesDivergence):
        binomial_series(-1.5, 0)
    with pytest.raises(SeriesDivergence):
        c3_constant(SQUAREFREE, UNIT)


def test_hyperbola_matches_direct_convolution():
    N = 3000
    f = SQUAREFREE.values(N)
    g = np.arange(N + 1) % 3
    conv = np.zeros(N + 1, dtype=np.int64)
    for a in range(1, N + 1):
        conv[a::a] += f[a] * g[1 : N // a + 1]
    for x in (1, 2, 10, 999, 3000):
        assert hyperbola_sum(f, g, x) == conv[1 : x + 1].sum()


def test_convolution_symmetric():
    a = convolution_check(SQUAREFREE, UNIT, 10**5)
    b = convolution_check(UNIT, SQUAREFREE, 10**5)
    assert (a.direct, a.predicted, a.relative_error) == (b.direct, b.predicted, b.relative_error)
    c = convolution_check(SQUAREFREE, SQUAREFREE, 10**5)
    assert c.direct == convolution_check(SQUAREFREE, SQUAREFREE, 10**5).direct


def test_convolution_with_unit_reduces_to_f():
    rep = convolution_check(SQUAREFREE, UNIT, 10**6)
    assert rep.direct == int(sieve(10**6).squarefree[1:].sum())
    assert rep.predicted == pytest.approx(SQUAREFREE.C * 10**6)
    assert rep.relative_error < 1e-3


# -- roots-of-unity filter -----------------------------------------------------


def test_filter_empty_product():
    r = filter_identity_check(2, 2, (0, 0), 0)
    assert r.lhs == 1 and abs(r.rhs - 1) < 1e-12
    r = filter_identity_check(3, 2, (1, 0), 0)
    assert r.lhs == 0 and abs(r.rhs) < 1e-12


def test_filter_small_example():
    r = filter_identity_check(2, 2, (1, 0), 3)
    assert r.error < 1e-12
    # slot 1 gets an odd number of the 3 primes, slot 2 the rest: 3 + 1 ways
    assert r.lhs == pytest.approx(4 / 2**3)


def test_filter_exhaustive():
    worst = 0.0
    for l in (2, 3):
        for k in (1, 2, 3):
            for n in range(0, 9):
                for a in itertools.product(range(l), repeat=k):
                    for d in (1, 2):
                        r = filter_identity_check(l, k, a, n, d)
                        worst = max(worst, r.error)
                        assert r.approx_error <= r.approx_bound + 1e-12
    assert worst < 1e-10


def test_filter_caps():
    with pytest.raises(CapExceeded):
        filter_identity_check(2, 2, (0, 0), 13)
    with pytest.raises(CapExceeded):
        filter_identity_check(3, 7, (0,) * 7, 1)


@given(st.sampled_from([2, 3]), st.integers(1, 3), st.integers(0, 6), st.data())
def test_filter_property(l, k, n, data):
    a = data.draw(st.tuples(*[st.integers(0, l - 1)] * k))
    assert filter_identity_check(l, k, a, n).error < 1e-10
