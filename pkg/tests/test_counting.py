import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilmalle.arith.sieve import sieve
from nilmalle.counting import (
    EnumConstraints,
    InsufficientData,
    InvalidCyclotomicDegree,
    Shard,
    base_point_tail,
    count_exact,
    count_exact_windows,
    count_heuristic,
    count_upper,
    count_upper_windows,
    dyadic_windows,
    enumerate_tuples,
    fit_asymptotic,
    fit_power,
    iroot,
)
from nilmalle.counting.counts import heuristic_weights
from nilmalle.counting.prefix import (
    admissible_mask,
    coprime_sum,
    coprime_sum_mod4,
    correction_series,
    prefix_table,
    residue_tables,
)
from nilmalle.groups.invariants import breaks, exponent_e
from nilmalle.param.pipeline import Epi, Unknown, solvable
from nilmalle.param.pow import pow_forward
from nilmalle.param.tuples import pairwise_coprime


def squarefree_upto(n):
    t = sieve(max(n, 2))
    return [k for k in range(1, n + 1) if t.squarefree[k]]


def brute_tuples(G, X):
    """All signed tuples with prod |v_g|^e_g <= X, assigned in element order with budget pruning."""
    exps = [exponent_e(G, g) for g in range(1, G.order)]
    cands = []
    for e in exps:
        vals = squarefree_upto(iroot(X, e))
        cands.append(sorted({s * v for v in vals for s in (1, -1)}, key=abs))
    out = []

    def rec(i, used, budget, combo):
        if i == len(exps):
            if any(v != 1 for v in combo) and pairwise_coprime(combo):
                out.append(tuple(combo))
            return
        for v in cands[i]:
            cost = abs(v) ** exps[i]
            if cost > budget:
                break
            if math.gcd(abs(v), used) != 1:
                continue
            rec(i + 1, used * abs(v), budget // cost, combo + [v])

    rec(0, 1, X, [])
    return out


# -- enumeration ---------------------------------------------------------------


def test_iroot():
    for n in range(0, 3000):
        for k in (1, 2, 3, 4, 6):
            x = iroot(n, k)
            assert x**k <= max(n, 0) < (x + 1) ** k or n < 1
    assert iroot(10**40, 4) == 10**10
    assert iroot(10**40 - 1, 4) == 10**10 - 1


def test_c2_at_ten(grp):
    G = grp("C2")
    vals = sorted(t.values[0] for t in enumerate_tuples(G, EnumConstraints.for_group(G, 10)))
    expected = sorted({s * v for v in squarefree_upto(10) for s in (1, -1)} - {1})
    assert vals == expected
    assert len(vals) == 13


def test_x_zero_is_empty(grp):
    G = grp("V4")
    assert list(enumerate_tuples(G, EnumConstraints.for_group(G, 0))) == []
    assert list(enumerate_tuples(G, EnumConstraints.for_group(G, 0, include_trivial=True))) == []
    one = list(enumerate_tuples(G, EnumConstraints.for_group(G, 1, include_trivial=True)))
    # at X = 1 only units remain: the trivial tuple and one -1 in any slot
    assert sorted(t.values for t in one) == [(-1, 1, 1), (1, -1, 1), (1, 1, -1), (1, 1, 1)]
    assert count_upper(G, 0).upper == 0


def test_v4_audit(grp):
    G = grp("V4")
    seen = set()
    for t in enumerate_tuples(G, EnumConstraints.for_group(G, 100)):
        assert pairwise_coprime(list(t.values))
        assert math.prod(abs(v) for v in t.values) ** 2 <= 100
        assert t.values not in seen
        seen.add(t.values)


@pytest.mark.parametrize("name,X", [("C2", 300), ("V4", 3000), ("C4", 5000), ("D4", 10**5), ("Q8", 10**6)])
def test_stream_matches_brute_force(grp, name, X):
    G = grp(name)
    stream = sorted(t.values for t in enumerate_tuples(G, EnumConstraints.for_group(G, X)))
    assert stream == sorted(brute_tuples(G, X))


def test_stream_deterministic_and_shardable(grp):
    G = grp("D4")
    X = 10**6
    a = [t.values for t in enumerate_tuples(G, EnumConstraints.for_group(G, X))]
    b = [t.values for t in enumerate_tuples(G, EnumConstraints.for_group(G, X))]
    assert a == b
    parts = []
    for i in range(3):
        cons = EnumConstraints.for_group(G, X, shard=Shard(3, i))
        parts.extend(t.values for t in enumerate_tuples(G, cons))
    assert sorted(parts) == sorted(a)


def test_two_unramified_stream(grp):
    G = grp("C2xC4")
    cons = EnumConstraints.for_group(G, 10**7, two_unramified=True)
    n = 0
    for t in enumerate_tuples(G, cons):
        assert all(v % 2 for v in t.values)
        assert all(w % 4 == 1 for w in pow_forward(G, t))
        n += 1
    assert n > 0


def test_odd_group_support(grp):
    G = grp("Heis27")
    for t in enumerate_tuples(G, EnumConstraints.for_group(G, 10**40)):
        for ps in t.primes:
            assert all(p % 3 == 1 for p in ps)


# -- prefix machinery ----------------------------------------------------------


def test_coprime_sum_matches_direct():
    N = 5000
    mask = admissible_mask(N, None)
    for z in (1, 2, 3):
        tab = prefix_table(N, z, mask)
        om = sieve(N).omega
        for P in ([], [3], [2, 5], [3, 7, 11]):
            for B in (1, 17, 999, 5000):
                direct = sum(
                    z ** int(om[n]) for n in range(1, B + 1) if mask[n] and all(n % p for p in P)
                )
                assert int(coprime_sum(tab, np.array([B]), P)[0]) == direct


def test_coprime_sum_mod4_matches_direct():
    N = 4000
    mask = admissible_mask(N, None, odd_only=True)
    tabs = residue_tables(N, mask)
    for P in ([], [3], [3, 5, 7]):
        for c in (1, 3):
            for B in (1, 50, 4000):
                direct = sum(1 for n in range(1, B + 1) if mask[n] and n % 4 == c and all(n % p for p in P))
                assert int(coprime_sum_mod4(tabs, np.array([B]), P, c)[0]) == direct


@given(st.dictionaries(st.integers(2, 8), st.integers(-3, 3), max_size=3), st.integers(1, 3), st.integers(-2, 4))
def test_correction_series_divides(coeffs, a, z):
    kmax = 20
    r = correction_series(coeffs, a, z, kmax)
    num = [0] * (kmax + 1)
    num[0] = 1
    for e, c in coeffs.items():
        num[e] += c
    light = [0] * (kmax + 1)
    light[0] = 1
    light[a] += z
    prod = [sum(r[i] * light[k - i] for i in range(k + 1)) for k in range(kmax + 1)]
    assert prod == num


# -- upper counts --------------------------------------------------------------


def test_c2_upper_is_signed_squarefree(grp):
    G = grp("C2")
    for X in (1, 2, 10, 1000, 10**6):
        Q = len(squarefree_upto(X))
        assert count_upper(G, X).upper == 2 * Q - 1


@pytest.mark.parametrize("name,X", [("V4", 5000), ("C4", 5000), ("D4", 10**5), ("Q8", 10**6), ("C2xC4", 10**6), ("C2^3", 10**8)])
def test_upper_matches_stream(grp, name, X):
    G = grp(name)
    n = sum(1 for _ in enumerate_tuples(G, EnumConstraints.for_group(G, X)))
    assert count_upper(G, X).upper == n


def test_upper_windows_consistent(grp):
    G = grp("Q8")
    Xs = [10**k for k in range(2, 9)]
    wc = count_upper_windows(G, Xs)
    assert wc.upper == [count_upper(G, X).upper for X in Xs]


def test_upper_shard_additivity(grp):
    G = grp("D4")
    X = 10**9
    total = count_upper(G, X).upper
    assert sum(count_upper(G, X, Shard(4, i)).upper for i in range(4)) == total


def test_upper_heis27_against_direct(grp):
    G = grp("Heis27")
    X = 10**40
    B = iroot(X, 18)
    t = sieve(B)
    direct = sum(26 ** int(t.omega[n]) for n in range(1, B + 1) if t.squarefree[n] and all(p % 3 == 1 for p in t.factor(n)))
    assert count_upper(G, X).upper == direct - 1


# -- heuristic counts ----------------------------------------------------------


@pytest.mark.parametrize("name", ["C2", "V4", "C4", "D4", "Q8", "G64"])
def test_heuristic_weight_matches_breaks(grp, name):
    G = grp(name)
    w = heuristic_weights(G, 1)
    for g in range(1, G.order):
        if G.element_order(g) == 2:
            assert w[g] == Fraction(1, G.l ** breaks(G, g))
        else:
            assert w[g] == 1


def test_heuristic_abelian_equals_upper(grp):
    for name in ("V4", "C4", "C2xC4"):
        G = grp(name)
        assert count_heuristic(G, 10**7).heuristic == pytest.approx(count_upper(G, 10**7).upper, rel=1e-12)


@pytest.mark.parametrize("name,X", [("D4", 10**6), ("Q8", 10**7), ("G64", 10**25)])
def test_heuristic_matches_stream(grp, name, X):
    G = grp(name)
    w = heuristic_weights(G, 1)
    total = 0.0
    for t in enumerate_tuples(G, EnumConstraints.for_group(G, X)):
        term = 1.0
        for g, v, ps in t.items():
            term *= float(w[g]) ** len(ps)
        total += term
    assert count_heuristic(G, X).heuristic == pytest.approx(total, rel=1e-9)


def test_heuristic_heis27_thinning(grp):
    G = grp("Heis27")
    X = 10**40
    w = heuristic_weights(G, 2)
    z = float(sum(w.values()))
    B = iroot(X, 18)
    t = sieve(B)
    direct = sum(z ** int(t.omega[n]) for n in range(1, B + 1) if t.squarefree[n] and n % 3)
    assert count_heuristic(G, X, d=2).heuristic == pytest.approx(direct - 1, rel=1e-9)


def test_heuristic_degree_validation(grp):
    with pytest.raises(InvalidCyclotomicDegree):
        count_heuristic(grp("D4"), 100, d=2)
    with pytest.raises(InvalidCyclotomicDegree):
        count_heuristic(grp("Heis27"), 100, d=3)


def test_heuristic_shards(grp):
    G = grp("D4")
    X = 10**10
    total = count_heuristic(G, X).heuristic
    parts = sum(count_heuristic(G, X, shard=Shard(3, i)).heuristic for i in range(3))
    assert parts == pytest.approx(total, rel=1e-12)


def test_heuristic_report_note(grp):
    rep = count_heuristic(grp("D4"), 10**4)
    assert rep.notes and "ignored" in rep.notes[0]


# -- exact counts --------------------------------------------------------------


@pytest.mark.parametrize("name,X", [("V4", 10**4), ("C4", 10**5), ("D4", 10**6), ("Q8", 10**7), ("C8", 10**9)])
def test_exact_bracket(entries, name, X):
    e = entries[name]
    rep, _ = count_exact(e.group, e.spec, X)
    assert rep.lower <= rep.upper <= count_upper(e.group, X).upper
    assert rep.unknown_tuples == rep.upper - rep.lower


@pytest.mark.parametrize("name,X", [("C4", 10**5), ("D4", 10**6), ("Q8", 10**7)])
def test_exact_matches_pipeline_on_stream(entries, name, X):
    e = entries[name]
    G = e.group
    epi = unk = 0
    for t in enumerate_tuples(G, EnumConstraints.for_group(G, X)):
        v = solvable(G, e.spec, t)
        epi += isinstance(v, Epi)
        unk += isinstance(v, Unknown)
    rep, _ = count_exact(G, e.spec, X)
    assert (rep.lower, rep.unknown_tuples) == (epi, unk)


@pytest.mark.parametrize("name", ["C2", "V4", "C2^3"])
@pytest.mark.parametrize("two_unramified", [False, True])
def test_bulk_matches_explicit(entries, name, two_unramified):
    e = entries[name]
    X = {"C2": 10**5, "V4": 10**6, "C2^3": 10**11}[name]
    Xs = [X // 8, X // 2, X]
    bulk = count_exact_windows(e.group, e.spec, Xs, two_unramified, bulk=True)
    plain = count_exact_windows(e.group, e.spec, Xs, two_unramified, bulk=False)
    assert bulk.lower == plain.lower


@pytest.mark.parametrize("bulk", [True, False])
def test_exact_shard_additivity(entries, bulk):
    e = entries["V4"]
    X = 10**6
    whole = count_exact_windows(e.group, e.spec, [X], bulk=bulk).lower[0]
    parts = sum(count_exact_windows(e.group, e.spec, [X], shard=Shard(4, i), bulk=bulk).lower[0] for i in range(4))
    assert parts == whole


def test_c4_exact_shards(entries):
    e = entries["C4"]
    X = 10**5
    whole, _ = count_exact(e.group, e.spec, X)
    parts = [count_exact(e.group, e.spec, X, shard=Shard(4, i))[0].lower for i in range(4)]
    assert sum(parts) == whole.lower


def test_exact_disc_rows(entries):
    e = entries["C4"]
    rep, discs = count_exact(e.group, e.spec, 10**4, two_unramified=True, emit_discs=True)
    assert len(discs) == rep.upper
    assert discs == sorted(discs)
    for w, kind, tup in discs:
        assert kind in ("epi", "unknown")
        assert all("=" in part for part in tup.split(";"))


# -- base-point tails ---------------------------------------------------------


@pytest.mark.parametrize("name,X", [("C4", 10**8), ("C2xC4", 10**9), ("Q8", 10**10)])
def test_base_point_tail_shrinks(entries, name, X):
    e = entries[name]
    Bs = [10**k for k in range(9)]
    reps = base_point_tail(e.group, e.spec, X, Bs)
    assert reps[0].total == count_exact_windows(e.group, e.spec, [X]).lower[0]
    for prev, cur in zip(reps, reps[1:]):
        assert cur.beyond <= prev.beyond and cur.tail_series <= prev.tail_series
    for r in reps:
        if r.beyond:
            assert r.tail_series > 0 and r.share <= 2 * r.tail_series
    assert base_point_tail(e.group, e.spec, X, [X])[0].beyond == 0


def test_base_point_tail_needs_central_locus(entries):
    e = entries["D4"]
    with pytest.raises(ValueError):
        base_point_tail(e.group, e.spec, 10**4, [1])


# -- fits ----------------------------------------------------------------------


def test_fit_synthetic_log_power():
    pts = [(2.0**k, 2.0 ** (k / 2) * math.log(2.0**k) ** 2) for k in range(10, 40)]
    rep = fit_asymptotic(pts, Fraction(1, 2))
    assert rep.log_power == pytest.approx(2, abs=1e-6)
    assert rep.constant == pytest.approx(1, rel=1e-6)


def test_fit_synthetic_constant():
    pts = [(2.0**k, 3 * 2.0**k) for k in range(10, 20)]
    rep = fit_asymptotic(pts, 1)
    assert rep.log_power == pytest.approx(0, abs=1e-9)
    assert rep.constant == pytest.approx(3, rel=1e-9)


def test_fit_needs_six_windows():
    with pytest.raises(InsufficientData):
        fit_asymptotic([(2.0**k, 2.0**k) for k in range(10, 15)], 1)
    with pytest.raises(InsufficientData):
        fit_power([(2.0**k, 2.0**k) for k in range(10, 15)])


def test_fit_power_slope():
    slope, _ = fit_power([(10.0**k, 5 * 10.0 ** (k / 4)) for k in range(2, 12)])
    assert slope == pytest.approx(0.25, abs=1e-9)


def test_dyadic_windows_drop_small_counts():
    pts = dyadic_windows(2**20, lambda Xs: [X / 16 for X in Xs], min_count=100)
    assert pts[-1] == (2**20, 2**16)
    assert min(N for _, N in pts) >= 100
    Xs = [X for X, _ in pts]
    assert all(b == 2 * a for a, b in zip(Xs, Xs[1:]))


def test_c2_exact_fit(entries):
    e = entries["C2"]
    pts = dyadic_windows(10**7, lambda Xs: count_exact_windows(e.group, e.spec, Xs).lower, max_windows=8)
    rep = fit_asymptotic(pts, 1)
    assert abs(rep.log_power) < 0.05
    assert rep.constant == pytest.approx(2 * 6 / math.pi**2, rel=0.05)


def test_count_report_json(grp):
    d = count_upper(grp("V4"), 1000).to_json()
    assert d["mode"] == "upper" and d["lower"] == d["upper"]
    assert d["shards"] == [1, 0]
