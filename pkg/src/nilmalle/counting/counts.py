"""Upper-bound, exact and heuristic counts of squarefree tuples."""
from __future__ import annotations

import time
from bisect import bisect_right
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..arith.sieve import sieve
from ..groups.core import InvalidCyclotomicDegree, LGroup, TableGroup, smallest_prime
from ..groups.invariants import exponent_e
from ..param.obstruction import ObstructionSpec, SpecMismatch, TrivialTheta
from ..param.pipeline import Bullet, Epi, Unknown, get_pipeline
from .enumerate import EnumConstraints, Shard, TupleWalker, enumerate_tuples, iroot
from .prefix import (
    admissible_mask,
    coprime_sum,
    coprime_sum_mod4,
    correction_terms,
    prefix_table,
    residue_tables,
)

HEURISTIC_NOTE = "local conditions at primes of variables outside I(G) are ignored"


@dataclass
class CountReport:
    mode: str
    X: int
    lower: int
    upper: int
    heuristic: float | None = None
    unknown_tuples: int = 0
    elapsed: float = 0.0
    shards: tuple[int, int] = (1, 0)
    group: str = ""
    two_unramified: bool = False
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower exceeds upper")

    def to_json(self) -> dict:
        d = asdict(self)
        d["shards"] = list(self.shards)
        return d


@dataclass
class WindowCounts:
    """Counts at several bounds from one enumeration at the largest."""

    Xs: list[int]
    lower: list[int]
    upper: list[int]
    heuristic: list[float] | None = None
    discs: list[tuple[int, str, str]] | None = None


def _two_group(G: TableGroup) -> bool:
    return isinstance(G, LGroup) and G.l == 2


def _sorted_windows(Xs: Iterable[int]) -> list[int]:
    out = sorted({int(x) for x in Xs})
    if not out or out[0] < 0:
        raise ValueError("need nonnegative bounds")
    return out


# -- upper and heuristic ------------------------------------------------------


def _weighted_sum(
    G: TableGroup,
    Xs: list[int],
    light_weight: Callable[[int], float | int],
    prime_ok: Callable[[int], bool],
    shard: Shard,
) -> list:
    """sum over tuples (trivial one included, unsigned) of prod over light g of w_g^omega(v_g).

    Light elements are those of least exponent; heavier ones carry weight 1.
    """
    exps = [exponent_e(G, g) for g in range(1, G.order)]
    a = min(exps)
    coeffs: dict[int, float | int] = Counter()
    z: float | int = 0
    for g, e in enumerate(exps, start=1):
        if e == a:
            z += light_weight(g)
        else:
            coeffs[e] += 1
    coeffs = dict(coeffs)
    coeffs[a] = z
    Xmax = Xs[-1]
    N = max(iroot(Xmax, a), 2)
    table = prefix_table(N, z, admissible_mask(N, prime_ok))
    heavy = [e for e in coeffs if e != a]
    if heavy:
        pmax = iroot(Xmax, min(heavy))
        tab = sieve(max(pmax, 2))
        primes = [p for p in tab.primes[tab.primes <= pmax].tolist() if prime_ok(p)]
    else:
        primes = []
    totals = [0] * len(Xs)
    for idx, (m, coef) in enumerate(correction_terms(Xmax, primes, coeffs, a, z)):
        if shard.count > 1 and idx % shard.count != shard.index:
            continue
        Bs = np.array([iroot(X // m, a) for X in Xs], dtype=np.int64)
        vals = table(Bs).tolist()
        for k, v in enumerate(vals):
            totals[k] += coef * v
    return totals


def _support_rule(G: TableGroup) -> Callable[[int], bool]:
    if _two_group(G):
        return lambda p: True
    l = smallest_prime(G)
    order = G.order
    return lambda p: order % p != 0 and p % l == 1


def count_upper_windows(G: TableGroup, Xs: Iterable[int], shard: Shard = Shard()) -> WindowCounts:
    """Number of admissible tuples (no solvability filter) at each bound.

    For 2-groups each unsigned tuple has #G signed versions (no negative
    entry, or one of the #G - 1 entries negative); the all-ones tuple is
    dropped at the end, by shard 0 only.
    """
    Xs = _sorted_windows(Xs)
    if not isinstance(G, LGroup):
        raise ValueError("count_upper needs an l-group")
    sums = _weighted_sum(G, Xs, lambda g: 1, _support_rule(G), shard)
    factor = G.order if _two_group(G) else 1
    drop = 1 if shard.index == 0 else 0
    out = [int(factor * s - drop) if X >= 1 else 0 for X, s in zip(Xs, sums)]
    return WindowCounts(Xs, out, out)


def count_upper(G: TableGroup, X: int, shard: Shard = Shard()) -> CountReport:
    t = time.perf_counter()
    wc = count_upper_windows(G, [X], shard)
    return CountReport(
        "upper", int(X), wc.lower[0], wc.upper[0], elapsed=time.perf_counter() - t,
        shards=(shard.count, shard.index), group=getattr(G, "name", ""),
    )


def heuristic_weights(G: LGroup, d: int) -> dict[int, Fraction]:
    """Per-element weight per prime: 1/(d #Conj(g)) on I(G), 1 elsewhere."""
    l = smallest_prime(G)
    if d < 1 or (l - 1) % d:
        raise InvalidCyclotomicDegree(f"d = {d} does not divide {l - 1}")
    out = {}
    for g in range(1, G.order):
        if G.element_order(g) == l:
            out[g] = Fraction(1, d * len(G.conjugacy_class(g)))
        else:
            out[g] = Fraction(1)
    return out


def count_heuristic_windows(G: LGroup, Xs: Iterable[int], d: int = 1, shard: Shard = Shard()) -> WindowCounts:
    Xs = _sorted_windows(Xs)
    w = heuristic_weights(G, d)
    l = smallest_prime(G)
    if l == 2:
        rule = lambda p: True  # noqa: E731
    else:
        rule = lambda p: p != l  # noqa: E731
    sums = _weighted_sum(G, Xs, lambda g: float(w[g]), rule, shard)
    factor = G.order if l == 2 else 1
    vals = []
    for X, s in zip(Xs, sums):
        v = factor * float(s) - (1 if shard.index == 0 else 0)
        vals.append(v if X >= 1 else 0.0)
    return WindowCounts(Xs, [0] * len(Xs), [0] * len(Xs), heuristic=vals)


def count_heuristic(G: LGroup, X: int, d: int = 1, shard: Shard = Shard()) -> CountReport:
    t = time.perf_counter()
    wc = count_heuristic_windows(G, [X], d, shard)
    return CountReport(
        "heuristic", int(X), 0, 0, heuristic=wc.heuristic[0], elapsed=time.perf_counter() - t,
        shards=(shard.count, shard.index), group=getattr(G, "name", ""), notes=[HEURISTIC_NOTE],
    )


# -- exact ---------------------------------------------------------------------


def _format_tuple(values: Sequence[int]) -> str:
    return ";".join(f"{g}={v}" for g, v in enumerate(values, start=1) if v != 1)


def _verdict_name(v) -> str:
    if isinstance(v, Epi):
        return "epi"
    if isinstance(v, Unknown):
        return "unknown"
    return "bullet"


def _bulk_eligible(G: TableGroup, spec: ObstructionSpec) -> bool:
    return _two_group(G) and all(isinstance(s, TrivialTheta) for s in spec.steps)


def _rank_masks(masks: Iterable[int]) -> int:
    basis: list[int] = []
    for m in masks:
        for b in basis:
            m = min(m, m ^ b)
        if m:
            basis.append(m)
    return len(basis)


def _exact_bulk(G: LGroup, Xs: list[int], two_unramified: bool, shard: Shard) -> tuple[list[int], list[int]]:
    """Counts for elementary abelian 2-groups with the last variable counted in bulk.

    With every step split, a tuple is an epimorphism exactly when the element
    masks of its atoms (-1, 2 and odd primes) span F_2^r; a nontrivial last
    entry always contributes its own mask, whatever its size.
    """
    cons = EnumConstraints.for_group(G, Xs[-1], two_unramified=two_unramified, shard=shard)
    walker = TupleWalker(G, cons, bulk_tail=1)
    last = walker.order[-1]
    e = cons.exponents[last - 1]
    N = walker.N
    mask = admissible_mask(N, None, odd_only=two_unramified)
    plain = prefix_table(N, 1, mask)
    mod4 = residue_tables(N, mask) if two_unramified else None
    r = G.r
    counts = [0] * len(Xs)
    if walker.bulk_tail == len(walker.order) and shard.index != 0:
        return counts, counts
    for values, primes, _, neg in walker.walk():
        weight = 1
        masks = []
        used_primes = []
        for g, (v, ps) in enumerate(zip(values, primes), start=1):
            if v == 1:
                continue
            weight *= abs(v) ** cons.exponents[g - 1]
            if v < 0:
                masks.append(g)
            masks.extend([g] * len(ps))
            used_primes.extend(ps)
        if weight > Xs[-1]:
            continue
        Bs = np.array([iroot(X // weight, e) if X >= weight else 0 for X in Xs], dtype=np.int64)
        base_rank = _rank_masks(masks)
        full_with = _rank_masks(masks + [last]) == r
        full_without = base_rank == r
        P = sorted(set(used_primes))
        if not two_unramified:
            pos = coprime_sum(plain, Bs, P)  # includes n = 1
            n_pos = pos - (Bs >= 1)
            n_neg = pos if not neg else np.zeros_like(pos)
            add = (n_pos + n_neg) * int(full_with) + (Bs >= 1) * int(full_without)
        else:
            # residues of the assigned part of each coordinate
            heavy = [1] * r
            for g, v in enumerate(values, start=1):
                for j in range(r):
                    if (g >> j) & 1:
                        heavy[j] *= v
            inside = [heavy[j] % 4 for j in range(r) if (last >> j) & 1]
            outside_ok = all(heavy[j] % 4 == 1 for j in range(r) if not (last >> j) & 1)
            add = np.zeros_like(Bs)
            if outside_ok and len(set(inside)) == 1:
                c = inside[0]  # v must be c mod 4
                pos = coprime_sum_mod4(mod4, Bs, P, c)
                if c == 1:
                    pos = pos - (Bs >= 1)
                    add = add + (Bs >= 1) * int(full_without)
                negs = coprime_sum_mod4(mod4, Bs, P, (-c) % 4) if not neg else np.zeros_like(Bs)
                add = add + (pos + negs) * int(full_with)
        for k, a in enumerate(add.tolist()):
            counts[k] += a
    return counts, counts


def count_exact_windows(
    G: LGroup,
    spec: ObstructionSpec,
    Xs: Iterable[int],
    two_unramified: bool = False,
    shard: Shard = Shard(),
    emit_discs: bool = False,
    bulk: bool | None = None,
) -> WindowCounts:
    Xs = _sorted_windows(Xs)
    if not isinstance(G, LGroup):
        raise SpecMismatch("exact counts need an l-group")
    if len(spec.steps) != G.r:
        raise SpecMismatch(f"spec has {len(spec.steps)} steps, group has {G.r}")
    pipe = get_pipeline(G, spec)
    if bulk is None:
        bulk = _bulk_eligible(G, spec) and not emit_discs
    if bulk:
        if not _bulk_eligible(G, spec):
            raise ValueError("bulk counting needs an elementary abelian 2-group")
        lo, hi = _exact_bulk(G, Xs, two_unramified, shard)
        return WindowCounts(Xs, lo, hi)
    exps = [exponent_e(G, g) for g in range(1, G.order)]
    cons = EnumConstraints(Xs[-1], tuple(exps), _two_group(G), two_unramified=two_unramified, shard=shard)
    epi_w: list[int] = []
    unk_w: list[int] = []
    discs: list[tuple[int, str, str]] | None = [] if emit_discs else None
    for tup in enumerate_tuples(G, cons):
        v = pipe.run(tup)
        if isinstance(v, Bullet):
            continue
        w = 1
        for x, e in zip(tup.values, exps):
            if x != 1:
                w *= abs(x) ** e
        (epi_w if isinstance(v, Epi) else unk_w).append(w)
        if discs is not None:
            discs.append((w, _verdict_name(v), _format_tuple(tup.values)))
    epi_w.sort()
    unk_w.sort()
    lower = [bisect_right(epi_w, X) for X in Xs]
    upper = [lo + bisect_right(unk_w, X) for lo, X in zip(lower, Xs)]
    if discs is not None:
        discs.sort()
    return WindowCounts(Xs, lower, upper, discs=discs)


def count_exact(
    G: LGroup,
    spec: ObstructionSpec,
    X: int,
    two_unramified: bool = False,
    shard: Shard = Shard(),
    emit_discs: bool = False,
) -> tuple[CountReport, list[tuple[int, str, str]] | None]:
    t = time.perf_counter()
    wc = count_exact_windows(G, spec, [X], two_unramified, shard, emit_discs)
    rep = CountReport(
        "exact", int(X), wc.lower[0], wc.upper[0], unknown_tuples=wc.upper[0] - wc.lower[0],
        elapsed=time.perf_counter() - t, shards=(shard.count, shard.index),
        group=getattr(G, "name", ""), two_unramified=two_unramified,
    )
    return rep, wc.discs


def epi_discriminants(G: LGroup, spec: ObstructionSpec, X: int, two_unramified: bool = False) -> list[int]:
    """Sorted weights of tuples the pipeline turns into epimorphisms."""
    _, discs = count_exact(G, spec, X, two_unramified, emit_discs=True)
    assert discs is not None
    return [d for d, kind, _ in discs if kind == "epi"]


# -- base-point tails ----------------------------------------------------------


@dataclass(frozen=True)
class TailReport:
    """How much of an exact count comes from base points beyond norm B.

    A base point is the restriction of a tuple to the heavy elements (those
    outside the involution locus); its norm is prod |v_g|^e_g over them.
    ``tail_series`` is sum norm^(-a) over the base points seen with norm > B,
    the quantity that should dominate ``share`` up to a constant.
    """

    X: int
    B: int
    total: int
    beyond: int
    share: float
    tail_series: float


def base_point_tail(
    G: LGroup, spec: ObstructionSpec, X: int, Bs: Sequence[int], two_unramified: bool = False
) -> list[TailReport]:
    from ..groups.invariants import constants, involution_locus

    locus = involution_locus(G)
    if not locus <= G.center:
        raise ValueError("base-point tails need the involution locus inside the center")
    a = float(constants(G, 1).a)
    heavy = [g for g in range(1, G.order) if g not in locus]
    exps = [exponent_e(G, g) for g in range(1, G.order)]
    pipe = get_pipeline(G, spec)
    cons = EnumConstraints(int(X), tuple(exps), _two_group(G), two_unramified=two_unramified)
    norms: list[int] = []
    bases: dict[tuple[int, ...], int] = {}
    for tup in enumerate_tuples(G, cons):
        if not isinstance(pipe.run(tup), Epi):
            continue
        key = tuple(tup.values[g - 1] for g in heavy)
        norm = 1
        for g in heavy:
            norm *= abs(tup.values[g - 1]) ** exps[g - 1]
        norms.append(norm)
        bases[key] = norm
    norms.sort()
    base_norms = sorted(bases.values())
    out = []
    for B in Bs:
        beyond = len(norms) - bisect_right(norms, B)
        series = float(sum(n ** -a for n in base_norms[bisect_right(base_norms, B):]))
        share = beyond / len(norms) if norms else 0.0
        out.append(TailReport(int(X), int(B), len(norms), beyond, share, series))
    return out
