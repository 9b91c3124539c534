"""Concrete constructions of the catalog groups.

Small 2-groups are written down directly through bilinear or carry
cocycles.  Groups that are easier to describe another way (a semidirect
product, a matrix group) are first built as plain multiplication tables
and then converted into an admissible sequence by peeling off central
subgroups of order l one at a time.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import (
    AdmissibleSequence,
    CocycleTable,
    GroupError,
    LGroup,
    TableGroup,
    build_group,
    coboundary_of,
    is_coboundary,
)

Coords = tuple[int, ...]
CocycleFn = Callable[[Coords, Coords], int]


def _coords(idx: int, l: int, k: int) -> Coords:
    out = []
    for _ in range(k):
        idx, d = divmod(idx, l)
        out.append(d)
    return tuple(out)


def sequence_from_functions(l: int, fns: Sequence[CocycleFn | None]) -> AdmissibleSequence:
    """Tabulate cocycles given as functions of coordinate vectors (None means zero)."""
    cocycles = []
    for i, fn in enumerate(fns):
        n = l**i
        tab = np.zeros((n, n), dtype=np.int64)
        if fn is not None:
            for g in range(n):
                cg = _coords(g, l, i)
                for h in range(n):
                    tab[g, h] = fn(cg, _coords(h, l, i)) % l
        cocycles.append(CocycleTable(l, tab))
    return AdmissibleSequence(l, tuple(cocycles))


def _c4_int(c: Coords) -> int:
    return c[0] + 2 * c[1]


def direct_sequences() -> dict[str, AdmissibleSequence]:
    seqs = {
        "C2": sequence_from_functions(2, [None]),
        "V4": sequence_from_functions(2, [None, None]),
        "C4": sequence_from_functions(2, [None, lambda g, h: g[0] * h[0]]),
        "C8": sequence_from_functions(
            2,
            [None, lambda g, h: g[0] * h[0], lambda g, h: int(_c4_int(g) + _c4_int(h) >= 4)],
        ),
        "C2xC4": sequence_from_functions(2, [None, None, lambda g, h: g[0] * h[0]]),
        "C2^3": sequence_from_functions(2, [None, None, None]),
        "D4": sequence_from_functions(2, [None, None, lambda g, h: g[0] * h[1]]),
        "Q8": sequence_from_functions(
            2, [None, None, lambda g, h: g[0] * h[0] + g[0] * h[1] + g[1] * h[1]]
        ),
        "C2^2xC4": sequence_from_functions(2, [None, None, None, lambda g, h: g[0] * h[0]]),
    }
    return seqs


def prop42_table() -> np.ndarray:
    """F_2[x1,x2]/(x1^2, x2^2) semidirect F_2^2, (1,0) acting by 1+x1 and (0,1) by 1+x2.

    Ring elements are 4-bit masks over the basis (1, x1, x2, x1x2); the
    group element (p, v) has index p + 16 * (v1 + 2 v2).
    """

    def times_x1(p: int) -> int:
        a, c = p & 1, (p >> 2) & 1
        return (a << 1) | (c << 3)

    def times_x2(p: int) -> int:
        a, b = p & 1, (p >> 1) & 1
        return (a << 2) | (b << 3)

    def act(v: int, p: int) -> int:
        if v & 1:
            p ^= times_x1(p)
        if v & 2:
            p ^= times_x2(p)
        return p

    n = 64
    tab = np.zeros((n, n), dtype=np.int32)
    for x in range(n):
        p, v = x % 16, x // 16
        for y in range(n):
            q, w = y % 16, y // 16
            tab[x, y] = (p ^ act(v, q)) + 16 * (v ^ w)
    return tab


def heisenberg_table(l: int = 3) -> np.ndarray:
    """Upper unitriangular 3x3 matrices over F_l; (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')."""
    n = l**3
    tab = np.zeros((n, n), dtype=np.int32)
    for x in range(n):
        a, b, c = x % l, (x // l) % l, x // (l * l)
        for y in range(n):
            a2, b2, c2 = y % l, (y // l) % l, y // (l * l)
            tab[x, y] = (a + a2) % l + l * ((b + b2) % l) + l * l * ((c + c2 + a * b2) % l)
    return tab


def extract_admissible(table: np.ndarray, l: int) -> tuple[AdmissibleSequence, np.ndarray]:
    """Present a finite l-group as an admissible sequence.

    Returns the sequence and an array ``iso`` with iso[x] the index in the
    built group of the element x of the input table.
    """
    G = TableGroup(table)
    n = G.order
    if n == 1:
        return AdmissibleSequence(l, ()), np.zeros(1, dtype=np.int64)
    centre = sorted(G.center - {0})
    z = next((g for g in centre if G.orders[g] == l), None)
    if z is None:
        raise GroupError("no central element of order l: not an l-group")
    zpow = [0]
    for _ in range(l - 1):
        zpow.append(G.mul(zpow[-1], z))
    dlog = {g: a for a, g in enumerate(zpow)}
    # cosets of <z>, labelled by their least element
    label = np.full(n, -1, dtype=np.int64)
    reps: list[int] = []
    for g in range(n):
        if label[g] < 0:
            for a in range(l):
                label[G.mul(zpow[a], g)] = len(reps)
            reps.append(g)
    m = len(reps)
    qtab = np.array([[label[G.mul(reps[x], reps[y])] for y in range(m)] for x in range(m)], dtype=np.int32)
    qseq, qiso = extract_admissible(qtab, l)
    Q = build_group(qseq, check=False)
    # section: built-quotient index -> element of G
    section = np.zeros(m, dtype=np.int64)
    for x in range(m):
        section[qiso[x]] = reps[x]
    theta = np.zeros((m, m), dtype=np.int64)
    for u in range(m):
        for v in range(m):
            prod = G.mul(int(section[u]), int(section[v]))
            uv = int(Q.table[u, v])
            theta[u, v] = dlog[G.mul(prod, int(G.inv[section[uv]]))]
    c = is_coboundary(Q, theta, l)
    if c is not None:
        # replace s(u) by z^{-c(u)} s(u); the new cocycle is theta - dc = 0
        assert not ((theta - coboundary_of(Q, c, l)) % l).any()
        for u in range(m):
            section[u] = G.mul(zpow[(-int(c[u])) % l], int(section[u]))
        theta = np.zeros((m, m), dtype=np.int64)
    seq = AdmissibleSequence(l, qseq.cocycles + (CocycleTable(l, theta),))
    iso = np.zeros(n, dtype=np.int64)
    inv_section = {int(section[u]): u for u in range(m)}
    for g in range(n):
        u = int(qiso[label[g]])
        a = dlog[G.mul(g, int(G.inv[section[u]]))]
        iso[g] = u + m * a
        assert int(section[u]) in inv_section
    built = build_group(seq, check=False)
    if not np.array_equal(built.table[iso[:, None], iso[None, :]], iso[table]):
        raise GroupError("extracted admissible sequence is not isomorphic to the input")
    return seq, iso


def table_sequences() -> dict[str, AdmissibleSequence]:
    return {
        "G64": extract_admissible(prop42_table(), 2)[0],
        "Heis27": extract_admissible(heisenberg_table(3), 3)[0],
    }


def all_sequences() -> dict[str, AdmissibleSequence]:
    out = direct_sequences()
    out.update(table_sequences())
    return out


def build_named(name: str) -> LGroup:
    return build_group(all_sequences()[name], name=name)
