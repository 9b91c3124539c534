"""Dense linear algebra over the prime field F_l."""
from __future__ import annotations

import numpy as np


def row_reduce(mat: np.ndarray, l: int) -> tuple[np.ndarray, list[int]]:
    """Return the reduced row echelon form of ``mat`` mod ``l`` and its pivot columns."""
    a = np.array(mat, dtype=np.int64) % l
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        inv = pow(int(a[r, c]), -1, l)
        a[r] = (a[r] * inv) % l
        col = a[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r])) % l
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod(mat: np.ndarray, l: int) -> int:
    if np.size(mat) == 0:
        return 0
    return len(row_reduce(mat, l)[1])


def solve_mod(mat: np.ndarray, rhs: np.ndarray, l: int) -> np.ndarray | None:
    """Find one solution x of ``mat @ x = rhs`` over F_l, or None if inconsistent."""
    mat = np.asarray(mat, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1, 1)
    n = mat.shape[1]
    aug = np.hstack([mat % l, rhs % l])
    red, pivots = row_reduce(aug, l)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(pivots):
        x[c] = red[row, n]
    return x


def in_span_mod(vectors: list[np.ndarray], target: np.ndarray, l: int) -> bool:
    """True iff ``target`` lies in the F_l-span of ``vectors``."""
    target = np.asarray(target, dtype=np.int64) % l
    if not target.any():
        return True
    if not vectors:
        return False
    mat = np.stack([np.asarray(v, dtype=np.int64) for v in vectors], axis=1)
    return solve_mod(mat, target, l) is not None
