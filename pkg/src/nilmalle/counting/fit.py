"""Least-squares checks of the shape c X^a (log X)^(b - 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

MIN_WINDOWS = 6


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class FitReport:
    a: float
    log_power: float  # estimated b - 1
    constant: float
    residual: float
    windows: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "log_power": self.log_power,
            "constant": self.constant,
            "residual": self.residual,
            "windows": list(self.windows),
        }


def fit_asymptotic(points: Sequence[tuple[int | float, float]], a: float | Fraction) -> FitReport:
    """Regress log(N / X^a) on log log X; slope is b - 1 and the intercept log c."""
    if len(points) < MIN_WINDOWS:
        raise InsufficientData(f"need at least {MIN_WINDOWS} windows, got {len(points)}")
    a = float(a)
    xs, ys = [], []
    for X, N in points:
        if N <= 0 or X <= math.e:
            raise InsufficientData(f"unusable point ({X}, {N})")
        lx = math.log(X)
        xs.append(math.log(lx))
        ys.append(math.log(N) - a * lx)
    A = np.column_stack([np.asarray(xs), np.ones(len(xs))])
    sol, res, *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    resid = float(np.linalg.norm(A @ sol - np.asarray(ys)))
    return FitReport(a, float(sol[0]), float(math.exp(sol[1])), resid, tuple(int(X) for X, _ in points))


def fit_power(points: Sequence[tuple[int | float, float]]) -> tuple[float, float]:
    """Slope and intercept of log N against log X."""
    if len(points) < MIN_WINDOWS:
        raise InsufficientData(f"need at least {MIN_WINDOWS} windows, got {len(points)}")
    lx = np.log([float(X) for X, _ in points])
    ly = np.log([float(N) for _, N in points])
    slope, icept = np.polyfit(lx, ly, 1)
    return float(slope), float(icept)


def dyadic_windows(X_max: int, count: Callable[[list[int]], Sequence[float]], min_count: int = 100,
                   max_windows: int = 64) -> list[tuple[int, float]]:
    """Windows X_max / 2^k down to the last one still holding min_count."""
    Xs = []
    X = int(X_max)
    while X >= 2 and len(Xs) < max_windows:
        Xs.append(X)
        X //= 2
    Xs.reverse()
    Ns = list(count(Xs))
    pts = [(X, N) for X, N in zip(Xs, Ns) if N >= min_count]
    return pts
