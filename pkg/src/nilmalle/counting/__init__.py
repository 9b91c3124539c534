"""Tuple enumeration and counts under a discriminant bound."""
from .counts import (
    CountReport,
    InvalidCyclotomicDegree,
    TailReport,
    WindowCounts,
    base_point_tail,
    count_exact,
    count_exact_windows,
    count_heuristic,
    count_heuristic_windows,
    count_upper,
    count_upper_windows,
    epi_discriminants,
)
from .enumerate import EnumConstraints, Shard, enumerate_tuples, iroot
from .fit import FitReport, InsufficientData, dyadic_windows, fit_asymptotic, fit_power

__all__ = [
    "CountReport", "InvalidCyclotomicDegree", "TailReport", "WindowCounts", "base_point_tail", "count_exact", "count_exact_windows",
    "count_heuristic", "count_heuristic_windows", "count_upper", "count_upper_windows",
    "epi_discriminants", "EnumConstraints", "Shard", "enumerate_tuples", "iroot", "FitReport",
    "InsufficientData", "dyadic_windows", "fit_asymptotic", "fit_power",
]
