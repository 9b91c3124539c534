"""Command-line entry point: group census, counts, the abelian oracle and analytic checks."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__, catalog
from .analytic import (
    SQUAREFREE,
    UNIT,
    PrimeCondition,
    a_z_sum,
    convolution_check,
    dyadic_xs,
    expected_log_power,
    filter_identity_check,
    sd_shape_check,
)
from .arith.sieve import CapExceeded
from .counting import (
    InsufficientData,
    Shard,
    count_exact_windows,
    count_heuristic_windows,
    count_upper_windows,
)
from .counting.counts import HEURISTIC_NOTE
from .groups.core import CocycleViolation, GroupError
from .groups.invariants import classes_in_locus, constants, describe_orders, involution_locus
from .oracle.abelian import AbelianGroup, invariant_factors, oracle_count
from .param.obstruction import SpecMismatch
from .param.tuples import NotPrim

log = logging.getLogger("nilmalle")

EXIT_INVALID = 2


@dataclass
class RunConfig:
    command: str
    group: str | None = None
    catalog_path: str | None = None
    X: int | None = None
    mode: str | None = None
    d: int = 1
    two_unramified: bool = False
    shards: int = 1
    shard: int | None = None
    workers: int = 1
    emit_discs: str | None = None
    report: str | None = None
    cache_dir: str | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.X is not None and self.X < 0:
            raise ValueError("X must be nonnegative")
        if self.shards < 1:
            raise ValueError("--shards must be positive")
        if self.shard is not None and not 0 <= self.shard < self.shards:
            raise ValueError("--shard must lie in [0, shards)")
        if self.workers < 1:
            raise ValueError("--workers must be positive")


def _entries(cfg: RunConfig) -> dict[str, catalog.CatalogEntry]:
    if cfg.catalog_path:
        return catalog.load_file(cfg.catalog_path)
    return catalog.load_catalog()


def _catalog_id(cfg: RunConfig) -> str:
    if cfg.catalog_path:
        import hashlib

        return hashlib.sha256(Path(cfg.catalog_path).read_bytes()).hexdigest()[:16]
    return catalog.catalog_hash()


def _entry(cfg: RunConfig) -> catalog.CatalogEntry:
    entries = _entries(cfg)
    if cfg.group not in entries:
        raise KeyError(f"unknown group {cfg.group!r}; known: {', '.join(entries)}")
    return entries[cfg.group]


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _write_csv(path: str | None, header: Sequence[str], rows) -> None:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if path and path != "-":
        Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")
    else:
        sys.stdout.write(buf.getvalue())


def _envelope(cfg: RunConfig, body: dict) -> dict:
    conf = asdict(cfg)
    return {"version": __version__, "catalog_hash": _catalog_id(cfg), "config": conf, "report": body}


# -- group ---------------------------------------------------------------------


def cmd_group(cfg: RunConfig) -> int:
    action = cfg.extra["action"]
    if action == "list":
        for name in _entries(cfg):
            print(name)
        return 0
    e = _entry(cfg)
    G = e.group
    c = constants(G, cfg.d)
    body = {
        "name": e.name,
        "order": G.order,
        "l": G.l,
        "r": G.r,
        "description": e.description,
        "element_orders": {str(k): v for k, v in describe_orders(G).items()},
        "num_I": len(involution_locus(G)),
        "classes_in_I": len(classes_in_locus(G)),
        "a": str(c.a),
        "b": str(c.b),
        "i": str(c.i),
        "d": cfg.d,
        "steps": e.spec.to_json(),
    }
    if cfg.extra.get("kluners"):
        from .groups.kluners import kluners_d

        k = kluners_d(G)
        body["kluners_d"] = k.value
        body["kluners_slack"] = k.slack
    _dump(_envelope(cfg, body), cfg.report)
    return 0


# -- count ---------------------------------------------------------------------


def _count_shard(args: tuple) -> dict:
    """Run one shard; module-level so worker processes can pickle it."""
    cfg_dict, index = args
    cfg = RunConfig(**cfg_dict)
    e = _entry(cfg)
    shard = Shard(cfg.shards, index)
    Xs = [cfg.X]
    if cfg.mode == "upper":
        wc = count_upper_windows(e.group, Xs, shard)
        return {"lower": wc.lower[0], "upper": wc.upper[0], "heuristic": None, "discs": None}
    if cfg.mode == "heuristic":
        wc = count_heuristic_windows(e.group, Xs, cfg.d, shard)
        return {"lower": 0, "upper": 0, "heuristic": wc.heuristic[0], "discs": None}
    wc = count_exact_windows(
        e.group, e.spec, Xs, cfg.two_unramified, shard, emit_discs=cfg.emit_discs is not None
    )
    return {"lower": wc.lower[0], "upper": wc.upper[0], "heuristic": None, "discs": wc.discs}


def cmd_count(cfg: RunConfig) -> int:
    _entry(cfg)  # validate the catalog before forking
    indices = [cfg.shard] if cfg.shard is not None else list(range(cfg.shards))
    t = time.perf_counter()
    jobs = [(asdict(cfg), i) for i in indices]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_count_shard, jobs))
    else:
        parts = [_count_shard(j) for j in jobs]
    lower = sum(p["lower"] for p in parts)
    upper = sum(p["upper"] for p in parts)
    heur = sum(p["heuristic"] for p in parts) if cfg.mode == "heuristic" else None
    body = {
        "mode": cfg.mode,
        "X": cfg.X,
        "lower": lower,
        "upper": upper,
        "heuristic": heur,
        "unknown_tuples": upper - lower,
        "shards": [cfg.shards, cfg.shard if cfg.shard is not None else "all"],
        "group": cfg.group,
        "two_unramified": cfg.two_unramified,
        "notes": [HEURISTIC_NOTE] if cfg.mode == "heuristic" else [],
    }
    log.info("count finished in %.2fs", time.perf_counter() - t)
    if cfg.emit_discs is not None:
        rows = sorted(r for p in parts for r in (p["discs"] or []))
        _write_csv(cfg.emit_discs, ["disc", "verdict", "tuple"], rows)
    _dump(_envelope(cfg, body), cfg.report)
    return 0


# -- oracle --------------------------------------------------------------------


def cmd_oracle(cfg: RunConfig) -> int:
    e = _entry(cfg)
    if not e.group.is_abelian:
        raise ValueError(f"{cfg.group} is not abelian")
    A = AbelianGroup(invariant_factors(e.group))
    res = oracle_count(A, cfg.X, cfg.two_unramified)
    body = {
        "group": cfg.group,
        "invariants": list(A.ns),
        "X": cfg.X,
        "epis": res.count,
        "fields": res.count // A.automorphism_count(),
        "two_unramified": cfg.two_unramified,
    }
    if cfg.emit_discs is not None:
        rows = sorted((ep.disc, "epi", f"conductor={ep.conductor}") for ep in res.epis)
        _write_csv(cfg.emit_discs, ["disc", "verdict", "tuple"], rows)
    _dump(_envelope(cfg, body), cfg.report)
    return 0


# -- analytic ------------------------------------------------------------------


def _condition(ns: argparse.Namespace) -> PrimeCondition:
    if ns.modulus == 1:
        return PrimeCondition(excluded=frozenset(ns.exclude))
    return PrimeCondition.residue(ns.modulus, *ns.residues, excluded=ns.exclude)


def cmd_analytic(cfg: RunConfig, ns: argparse.Namespace) -> int:
    kind = ns.kind
    header = ["x", "value", "prediction", "ratio"]
    rows = []
    if kind == "az":
        cond = _condition(ns)
        z = complex(ns.z)
        xs = dyadic_xs(ns.x, cond, z)
        fit = sd_shape_check(z, cond, xs)
        for x in xs:
            v = abs(a_z_sum(x, z, cond))
            pred = fit.constant * x * math.log(x) ** fit.log_power
            rows.append((x, f"{v:.12g}", f"{pred:.12g}", f"{v / pred:.12g}"))
    elif kind == "shape":
        cond = _condition(ns)
        z = complex(ns.z)
        fit = sd_shape_check(z, cond, dyadic_xs(ns.x, cond, z))
        rows.append((ns.x, f"{fit.log_power:.12g}", f"{expected_log_power(z, cond):.12g}",
                     f"{fit.log_power - expected_log_power(z, cond):.12g}"))
        header = ["x", "log_power", "expected", "difference"]
    elif kind == "conv":
        f = SQUAREFREE
        g = UNIT if ns.unit else SQUAREFREE
        r = convolution_check(f, g, ns.x)
        rows.append((ns.x, f"{r.direct:.12g}", f"{r.predicted:.12g}", f"{r.direct / r.predicted:.12g}"))
    elif kind == "filter":
        a = ns.a if ns.a else [0] * ns.k
        r = filter_identity_check(ns.l, ns.k, a, ns.n, ns.d)
        rows.append((ns.n, f"{r.lhs:.15g}", f"{r.rhs.real:.15g}", f"{r.error:.3g}"))
        header = ["n", "lhs", "rhs", "abs_error"]
    _write_csv(ns.out, header, rows)
    return 0


# -- selftest ------------------------------------------------------------------


def cmd_selftest(cfg: RunConfig) -> int:
    from .arith.symbols import hilbert, hilbert_bruteforce, relevant_places
    from .counting import epi_discriminants

    results = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as exc:  # report, don't abort the run
            log.debug("selftest %s raised %r", name, exc)
            ok = False
        results.append((name, ok))
        print(f"{'PASS' if ok else 'FAIL'} {name}")

    check("catalog loads", lambda: len(_entries(cfg)) > 0)

    def oracle_match():
        for name in ("C2", "V4", "C4"):
            e = catalog.get(name)
            A = AbelianGroup(invariant_factors(e.group))
            if oracle_count(A, 10**4, True).discs != epi_discriminants(e.group, e.spec, 10**4, True):
                return False
        return True

    check("oracle equivalence at 10^4", oracle_match)
    check(
        "hilbert formula vs brute force",
        lambda: all(
            hilbert(a, b, v) == hilbert_bruteforce(a, b, v)
            for a in range(-12, 13) for b in range(-12, 13) if a and b
            for v in relevant_places(a, b)
        ),
    )
    check("filter identity", lambda: filter_identity_check(2, 2, [1, 0], 3).error < 1e-10)
    return 0 if all(ok for _, ok in results) else 1


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def common(parser: argparse.ArgumentParser, suppress: bool) -> None:
        # accepted both before and after the subcommand
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        parser.add_argument("--catalog", dest="catalog_path", help="alternative catalog JSON file",
                            **(kw or {"default": None}))
        parser.add_argument("--cache-dir", help="sieve cache directory (defaults to $MALLE_CACHE_DIR)",
                            **(kw or {"default": None}))
        parser.add_argument("--seed", type=int, **(kw or {"default": 0}))
        parser.add_argument("--report", help="write the JSON report here instead of stdout",
                            **(kw or {"default": None}))
        parser.add_argument("-v", "--verbose", action="store_true", **(kw or {"default": False}))

    p = argparse.ArgumentParser(prog="nilmalle", description=__doc__)
    common(p, suppress=False)
    shared = argparse.ArgumentParser(add_help=False)
    common(shared, suppress=True)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", parents=[shared], help="group census and Malle constants")
    g.add_argument("action", choices=["info", "list"])
    g.add_argument("name", nargs="?")
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--kluners", action="store_true", help="also run the refinement search")

    c = sub.add_parser("count", parents=[shared], help="count tuples under a discriminant bound")
    c.add_argument("--group", required=True)
    c.add_argument("--mode", choices=["upper", "exact", "heuristic"], required=True)
    c.add_argument("--X", type=int, required=True)
    c.add_argument("--d", type=int, default=1)
    c.add_argument("--two-unramified", action="store_true")
    c.add_argument("--shards", type=int, default=1)
    c.add_argument("--shard", type=int)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--emit-discs", metavar="CSV")

    o = sub.add_parser("oracle", parents=[shared], help="abelian epimorphisms via Dirichlet characters")
    o.add_argument("--group", required=True)
    o.add_argument("--X", type=int, required=True)
    o.add_argument("--two-unramified", action="store_true")
    o.add_argument("--emit-discs", metavar="CSV")

    a = sub.add_parser("analytic", parents=[shared], help="numerical mean-value checks")
    a.add_argument("kind", choices=["az", "shape", "conv", "filter"])
    a.add_argument("--x", type=int, default=10**6)
    a.add_argument("--z", type=complex, default=1)
    a.add_argument("--modulus", type=int, default=1)
    a.add_argument("--residues", type=int, nargs="*", default=[])
    a.add_argument("--exclude", type=int, nargs="*", default=[])
    a.add_argument("--unit", action="store_true", help="conv: pair with the convolution identity")
    a.add_argument("--l", type=int, default=2)
    a.add_argument("--k", type=int, default=2)
    a.add_argument("--n", type=int, default=3)
    a.add_argument("--a", type=int, nargs="*")
    a.add_argument("--d", type=int, default=1)
    a.add_argument("--out", help="CSV path (stdout by default)")

    sub.add_parser("selftest", parents=[shared], help="quick internal consistency checks")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command,
        catalog_path=ns.catalog_path,
        report=ns.report,
        cache_dir=ns.cache_dir,
        seed=ns.seed,
    )
    if ns.command == "group":
        cfg.group = ns.name
        cfg.d = ns.d
        cfg.extra = {"action": ns.action, "kluners": ns.kluners}
        if ns.action == "info" and not ns.name:
            raise ValueError("group info needs a name")
    elif ns.command in ("count", "oracle"):
        cfg.group = ns.group
        cfg.X = ns.X
        cfg.two_unramified = ns.two_unramified
        cfg.emit_discs = ns.emit_discs
        if ns.command == "count":
            cfg.mode = ns.mode
            cfg.d = ns.d
            cfg.shards = ns.shards
            cfg.shard = ns.shard
            cfg.workers = ns.workers
    cfg.validate()
    return cfg


def _error_json(exc: Exception) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, CocycleViolation):
        out["step"] = exc.step
        out["triple"] = list(exc.triple)
    elif hasattr(exc, "step"):
        out["step"] = exc.step
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(ns)
        if cfg.cache_dir:
            os.environ["MALLE_CACHE_DIR"] = cfg.cache_dir
        if cfg.command == "group":
            return cmd_group(cfg)
        if cfg.command == "count":
            return cmd_count(cfg)
        if cfg.command == "oracle":
            return cmd_oracle(cfg)
        if cfg.command == "analytic":
            return cmd_analytic(cfg, ns)
        return cmd_selftest(cfg)
    except (GroupError, SpecMismatch, NotPrim, CapExceeded, InsufficientData, KeyError, ValueError) as exc:
        sys.stdout.write(json.dumps(_error_json(exc), sort_keys=True) + "\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
