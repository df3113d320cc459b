"""Benchmark suites comparing the cluster-LP pipeline with the Pivot baseline.

Results are deterministic JSON lines; wall times go to a separate sidecar
file so that reruns with the same seeds produce byte-identical results.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import io
from .graph import SignedGraph, disagreements, generate
from .mwu import preset, solve_cluster_lp
from .oracles import MAX_ORACLE_N, brute_force_opt, pivot_baseline
from .rounding import cluster_rounding_clocks, pivot_rounding, round_mixed

ALGOS = ("pivot", "cluster-lp")


@dataclass
class Suite:
    instances: list[dict]
    seeds: list[int] = field(default_factory=lambda: [0])
    algos: list[str] = field(default_factory=lambda: list(ALGOS))
    solver: dict = field(default_factory=dict)
    preset: str = "desk"
    scheme: str = "mixed"
    mix_assign: str = "pivot"
    solve_seed: int = 0

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "Suite":
        known = {"instances", "seeds", "algos", "solver", "preset", "scheme", "mix_assign", "solve_seed"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown suite keys: {sorted(extra)}")
        if not isinstance(d.get("instances"), list) or not d["instances"]:
            raise ValueError("suite needs a nonempty 'instances' list")
        s = cls(**d)
        bad = [a for a in s.algos if a not in ALGOS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}")
        for inst in s.instances:
            if "path" in inst:
                inst.setdefault("name", inst["path"])
                if base is not None and not os.path.isabs(inst["path"]):
                    inst["path"] = str(base / inst["path"])
        return s

    @classmethod
    def load(cls, path: str | Path) -> "Suite":
        p = Path(path)
        return cls.from_dict(json.loads(p.read_text()), p.parent)


def _load_instance(spec: dict) -> SignedGraph:
    if "path" in spec:
        return io.read_graph(spec["path"])
    params = dict(spec.get("params", {}))
    return generate(spec["kind"], int(spec.get("seed", 0)), **params)


def worker_count() -> int:
    raw = os.environ.get("CC_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, cap)


def _round(scheme: str, sol, g, seed: int, mix_assign: str):
    if scheme == "cluster":
        return cluster_rounding_clocks(sol, seed)
    if scheme == "pivot":
        return pivot_rounding(sol, g, seed)
    return round_mixed(sol, g, seed, assign=mix_assign)


def _run_instance(suite: Suite, spec: dict) -> tuple[list[dict], list[dict]]:
    name = spec.get("name") or spec.get("path") or spec.get("kind")
    try:
        g = _load_instance(spec)
    except io.FormatError as e:
        # the message omits the resolved path so output does not depend on the cwd
        return [{"instance": name, "status": "missing", "reason": e.message, "line": e.line}], []
    except (OSError, KeyError, ValueError) as e:
        return [{"instance": name, "status": "missing", "reason": str(e)}], []
    opt = brute_force_opt(g)[1] if g.n <= MAX_ORACLE_N else None
    rows: list[dict] = []
    times: list[dict] = []
    pivot_costs = []
    for s in suite.seeds:
        t0 = time.perf_counter()
        cost = disagreements(g, pivot_baseline(g, s))
        pivot_costs.append(cost)
        if "pivot" in suite.algos:
            rows.append({"instance": name, "algo": "pivot", "seed": s, "cost": cost})
            times.append({"instance": name, "algo": "pivot", "seed": s,
                          "wall_s": time.perf_counter() - t0})
    if "cluster-lp" in suite.algos:
        params = preset(suite.preset, **suite.solver)
        g.counter.reset()
        t0 = time.perf_counter()
        res = solve_cluster_lp(g, params, seed=suite.solve_seed)
        solve_s = time.perf_counter() - t0
        queries = g.counter.snapshot()
        for s in suite.seeds:
            t1 = time.perf_counter()
            c = _round(suite.scheme, res.solution, g, s, suite.mix_assign)
            rows.append({"instance": name, "algo": "cluster-lp", "seed": s,
                         "cost": disagreements(g, c), "lp_cost": str(res.cost),
                         "queries": queries})
            times.append({"instance": name, "algo": "cluster-lp", "seed": s,
                          "solve_s": solve_s, "round_s": time.perf_counter() - t1})
    pivot_mean = float(np.mean(pivot_costs))
    for r in rows:
        r["n"] = g.n
        r["opt"] = opt if opt is not None else "n/a"
        if opt is None:
            r["ratio_to_opt"] = "n/a"
        elif opt == 0:
            r["ratio_to_opt"] = 1.0 if r["cost"] == 0 else "inf"
        else:
            r["ratio_to_opt"] = r["cost"] / opt
        r["ratio_to_pivot_mean"] = (r["cost"] / pivot_mean) if pivot_mean else ("n/a" if r["cost"] else 1.0)
        r["status"] = "ok"
    return rows, times


def run_suite(suite: Suite, workers: int | None = None) -> tuple[list[dict], list[dict]]:
    """All result rows in suite order, plus their timing rows."""
    workers = min(workers or worker_count(), len(suite.instances))
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        parts = list(pool.map(lambda spec: _run_instance(suite, spec), suite.instances))
    rows = [r for p in parts for r in p[0]]
    times = [t for p in parts for t in p[1]]
    return rows, times


def dumps_rows(rows: list[dict[str, Any]]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def timings_path(out: str | Path) -> Path:
    p = Path(out)
    return p.with_name(p.name + ".timings.jsonl")


def write_results(rows, times, out: str | Path) -> None:
    Path(out).write_text(dumps_rows(rows))
    timings_path(out).write_text(dumps_rows(times))
