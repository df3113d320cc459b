"""Command-line interface ``cc``."""

from __future__ import annotations

import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import click

from . import io
from .bench import Suite, run_suite, write_results
from .cover import compute_d_cross
from .estimators import estimate_cost, estimate_d_cross
from .graph import disagreements, generate
from .mwu import PRESETS, preset, solve_cluster_lp
from .oracles import brute_force_opt, evaluate, pivot_baseline
from .precluster import build_preclustering, verify_similar
from .rounding import MIX_P, cluster_rounding, cluster_rounding_clocks, pivot_rounding, round_mixed

SOLVER_KEYS = ("epsilon", "gamma", "eta", "t_mw", "family_mode", "sublinear", "beta", "paper_constants")


def _emit(record: dict, metrics: str | None) -> None:
    line = json.dumps(record, sort_keys=True)
    click.echo(line)
    if metrics:
        with open(metrics, "a") as fh:
            fh.write(line + "\n")


def _fail(err: io.FormatError) -> None:
    click.echo(json.dumps(err.to_dict(), sort_keys=True), err=True)
    sys.exit(2)


def _graph(path: str):
    try:
        return io.read_graph(path)
    except io.FormatError as e:
        _fail(e)


def _solver_params(ctx_obj: dict, preset_name: str | None, flags: dict):
    """Flags override the config file, which overrides the preset."""
    cfg = dict(ctx_obj.get("config", {}))
    name = preset_name or cfg.pop("preset", None) or "desk"
    cfg.pop("preset", None)
    merged = {k: v for k, v in cfg.items() if k in SOLVER_KEYS}
    merged.update({k: v for k, v in flags.items() if v is not None})
    if "gamma" in merged:
        merged["gamma"] = Fraction(str(merged["gamma"]))
    return preset(name, **merged)


def solver_options(fn):
    opts = [
        click.option("--epsilon", type=float, default=None, help="Preclustering and search accuracy."),
        click.option("--gamma", type=str, default=None, help="MWU accuracy, e.g. 0.1 or 1/10."),
        click.option("--eta", type=int, default=None, help="Chunk count of the cluster search."),
        click.option("--t-mw", type=int, default=None, help="Number of MWU rounds."),
        click.option("--preset", type=click.Choice(PRESETS), default=None),
        click.option("--paper-constants", is_flag=True, default=None,
                     help="Use the formula sample-size constants."),
        click.option("--sublinear", is_flag=True, default=None,
                     help="Select the ratio guess by estimated cost."),
        click.option("--beta", type=float, default=None, help="Estimator accuracy."),
    ]
    for o in reversed(opts):
        fn = o(fn)
    return fn


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file of default option values.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx: click.Context, config: str | None, verbose: bool) -> None:
    """Cluster-LP correlation clustering toolkit."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    ctx.ensure_object(dict)
    ctx.obj["config"] = json.loads(Path(config).read_text()) if config else {}


@main.command()
@click.argument("kind", type=click.Choice(["planted", "random", "path", "clique-union"]))
@click.option("--n", "n", type=int, default=None)
@click.option("--k", "k", type=int, default=None)
@click.option("--p-intra", type=float, default=1.0)
@click.option("--p-flip", type=float, default=0.0)
@click.option("--p", "p", type=float, default=0.5)
@click.option("--sizes", type=str, default=None, help="Comma-separated clique sizes.")
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def gen(kind, n, k, p_intra, p_flip, p, sizes, seed, out):
    """Generate a graph file."""
    params: dict = {}
    if kind == "planted":
        params = {"n": n, "k": k, "p_intra": p_intra, "p_flip": p_flip}
    elif kind == "random":
        params = {"n": n, "p": p}
    elif kind == "path":
        params = {"n": n}
    else:
        if not sizes:
            raise click.UsageError("--sizes is required for clique-union")
        params = {"sizes": [int(s) for s in sizes.split(",")]}
    if any(v is None for v in params.values()):
        raise click.UsageError(f"{kind} needs {', '.join('--' + key for key in params)}")
    g = generate(kind, seed, **params)
    io.write_graph(g, out)
    _emit({"command": "gen", "kind": kind, "n": g.n, "m": g.m, "seed": seed}, None)


@main.command()
@click.option("--graph", type=click.Path(), required=True)
@click.option("--epsilon", type=float, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def precluster(obj, graph, epsilon, seed, out):
    """Build and check a preclustered instance."""
    g = _graph(graph)
    eps = epsilon if epsilon is not None else obj["config"].get("epsilon", 0.3)
    inst = build_preclustering(g, eps, seed=seed)
    rep = verify_similar(inst, g, eps)
    if out:
        io.write_instance(inst, out)
    _emit({"command": "precluster", "atoms": len(inst.atoms), "admissible_pairs": len(inst.adm),
           "similar": rep.passed, "violations": rep.violations}, None)


@main.command()
@click.option("--graph", type=click.Path(), required=True)
@solver_options
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Solution file.")
@click.option("--metrics", type=click.Path(dir_okay=False), default=None, help="JSONL file to append to.")
@click.pass_obj
def solve(obj, graph, epsilon, gamma, eta, t_mw, preset, paper_constants, sublinear, beta, seed, out, metrics):
    """Solve the cluster LP."""
    g = _graph(graph)
    params = _solver_params(obj, preset, dict(epsilon=epsilon, gamma=gamma, eta=eta, t_mw=t_mw,
                                              paper_constants=paper_constants,
                                              sublinear=sublinear, beta=beta))
    res = solve_cluster_lp(g, params, seed=seed)
    if out:
        io.write_solution(res.solution, out)
    _emit({"command": "solve", "seed": seed, "params": params.to_dict(), **res.diagnostics}, metrics)


def _round_with(scheme, sol, g, seed, mix_assign, p_mix):
    if scheme == "cluster":
        return cluster_rounding_clocks(sol, seed), "cluster"
    if scheme == "cluster-seq":
        return cluster_rounding(sol, seed), "cluster-seq"
    if scheme == "pivot":
        return pivot_rounding(sol, g, seed), "pivot"
    return round_mixed(sol, g, seed, p_mix=p_mix, assign=mix_assign, return_branch=True)


rounding_options = [
    click.option("--scheme", type=click.Choice(["cluster", "cluster-seq", "pivot", "mixed"]), default="mixed"),
    click.option("--mix-assign", type=click.Choice(["pivot", "cluster"]), default="pivot",
                 help="Scheme run with probability --p-mix in the mixture."),
    click.option("--p-mix", type=float, default=MIX_P),
]


def _with(opts):
    def deco(fn):
        for o in reversed(opts):
            fn = o(fn)
        return fn
    return deco


@main.command("round")
@click.option("--graph", type=click.Path(), required=True)
@click.option("--sol", type=click.Path(), required=True)
@_with(rounding_options)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--metrics", type=click.Path(dir_okay=False), default=None)
def round_cmd(graph, sol, scheme, mix_assign, p_mix, seed, out, metrics):
    """Round a solution file to a clustering."""
    g = _graph(graph)
    try:
        z = io.read_solution(sol, g.n)
    except io.FormatError as e:
        _fail(e)
    c, branch = _round_with(scheme, z, g, seed, mix_assign, p_mix)
    if out:
        io.write_clustering(c, out)
    _emit({"command": "round", "scheme": scheme, "branch": branch, "seed": seed,
           **evaluate(g, c)}, metrics)


@main.command()
@click.option("--graph", type=click.Path(), required=True)
@solver_options
@_with(rounding_options)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Clustering file.")
@click.option("--metrics", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def run(obj, graph, epsilon, gamma, eta, t_mw, preset, paper_constants, sublinear, beta,
        scheme, mix_assign, p_mix, seed, out, metrics):
    """Precluster, solve, round and evaluate."""
    g = _graph(graph)
    params = _solver_params(obj, preset, dict(epsilon=epsilon, gamma=gamma, eta=eta, t_mw=t_mw,
                                              paper_constants=paper_constants,
                                              sublinear=sublinear, beta=beta))
    res = solve_cluster_lp(g, params, seed=seed)
    c, branch = _round_with(scheme, res.solution, g, seed, mix_assign, p_mix)
    if out:
        io.write_clustering(c, out)
    ref = brute_force_opt(g)[1] if g.n <= 16 else None
    rec = {"command": "run", "seed": seed, "scheme": scheme, "branch": branch,
           "lp_cost": str(res.cost), **evaluate(g, c, ref)}
    if ref is not None:
        rec["opt"] = ref
    _emit(rec, metrics)


@main.command()
@click.option("--graph", type=click.Path(), required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def oracle(graph, out):
    """Exact optimum by subset DP (n <= 16)."""
    g = _graph(graph)
    try:
        c, cost = brute_force_opt(g)
    except ValueError as e:
        raise click.UsageError(str(e))
    if out:
        io.write_clustering(c, out)
    _emit({"command": "oracle", "cost": cost, "clusters": [list(cl) for cl in c.clusters]}, None)


@main.group()
def baseline():
    """Baseline algorithms."""


@baseline.command("pivot")
@click.option("--graph", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def baseline_pivot(graph, seed, out):
    """Classic Pivot."""
    g = _graph(graph)
    c = pivot_baseline(g, seed)
    if out:
        io.write_clustering(c, out)
    _emit({"command": "baseline", "algo": "pivot", "seed": seed, **evaluate(g, c)}, None)


@main.group()
def estimate():
    """Sampling estimators."""


def _vertex_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


@estimate.command("dcross")
@click.option("--graph", type=click.Path(), required=True)
@click.option("--atom", type=str, default=None, help="Atom vertices; default: every atom of the preclustering.")
@click.option("--epsilon", type=float, default=0.3)
@click.option("--beta", type=float, default=0.1)
@click.option("--seed", type=int, default=0)
@click.option("--paper-constants", is_flag=True)
def estimate_dcross_cmd(graph, atom, epsilon, beta, seed, paper_constants):
    """Estimate the cross degree of atoms."""
    g = _graph(graph)
    atoms = [tuple(_vertex_list(atom))] if atom else list(build_preclustering(g, epsilon).atoms)
    for i, K in enumerate(atoms):
        g.counter.reset()
        est = estimate_d_cross(g, K, beta, seed=seed + i, paper_constants=paper_constants)
        _emit({"command": "estimate", "what": "dcross", "atom": list(K), "value": est.value,
               "kind": est.kind, "samples": est.samples_used, "exact_path": est.exact,
               "capped": est.capped, "queries": g.counter.snapshot()}, None)


@estimate.command("cost")
@click.option("--graph", type=click.Path(), required=True)
@click.option("--root", type=int, required=True)
@click.option("--set", "members", type=str, required=True, help="Cluster vertices.")
@click.option("--epsilon", type=float, default=0.3)
@click.option("--beta", type=float, default=0.1)
@click.option("--seed", type=int, default=0)
@click.option("--paper-constants", is_flag=True)
def estimate_cost_cmd(graph, root, members, epsilon, beta, seed, paper_constants):
    """Estimate the cost of one cluster."""
    g = _graph(graph)
    inst = build_preclustering(g, epsilon)
    cd = compute_d_cross(g, inst)
    T = _vertex_list(members)
    try:
        val = estimate_cost(g, cd, root, T, beta, seed=seed, inst=inst, epsilon=epsilon,
                            paper_constants=paper_constants)
    except ValueError as e:
        raise click.UsageError(str(e))
    _emit({"command": "estimate", "what": "cost", "root": root, "set": sorted(T), "value": val,
           "queries": g.counter.snapshot()}, None)


@main.command()
@click.option("--suite", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--workers", type=int, default=None, help="Defaults to CC_THREADS or the CPU count.")
def bench(suite, out, workers):
    """Run a benchmark suite; results as JSONL plus a timings sidecar."""
    try:
        s = Suite.load(suite)
    except (ValueError, json.JSONDecodeError) as e:
        raise click.UsageError(f"invalid suite: {e}")
    rows, times = run_suite(s, workers)
    write_results(rows, times, out)
    missing = [r["instance"] for r in rows if r.get("status") == "missing"]
    _emit({"command": "bench", "rows": len(rows), "missing": missing}, None)


if __name__ == "__main__":
    main()
