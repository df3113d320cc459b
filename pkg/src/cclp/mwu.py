"""Multiplicative-weights solver for the covering LP and the full cluster-LP pipeline."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cover import (CrossDegrees, FractionalClusterSolution, compute_d_cross,
                    convert_cover_to_cluster, solution_cost)
from .family import FamilyParams, VertexDistribution, family_to_point, find_family, r_grid
from .graph import SignedGraph
from .precluster import PreclusteredInstance, build_preclustering
from .ratio_cluster import RatioClusterParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverParams:
    """Knobs of the pipeline; see :func:`preset` for the named bundles."""

    epsilon: float = 0.3
    gamma: Fraction = Fraction(1, 10)
    t_mw: int = 32
    step: float | None = None
    eta: int = 4
    eta0: int = 8
    samples: int = 64
    guess_budget: int = 16
    exhaustive_limit: int | None = None
    family_mode: str = "fast"
    fill: bool = True
    prepass_factor: int = 0
    c1: float = 4.0
    c2: float = 4.0
    beta: float | None = None
    sublinear: bool = False
    paper_constants: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", Fraction(self.gamma).limit_denominator(10 ** 9))
        if not 0 < self.gamma < Fraction(1, 2):
            raise ValueError("gamma must lie in (0, 1/2)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.t_mw < 1:
            raise ValueError("t_mw must be positive")

    @property
    def mw_step(self) -> float:
        """Weight exponent per unit of slack.

        Defaults to ``ln(1/gamma) / (gamma t_mw)``, which equals ``gamma^3``
        when ``t_mw`` takes its formula value ``ln(1/gamma) / gamma^4``.
        """
        if self.step is not None:
            return self.step
        g = float(self.gamma)
        return math.log(1 / g) / (g * self.t_mw)

    @property
    def c(self) -> int:
        return math.ceil(1 / self.gamma)

    @property
    def denominator(self) -> int:
        return self.c * self.t_mw

    @property
    def beta_value(self) -> float:
        return 0.05 * float(self.gamma) ** 2 if self.beta is None else self.beta

    def family_params(self) -> FamilyParams:
        k = 32 if self.paper_constants else 1
        search = RatioClusterParams(gamma=self.gamma, eps=self.epsilon, eta=self.eta,
                                    eta0=self.eta0, samples=self.samples * k,
                                    guess_budget=self.guess_budget,
                                    exhaustive_limit=self.exhaustive_limit)
        return FamilyParams(search=search, fill=self.fill, prepass_factor=self.prepass_factor)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gamma"] = str(self.gamma)
        return d


PRESETS = ("desk", "paper")


def preset(name: str = "desk", **overrides) -> SolverParams:
    """``desk``: gamma 0.1, eps 0.3, 32 rounds. ``paper``: rounds, step and
    sample sizes from the formulas, feasible only for tiny toy inputs."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if name == "desk":
        return SolverParams(**overrides)
    if name == "paper":
        gamma = Fraction(overrides.pop("gamma", Fraction(1, 3))).limit_denominator(10 ** 9)
        eps = float(overrides.pop("epsilon", 0.3))
        g = float(gamma)
        t_mw = math.ceil(math.log(1 / g) / g ** 4)
        eta = overrides.pop("eta", max(2, math.ceil(g ** -2 * eps ** -8)))
        base = dict(epsilon=eps, gamma=gamma, t_mw=t_mw, step=g ** 3, eta=eta,
                    eta0=eta ** 3, samples=max(eta ** 3, math.ceil(eta ** 4 * g ** -2 * eps ** -8)),
                    paper_constants=True, fill=False, prepass_factor=6)
        base.update(overrides)
        return SolverParams(**base)
    raise ValueError(f"unknown preset {name!r}")


@dataclass
class CoverRun:
    z: dict[tuple[int, ...], Fraction]
    diagnostics: dict = field(default_factory=dict)


def solve_cover_lp(g: SignedGraph, inst: PreclusteredInstance, cd: CrossDegrees,
                   params: SolverParams, seed: int = 0, R=None,
                   active: Sequence[bool] | None = None) -> CoverRun | None:
    """Average ``t_mw`` family points under multiplicative reweighting.

    Returns ``None`` when some round cannot reach a ``gamma`` share of mass,
    meaning ``R`` is too small.
    """
    n = g.n
    act = np.ones(n, dtype=bool) if active is None else np.asarray(active, dtype=bool)
    if not act.any():
        return CoverRun({}, {"rounds": 0})
    if any(cd[v] <= 0 for v in np.flatnonzero(act).tolist()):
        raise ValueError("active vertices need positive cross degree")
    gamma = params.gamma
    if R is None:
        raise ValueError("a ratio guess R is required")
    rng = np.random.default_rng(seed)
    fparams = params.family_params()
    logw = np.full(n, -np.inf)
    idx = np.flatnonzero(act)
    logw[idx] = np.log(np.array([float(cd[v]) for v in idx.tolist()]))
    step = params.mw_step
    total: dict[tuple[int, ...], Fraction] = {}
    margins_ok = True
    for t in range(params.t_mw):
        w = np.exp(logw - logw[idx].max())
        dist = VertexDistribution.from_weights(w)
        fam = find_family(g, inst, cd, dist, R, params.family_mode, fparams, rng, act)
        if fam.exhausted:
            return None
        point = family_to_point(fam, gamma)
        cov = np.zeros(n)
        inner = Fraction(-1)
        for S, val in point.items():
            cov[list(S)] += float(val)
            inner += val * dist.mass(S)
            total[S] = total.get(S, Fraction(0)) + val
        margins_ok &= inner >= 0
        m = cov - 1.0
        logw[idx] -= step * m[idx]
    zhat = {S: v / params.t_mw for S, v in total.items()}
    cover_sum = [Fraction(0)] * n
    for S, val in zhat.items():
        for v in S:
            cover_sum[v] += val
    threshold = 1 - 2 * gamma
    uncovered = [v for v in idx.tolist() if cover_sum[v] <= threshold]
    for v in uncovered:
        zhat[inst.K(v)] = Fraction(1)
    scale = 1 / threshold
    zstar = {S: val * scale for S, val in zhat.items()}
    d_all = sum((cd[v] for v in idx.tolist()), Fraction(0))
    d_unc = sum((cd[v] for v in uncovered), Fraction(0))
    diag = {
        "rounds": params.t_mw,
        "margins_nonnegative": bool(margins_ok),
        "uncovered_vertices": len(uncovered),
        "uncovered_mass_share": float(d_unc / d_all) if d_all else 0.0,
    }
    return CoverRun(zstar, diag)


@dataclass
class ClusterLPResult:
    solution: FractionalClusterSolution
    instance: PreclusteredInstance
    cross: CrossDegrees
    cost: Fraction
    diagnostics: dict


def _merge_fixed(sol: FractionalClusterSolution, fixed: Sequence[tuple[int, ...]]) -> FractionalClusterSolution:
    entries = list(sol.entries) + [(K, sol.denominator) for K in fixed]
    return FractionalClusterSolution(sol.n, sol.denominator, entries)


def solve_cluster_lp(g: SignedGraph, params: SolverParams | None = None, seed: int = 0,
                     inst: PreclusteredInstance | None = None) -> ClusterLPResult:
    """Precluster, solve the covering LP for every ratio guess, convert, and keep
    the exactly cheapest cluster-LP solution."""
    params = params or preset("desk")
    if inst is None:
        inst = build_preclustering(g, params.epsilon, params.c1, params.c2, seed=seed)
    cd = compute_d_cross(g, inst)
    fixed = list(cd.zero_atoms)
    act = np.ones(g.n, dtype=bool)
    for K in fixed:
        act[list(K)] = False
    den = params.denominator
    active_units = [u for u in inst.units() if act[u[0]]]
    # always-feasible fallback: every atom (or lone vertex) on its own
    best = FractionalClusterSolution(g.n, den, [(u, den) for u in active_units])
    best_cost = solution_cost(g, best)
    best_R = None
    per_r = []
    diag: dict = {
        "n": g.n,
        "atoms": len(inst.atoms),
        "fixed_clusters": len(fixed),
        "admissible_pairs": len(inst.adm),
        "denominator": den,
        "t_mw": params.t_mw,
    }
    if act.any():
        d_active = sum((cd[v] for v in np.flatnonzero(act).tolist()), Fraction(0))
        grid = r_grid(int(act.sum()), d_active, params.gamma)
        seeds = np.random.SeedSequence(seed).spawn(len(grid))
        for R, ss in zip(grid, seeds):
            # a guess within (1+gamma) of cover(OPT) lies below this bound,
            # or the incumbent already beats cover(OPT)
            if R > (1 + params.gamma) * (best_cost + d_active):
                per_r.append({"R": float(R), "status": "pruned"})
                continue
            run = solve_cover_lp(g, inst, cd, params, seed=int(ss.generate_state(1)[0]),
                                 R=R, active=act)
            if run is None:
                per_r.append({"R": float(R), "status": "exhausted"})
                continue
            z = dict(run.z)
            z.update((K, Fraction(1)) for K in fixed)
            sol = convert_cover_to_cluster(z, inst, params.t_mw, params.gamma)
            sol = FractionalClusterSolution(g.n, den, [e for e in sol.entries if act[e[0][0]]])
            cost = _selection_cost(g, cd, inst, sol, params, seed)
            per_r.append({"R": float(R), "status": "ok", "cost": float(cost), **run.diagnostics})
            if cost < best_cost:
                best, best_cost, best_R = sol, cost, R
        diag["grid_size"] = len(grid)
    final = _merge_fixed(best, fixed)
    if not final.is_cluster_feasible():
        raise AssertionError(f"infeasible at vertex {final.infeasible_vertex()}")
    exact = solution_cost(g, final)
    diag.update({
        "chosen_R": None if best_R is None else str(best_R),
        "cost": str(exact),
        "cost_float": float(exact),
        "support": len(final.entries),
        "min_support": str(final.min_support()) if final.entries else None,
        "per_R": per_r,
    })
    return ClusterLPResult(final, inst, cd, exact, diag)


def _selection_cost(g, cd, inst, sol, params: SolverParams, seed: int) -> Fraction:
    if not params.sublinear:
        return solution_cost(g, sol)
    from .estimators import estimate_cost

    total = 0.0
    for i, (S, k) in enumerate(sol.entries):
        atom = [v for v in S if inst.in_atom(v)]
        r = atom[0] if atom else S[0]
        est = estimate_cost(g, cd, r, S, params.beta_value, seed=seed + i, inst=inst,
                            epsilon=params.epsilon, paper_constants=params.paper_constants)
        total += k * est
    return Fraction(total / sol.denominator).limit_denominator(10 ** 12)
