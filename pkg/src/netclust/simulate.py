"""Monte Carlo engine for the spectra study and the two size designs.

Replications are deterministic given the master seed: each replication
gets its own spawned RNG stream, per-replication records are stored in
replication order, and aggregation happens once over the full arrays, so
results are bit-identical across worker counts.
"""

from __future__ import annotations

import functools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .diagnostics import cluster_pipeline, choose_num_clusters
from .errors import InputError, NetclustError, NumericError
from .generators import (
    GeneratedGraph,
    gen_configuration,
    gen_er,
    gen_rcm,
    gen_rgg,
    gen_sbm,
)
from .graph import Graph, average_degree, connected_components, induced_subgraph
from .inference import (
    MomentSample,
    cluster_means,
    hac_ttest,
    iid_ttest,
    randomization_test,
)
from .spectral import spectral_cluster, spectrum

__all__ = [
    "SimulationConfig",
    "MCResult",
    "design1_outcomes",
    "design2_lim_outcomes",
    "design2_bg_outcomes",
    "ipw_estimator",
    "ipw_values",
    "run_monte_carlo",
    "generate_graph",
]

MODELS = ("rgg", "rcm", "er", "sbm", "configuration")
DESIGNS = ("spectra", "d1", "d2_lim", "d2_bg")

# structural defaults for the spillover designs (overridable via dgp_params)
D2_DEFAULTS = {
    "alpha": 1.0,
    "beta_lim": 0.5,
    "beta_bg": 1.0,
    "delta": 1.0,
    "gamma": 1.0,
    # low enough that 1/P(no treated neighbor) stays moderate at degree 20
    "p_treat": 0.1,
    "nu_scale": 1.0,
}
PILOT_REPLICATIONS = 500
_PILOT_SEED = 0x5EED_A11E


@dataclass
class SimulationConfig:
    model: str
    n: int
    design: str
    replications: int
    seed: int
    L_giant: int | None = None  # None: 8 for d1/d2, spectrum rule for spectra
    min_size: int = 20
    alpha: float = 0.05
    workers: int = 1
    dgp_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.model not in MODELS:
            raise InputError(f"unknown model {self.model!r}, expected one of {MODELS}")
        if self.design not in DESIGNS:
            raise InputError(f"unknown design {self.design!r}, expected one of {DESIGNS}")
        if self.replications < 1:
            raise InputError("replications must be >= 1")
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie in (0, 1)")

    @classmethod
    def from_json(cls, path) -> "SimulationConfig":
        with open(path) as fh:
            raw = json.load(fh)
        raw.pop("schema", None)
        try:
            return cls(**raw)
        except TypeError as exc:
            raise InputError(f"bad simulation config: {exc}") from None

    def to_json(self, path) -> None:
        payload = {"schema": "netclust-simconfig-v1", **self.__dict__}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class MCResult:
    model: str
    design: str
    n: int
    replications: int
    means: dict
    mc_se: dict
    records: dict  # column -> np.ndarray of per-replication values

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# netclust results v1\n")
            fh.write("method,model,n,design,value,mc_se\n")
            for key in sorted(self.means):
                fh.write(
                    f"{key},{self.model},{self.n},{self.design},"
                    f"{self.means[key]!r},{self.mc_se[key]!r}\n"
                )


# ---------------------------------------------------------------------------
# graph generation dispatch


def default_dgp_params(model: str, n: int, design: str) -> dict:
    """Calibration defaults: mean degree ~5 for the spectra/D1 designs,
    mean degree ~8 for the spillover designs."""
    d2 = design.startswith("d2")
    if model == "rgg":
        return {"target_degree": 8.0 if d2 else 5.0}
    if model == "rcm":
        return {"target_degree": 8.0 if d2 else 5.0, "radius_divisor": 3.0 if d2 else 3.5}
    if model == "er":
        return {"kappa": 5.0}
    if model == "sbm":
        return {"blocks": 10, "p_in": 10.0 / n, "p_out": (40.0 / 9.0) / n}
    if model == "configuration":
        return {"poisson_mean": 8.0, "degree_min": 1, "degree_max": 20}
    raise InputError(f"unknown model {model!r}")


def _configuration_degrees(n: int, params: dict, rng: np.random.Generator) -> np.ndarray:
    lo, hi = int(params["degree_min"]), int(params["degree_max"])
    degs = rng.poisson(params["poisson_mean"], size=n)
    degs = np.clip(degs, lo, hi)
    if degs.sum() % 2:
        i = int(rng.integers(n))
        degs[i] += -1 if degs[i] >= hi else 1
        if degs[i] < lo:
            degs[i] = lo + 1
    return degs


def generate_graph(model: str, n: int, params: dict, seed: int) -> GeneratedGraph:
    if model == "rgg":
        return gen_rgg(n, params["target_degree"], seed)
    if model == "rcm":
        return gen_rcm(
            n, seed,
            target_degree=params["target_degree"],
            radius_divisor=params["radius_divisor"],
        )
    if model == "er":
        return gen_er(n, params["kappa"], seed)
    if model == "sbm":
        return gen_sbm(n, params["blocks"], params["p_in"], params["p_out"], seed)
    if model == "configuration":
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xDE65]))
        degs = _configuration_degrees(n, params, rng)
        return gen_configuration(degs, seed)
    raise InputError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# outcome models


def design1_outcomes(g: Graph, seed) -> MomentSample:
    """Mean-zero outcomes with one-step network dependence.

    W_i = eps_i + average of eps over i's neighbors (0 for isolated i),
    with eps iid standard normal.
    """
    rng = np.random.default_rng(seed)
    eps = rng.normal(size=g.n)
    A = g.to_sparse()
    neighbor_sum = A @ eps
    deg = g.degrees
    w = eps + np.divide(neighbor_sum, deg, out=np.zeros(g.n), where=deg > 0)
    return MomentSample(w)


def _row_normalized(g: Graph) -> sp.csr_matrix:
    deg = g.degrees
    inv = np.divide(1.0, deg, out=np.zeros(g.n), where=deg > 0)
    return sp.diags(inv) @ g.to_sparse()


def _d2_param(params: dict, key: str, binary_game: bool) -> float:
    if key == "beta":
        return float(params.get("beta", D2_DEFAULTS["beta_bg" if binary_game else "beta_lim"]))
    return float(params.get(key, D2_DEFAULTS[key]))


def _d2_errors(gg: GeneratedGraph, params: dict, rng: np.random.Generator) -> np.ndarray:
    nu = rng.normal(size=gg.graph.n) * _d2_param(params, "nu_scale", False)
    homophily = params.get("homophily", gg.positions is not None)
    if homophily and gg.positions is not None:
        return nu + (gg.positions[:, 0] - 0.5)
    return nu


def design2_lim_outcomes(
    gg: GeneratedGraph, params: dict, seed
) -> tuple[np.ndarray, np.ndarray]:
    """Linear-in-means outcomes: solve Y = a + b GY + d GD + c D + eps."""
    g = gg.graph
    rng = np.random.default_rng(seed)
    a = _d2_param(params, "alpha", False)
    b = _d2_param(params, "beta", False)
    d = _d2_param(params, "delta", False)
    c = _d2_param(params, "gamma", False)
    p = _d2_param(params, "p_treat", False)
    if abs(b) >= 1:
        raise InputError(f"linear-in-means requires |beta| < 1, got {b}")
    D = (rng.random(g.n) < p).astype(np.float64)
    eps = _d2_errors(gg, params, rng)
    G = _row_normalized(g)
    rhs = a + d * (G @ D) + c * D + eps
    M = (sp.identity(g.n, format="csc") - b * G.tocsc())
    Y = spla.spsolve(M, rhs)
    resid = np.max(np.abs(Y - (a + b * (G @ Y) + d * (G @ D) + c * D + eps)))
    if not np.isfinite(resid) or resid > 1e-10:
        raise NumericError(f"linear-in-means solve residual {resid:.3e} exceeds 1e-10")
    return Y, D


def design2_bg_outcomes(
    gg: GeneratedGraph, params: dict, seed, max_sweeps: int = 1000
) -> tuple[np.ndarray, np.ndarray]:
    """Binary-game outcomes: least fixed point of Y = 1{V(Y) > 0} from Y = 0."""
    g = gg.graph
    rng = np.random.default_rng(seed)
    a = _d2_param(params, "alpha", True)
    b = _d2_param(params, "beta", True)
    d = _d2_param(params, "delta", True)
    c = _d2_param(params, "gamma", True)
    p = _d2_param(params, "p_treat", True)
    if b < 0:
        raise InputError(f"binary game requires beta >= 0, got {b}")
    D = (rng.random(g.n) < p).astype(np.float64)
    eps = _d2_errors(gg, params, rng)
    G = _row_normalized(g)
    base = a + d * (G @ D) + c * D + eps
    Y = np.zeros(g.n)
    for _ in range(max_sweeps):
        nxt = (base + b * (G @ Y) > 0).astype(np.float64)
        if np.array_equal(nxt, Y):
            return Y, D
        Y = nxt
    raise NumericError(f"binary game did not reach a fixed point in {max_sweeps} sweeps")


def ipw_values(
    outcomes: np.ndarray, treatments: np.ndarray, g: Graph, p_treat: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-node spillover summands and the validity mask (degree > 0).

    The summand is Y_i (T_i / P(T_i=1) - (1-T_i) / P(T_i=0)) where T_i
    indicates a treated neighbor and the exposure propensity is the exact
    1 - (1-p)^degree. Isolated nodes get value 0 and are flagged invalid.
    """
    if not 0 < p_treat < 1:
        raise InputError("treatment probability must lie in (0, 1)")
    deg = g.degrees
    valid = deg > 0
    T = (g.to_sparse() @ treatments) > 0
    p1 = 1.0 - (1.0 - p_treat) ** deg
    p1 = np.where(valid, p1, 0.5)  # placeholder on isolates, masked out below
    w = outcomes * (T / p1 - (~T) / (1.0 - p1))
    w[~valid] = 0.0
    return w, valid


def ipw_estimator(outcomes, treatments, g: Graph, p_treat: float, nodes) -> float:
    """Average of the spillover summands over ``nodes`` (must exclude isolates)."""
    idx = np.asarray(sorted(nodes) if isinstance(nodes, (set, frozenset)) else nodes,
                     dtype=np.int64)
    w, valid = ipw_values(np.asarray(outcomes, float), np.asarray(treatments, float),
                          g, p_treat)
    if not np.all(valid[idx]):
        raise InputError("nodes with degree 0 must be excluded from the IPW estimator")
    return float(w[idx].mean())


# ---------------------------------------------------------------------------
# per-replication kernels


def _seed_int(ss: np.random.SeedSequence, salt: int) -> int:
    return int(np.random.SeedSequence(ss.entropy, spawn_key=ss.spawn_key + (salt,))
               .generate_state(1, dtype=np.uint64)[0] >> 1)


def _rep_spectra(cfg: SimulationConfig, params: dict, ss: np.random.SeedSequence) -> dict:
    gg = generate_graph(cfg.model, cfg.n, params, _seed_int(ss, 1))
    g = gg.graph
    comps = connected_components(g)
    giant_nodes = np.flatnonzero(comps.labels == comps.giant)
    sub, _ = induced_subgraph(g, giant_nodes)
    report = spectrum(sub)
    L = choose_num_clusters(report)
    part = spectral_cluster(sub, L, _seed_int(ss, 2), report=report)
    if L > 1:
        phis = []
        for l in range(L):
            members = part.members(l)
            mask = np.zeros(sub.n, dtype=bool)
            mask[members] = True
            vol = sub.degrees[mask].sum()
            src = np.repeat(mask, np.diff(sub.indptr))
            bnd = sub.edge_weights[src & ~mask[sub.indices]].sum()
            phis.append(bnd / vol if vol > 0 else 0.0)
        max_phi = float(max(phis))
    else:
        max_phi = 0.0
    lam = report.eigenvalues
    gap = float(lam[L] - lam[L - 1]) if L < len(lam) else 0.0
    return {
        "max_conductance": max_phi,
        "n_clusters": float(L),
        "gap": gap,
        "lambda_L": float(lam[L - 1]),
        "median_cluster": float(np.median(part.sizes)),
        "giant": float(sub.n),
        "degree": average_degree(g),
    }


def _cluster_record(diag) -> dict:
    retained = diag.retained
    sizes = sorted((c.size for c in retained), reverse=True)
    return {
        "n_clusters": float(len(retained)),
        "max_conductance": float(diag.max_conductance),
        "cluster_size_1": float(sizes[0]) if sizes else math.nan,
        "cluster_size_2": float(sizes[1]) if len(sizes) > 1 else math.nan,
        "cluster_size_last": float(sizes[-1]) if sizes else math.nan,
    }


def _retained_mask(diag, L: int) -> np.ndarray:
    mask = np.zeros(L, dtype=bool)
    for c in diag.per_cluster:
        mask[c.id] = not c.discarded
    return mask


def _rep_d1(cfg: SimulationConfig, params: dict, ss: np.random.SeedSequence) -> dict:
    gg = generate_graph(cfg.model, cfg.n, params, _seed_int(ss, 1))
    g = gg.graph
    L_giant = cfg.L_giant if cfg.L_giant is not None else 8
    part, diag = cluster_pipeline(g, L_giant=L_giant, min_size=cfg.min_size,
                                  seed=_seed_int(ss, 2))
    values = design1_outcomes(g, _seed_int(ss, 3))
    rec = _cluster_record(diag)
    retained = _retained_mask(diag, part.L)
    if 2 <= int(retained.sum()) <= 20:
        est = cluster_means(values, part, retained)
        rec["rand"] = float(randomization_test(est, 0.0, cfg.alpha).reject)
    else:
        rec["rand"] = math.nan
    # degenerate HAC variance (kernel covering the whole graph) drops the rep
    # for that method only
    try:
        rec["hac"] = float(hac_ttest(values, g, 0.0, cfg.alpha).reject)
    except NumericError:
        rec["hac"] = math.nan
    rec["iid"] = float(iid_ttest(values, 0.0, cfg.alpha).reject)
    return rec


def _d2_theta_hat(cfg: SimulationConfig, params: dict, seed_a: int, seed_b: int) -> float:
    """One draw of the full-sample spillover estimate (no clustering)."""
    gg = generate_graph(cfg.model, cfg.n, params, seed_a)
    binary_game = cfg.design == "d2_bg"
    if binary_game:
        Y, D = design2_bg_outcomes(gg, params, seed_b)
    else:
        Y, D = design2_lim_outcomes(gg, params, seed_b)
    w, valid = ipw_values(Y, D, gg.graph, _d2_param(params, "p_treat", binary_game))
    return float(w[valid].mean())


@functools.lru_cache(maxsize=16)
def _pilot_theta0_cached(model: str, n: int, design: str, params_key: tuple) -> float:
    params = dict(params_key)
    cfg = SimulationConfig(model=model, n=n, design=design, replications=1, seed=0,
                           dgp_params=params)
    ss = np.random.SeedSequence([_PILOT_SEED, MODELS.index(model), DESIGNS.index(design), n])
    children = ss.spawn(PILOT_REPLICATIONS)
    draws = [_d2_theta_hat(cfg, params, _seed_int(c, 1), _seed_int(c, 2))
             for c in children]
    return float(np.mean(draws))


def pilot_theta0(cfg: SimulationConfig, params: dict) -> float:
    """Long-run spillover value for the design, from a seed-fixed pilot run."""
    key = tuple(sorted((k, float(v) if not isinstance(v, (bool, int)) else v)
                       for k, v in params.items()))
    return _pilot_theta0_cached(cfg.model, cfg.n, cfg.design, key)


def _rep_d2(cfg: SimulationConfig, params: dict, ss: np.random.SeedSequence,
            theta0: float) -> dict:
    gg = generate_graph(cfg.model, cfg.n, params, _seed_int(ss, 1))
    g = gg.graph
    binary_game = cfg.design == "d2_bg"
    if binary_game:
        Y, D = design2_bg_outcomes(gg, params, _seed_int(ss, 3))
    else:
        Y, D = design2_lim_outcomes(gg, params, _seed_int(ss, 3))
    w, valid = ipw_values(Y, D, g, _d2_param(params, "p_treat", binary_game))
    L_giant = cfg.L_giant if cfg.L_giant is not None else 8
    part, diag = cluster_pipeline(g, L_giant=L_giant, min_size=cfg.min_size,
                                  seed=_seed_int(ss, 2))
    rec = _cluster_record(diag)
    rec["theta_hat"] = float(w[valid].mean())
    retained = _retained_mask(diag, part.L)
    values = MomentSample(w)
    if 2 <= int(retained.sum()) <= 20:
        est = cluster_means(values, part, retained, valid=valid)
        rec["rand"] = float(randomization_test(est, theta0, cfg.alpha).reject)
    else:
        rec["rand"] = math.nan
    sub, _ = induced_subgraph(g, np.flatnonzero(valid))
    sub_values = MomentSample(w[valid])
    try:
        rec["hac"] = float(hac_ttest(sub_values, sub, theta0, cfg.alpha).reject)
    except NumericError:
        rec["hac"] = math.nan
    rec["iid"] = float(iid_ttest(sub_values, theta0, cfg.alpha).reject)
    return rec


def _run_one(args) -> tuple[int, dict]:
    cfg, params, design, index, ss, theta0 = args
    try:
        if design == "spectra":
            return index, _rep_spectra(cfg, params, ss)
        if design == "d1":
            return index, _rep_d1(cfg, params, ss)
        return index, _rep_d2(cfg, params, ss, theta0)
    except NetclustError as exc:
        raise type(exc)(f"replication {index}: {exc}") from exc


def run_monte_carlo(cfg: SimulationConfig) -> MCResult:
    """Run the configured design; deterministic given seed and config."""
    params = default_dgp_params(cfg.model, cfg.n, cfg.design)
    params.update(cfg.dgp_params)
    theta0 = pilot_theta0(cfg, params) if cfg.design.startswith("d2") else 0.0
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.replications)
    jobs = [(cfg, params, cfg.design, i, seeds[i], theta0)
            for i in range(cfg.replications)]
    workers = cfg.workers
    env = os.environ.get("NETCLUST_THREADS")
    if env:
        workers = int(env)
    records: list[dict | None] = [None] * cfg.replications
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, rec in pool.map(_run_one, jobs, chunksize=8):
                records[index] = rec
    else:
        for job in jobs:
            index, rec = _run_one(job)
            records[index] = rec
    keys = sorted(records[0])  # fixed key order
    cols = {k: np.array([r[k] for r in records]) for k in keys}
    means, ses = {}, {}
    for k, col in cols.items():
        ok = col[np.isfinite(col)]
        means[k] = float(ok.mean()) if len(ok) else math.nan
        ses[k] = float(ok.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else math.nan
    if cfg.design.startswith("d2"):
        means["theta0"], ses["theta0"] = theta0, 0.0
        cols["theta0"] = np.full(cfg.replications, theta0)
    return MCResult(
        model=cfg.model, design=cfg.design, n=cfg.n, replications=cfg.replications,
        means=means, mc_se=ses, records=cols,
    )
