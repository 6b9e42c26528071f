"""Cluster-level estimators, the sign-flip randomization test, and
network-HAC / IID t-tests.

Moment functions are restricted to per-node values whose cluster-level
estimator is the within-cluster mean (which covers both the sample mean
and the inverse-probability-weighted spillover estimator, whose summands
are per-node values). The Wald machinery is written for vector-valued
moments even though the shipped designs are scalar.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.stats import norm

from .errors import CapacityError, DomainError, InputError, NumericError
from .graph import Graph, Partition, average_degree, bfs_distances

logger = logging.getLogger(__name__)

__all__ = [
    "MomentSample",
    "ClusterEstimates",
    "TestResult",
    "cluster_means",
    "wald_statistic",
    "randomization_test",
    "hac_variance",
    "default_bandwidth",
    "hac_ttest",
    "iid_ttest",
]

RANDOMIZATION_MAX_CLUSTERS = 20


@dataclass
class MomentSample:
    """Per-node moment values, shape (n, d); finite entries required."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] == 0:
            raise InputError("moment sample must be a nonempty (n, d) array")
        if not np.all(np.isfinite(v)):
            raise InputError("moment sample contains non-finite entries")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def scalar(self) -> np.ndarray:
        if self.dim != 1:
            raise InputError(f"scalar moment required, got dimension {self.dim}")
        return self.values[:, 0]


@dataclass
class ClusterEstimates:
    """Per-cluster estimates theta_l (L, d) with cluster sizes and sqrt(n) scale."""

    per_cluster: np.ndarray
    sizes: np.ndarray
    scale: float

    def __post_init__(self):
        self.per_cluster = np.atleast_2d(np.asarray(self.per_cluster, dtype=np.float64))
        self.sizes = np.asarray(self.sizes, dtype=np.int64)
        if np.any(self.sizes < 1):
            raise InputError("cluster sizes must be >= 1")
        if not np.all(np.isfinite(self.per_cluster)):
            raise InputError("cluster estimates must be finite")

    @property
    def L(self) -> int:
        return self.per_cluster.shape[0]

    @property
    def dim(self) -> int:
        return self.per_cluster.shape[1]


@dataclass
class TestResult:
    statistic: float
    critical_value: float
    reject: bool
    alpha: float
    method: str
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "schema": "netclust-testresult-v1",
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "method": self.method,
            "details": self.details,
        }

    def export_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def cluster_means(
    values: MomentSample,
    p: Partition,
    retained: np.ndarray | None = None,
    valid: np.ndarray | None = None,
) -> ClusterEstimates:
    """Within-cluster means of the moment values, skipping discarded clusters.

    ``retained`` is a boolean mask over cluster labels (default: all).
    ``valid`` is a boolean mask over nodes excluding observations from
    estimation (e.g. isolated nodes for the spillover estimator); a
    retained cluster with no valid observations is a domain error.
    """
    vals = np.asarray(values.values, dtype=np.float64)
    if len(vals) != len(p.labels):
        raise InputError("moment sample length does not match partition")
    keep = np.ones(p.L, dtype=bool) if retained is None else np.asarray(retained, dtype=bool)
    use = np.ones(len(vals), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)
    labels = np.flatnonzero(keep)
    if len(labels) == 0:
        raise DomainError("no retained clusters")
    means, sizes = [], []
    for l in labels:
        ok = (p.labels == l) & use
        if not ok.any():
            raise DomainError(f"retained cluster {l} has no usable observations")
        means.append(vals[ok].mean(axis=0))
        sizes.append(int(ok.sum()))
    return ClusterEstimates(
        per_cluster=np.array(means), sizes=np.array(sizes), scale=math.sqrt(values.n)
    )


def _deviations(est: ClusterEstimates, theta_null) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta_null, dtype=np.float64))
    if theta.shape != (est.dim,):
        raise InputError(f"null value must have dimension {est.dim}")
    return est.scale * (est.per_cluster - theta[None, :])


def _wald_from_deviations(devs: np.ndarray, signs: np.ndarray) -> float:
    L = devs.shape[0]
    flipped = signs[:, None] * devs
    u = flipped.sum(axis=0) / math.sqrt(L)
    M = devs.T @ devs / L  # sign-invariant middle matrix
    try:
        sol = np.linalg.solve(M, u)
    except np.linalg.LinAlgError:
        raise NumericError("singular middle matrix in Wald statistic") from None
    return float(u @ sol)


def wald_statistic(est: ClusterEstimates, theta_null, signs) -> float:
    """Sign-flipped Wald statistic of the cluster deviations."""
    signs = np.asarray(signs, dtype=np.float64)
    if signs.shape != (est.L,) or not np.all(np.abs(signs) == 1.0):
        raise InputError("signs must be a vector in {-1,+1}^L")
    if est.L < 2:
        raise InputError("need at least 2 clusters")
    return _wald_from_deviations(_deviations(est, theta_null), signs)


def randomization_test(est: ClusterEstimates, theta_null, alpha: float) -> TestResult:
    """Exact sign-flip randomization test over all 2^L sign vectors.

    Rejects iff the observed statistic strictly exceeds the k-th largest
    flipped statistic, k = ceil(2^L (1 - alpha)).
    """
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    L = est.L
    if L < 2:
        raise InputError("randomization test needs at least 2 clusters")
    if L > RANDOMIZATION_MAX_CLUSTERS:
        raise CapacityError(
            f"2^{L} sign vectors exceed the enumeration cap "
            f"(L <= {RANDOMIZATION_MAX_CLUSTERS}); merge or drop clusters"
        )
    devs = _deviations(est, theta_null)
    n_flips = 1 << L
    # all sign vectors as a (2^L, L) matrix of +-1
    bits = (np.arange(n_flips)[:, None] >> np.arange(L)[None, :]) & 1
    P = 1.0 - 2.0 * bits
    d = devs.shape[1]
    M = devs.T @ devs / L
    U = P @ devs  # (2^L, d) sums of flipped deviations
    try:
        sol = np.linalg.solve(M, U.T)
    except np.linalg.LinAlgError:
        # singular middle matrix: statistic ranks as +inf everywhere
        logger.warning("singular middle matrix in randomization test")
        stats = np.full(n_flips, np.inf)
        T_obs = np.inf
    else:
        stats = np.einsum("ij,ji->i", U, sol) / L
        T_obs = float(stats[0])  # identity sign vector
    # critical value: k-th order statistic of the flipped statistics,
    # k = ceil(2^L (1 - alpha)); with L=2 this is the maximum, so the
    # test never rejects there
    k = math.ceil(n_flips * (1.0 - alpha))
    T_crit = float(np.sort(stats)[k - 1])
    reject = bool(T_obs > T_crit)
    return TestResult(
        statistic=T_obs,
        critical_value=T_crit,
        reject=reject,
        alpha=alpha,
        method="rand",
        details={"L": L, "k": k, "num_sign_vectors": n_flips},
    )


def default_bandwidth(g: Graph) -> int:
    """Stand-in bandwidth rule: floor(log n / log(average degree)), at least 1."""
    n = max(g.n, 2)
    return max(1, int(math.log(n) / math.log(max(2.0, average_degree(g)))))


def _reach_kernel(g: Graph, bandwidth: int) -> sp.csr_matrix:
    """Boolean kernel 1{path distance <= bandwidth} as a sparse matrix."""
    n = g.n
    eye = sp.identity(n, format="csr", dtype=bool)
    if bandwidth == 0 or g.num_edges == 0:
        return eye
    A = g.to_sparse().astype(bool)
    step = (A + eye).tocsr()
    reach = step
    for _ in range(bandwidth - 1):
        nxt = (reach @ step).tocsr()
        nxt.data[:] = True
        if nxt.nnz == reach.nnz:
            break
        reach = nxt
    return reach


def _hac_variance_impl(
    values: MomentSample, g: Graph, bandwidth: int
) -> tuple[np.ndarray, bool]:
    if bandwidth < 0:
        raise InputError("bandwidth must be >= 0")
    vals = values.values
    if len(vals) != g.n:
        raise InputError("moment sample length does not match graph size")
    centered = vals - vals.mean(axis=0)
    K = _reach_kernel(g, bandwidth)
    V = centered.T @ (K @ centered) / values.n
    V = (V + V.T) / 2.0
    w, Q = np.linalg.eigh(V)
    if w.min() < 0:
        V = (Q * np.maximum(w, 0.0)) @ Q.T
        return V, True
    return V, False


def hac_variance(values: MomentSample, g: Graph, bandwidth: int) -> np.ndarray:
    """Uniform-kernel network HAC variance over path distance.

    (1/n) sum_{i,j} 1{dist(i,j) <= bandwidth} (g_i - gbar)(g_j - gbar)'.
    Negative eigenvalues are clipped at zero (logged when it happens).
    """
    V, repaired = _hac_variance_impl(values, g, bandwidth)
    if repaired:
        logger.warning("HAC variance repaired to positive semidefinite")
    return V


def hac_variance_bruteforce(values: MomentSample, g: Graph, bandwidth: int) -> np.ndarray:
    """Direct double-loop oracle over BFS distances (small graphs only)."""
    vals = values.values
    centered = vals - vals.mean(axis=0)
    V = np.zeros((vals.shape[1], vals.shape[1]))
    for i in range(g.n):
        dist = bfs_distances(g, i)
        for j in range(g.n):
            dij = 0 if i == j else (dist[j] if dist[j] >= 0 else math.inf)
            if dij <= bandwidth:
                V += np.outer(centered[i], centered[j])
    return V / values.n


def hac_ttest(
    values: MomentSample,
    g: Graph,
    theta_null: float,
    alpha: float,
    bandwidth: int | None = None,
) -> TestResult:
    """Two-sided t-test of a scalar mean with a network HAC variance."""
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    x = values.scalar()
    bw = default_bandwidth(g) if bandwidth is None else bandwidth
    V, repaired = _hac_variance_impl(values, g, bw)
    sigma2 = float(V[0, 0])
    if sigma2 <= 0:
        raise NumericError("HAC variance nonpositive after repair")
    t = math.sqrt(values.n) * (float(x.mean()) - theta_null) / math.sqrt(sigma2)
    z = float(norm.ppf(1.0 - alpha / 2.0))
    return TestResult(
        statistic=t,
        critical_value=z,
        reject=bool(abs(t) > z),
        alpha=alpha,
        method="hac",
        details={"bandwidth": bw, "psd_repaired": repaired, "variance": sigma2},
    )


def iid_ttest(values: MomentSample, theta_null: float, alpha: float) -> TestResult:
    """Two-sided t-test of a scalar mean with iid standard errors."""
    if not 0 < alpha < 1:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    x = values.scalar()
    if values.n < 2:
        raise InputError("need at least 2 observations")
    sigma2 = float(x.var(ddof=1))
    if sigma2 <= 0:
        raise NumericError("zero sample variance")
    t = math.sqrt(values.n) * (float(x.mean()) - theta_null) / math.sqrt(sigma2)
    z = float(norm.ppf(1.0 - alpha / 2.0))
    return TestResult(
        statistic=t,
        critical_value=z,
        reject=bool(abs(t) > z),
        alpha=alpha,
        method="iid",
        details={"variance": sigma2},
    )
