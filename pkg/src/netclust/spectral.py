"""Normalized Laplacian, spectral embedding, k-means, and spectral clustering.

Also houses a brute-force minimum-max-conductance oracle for small graphs,
used to validate the spectral machinery against exact enumeration.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, DomainError, InputError, NumericError
from .graph import Graph, Partition, connected_components

__all__ = [
    "SpectrumReport",
    "Embedding",
    "normalized_laplacian",
    "spectrum",
    "spectral_embedding",
    "kmeans",
    "spectral_cluster",
    "brute_force_cheeger",
]

DENSE_THRESHOLD = 2000
ZERO_EIGENVALUE_TOL = 1e-8

# shift-invert is much faster than a dense solve when only a few smallest
# eigenpairs are requested on a mid-sized sparse graph
_ITERATIVE_MIN_N = 600
_SHIFT = -0.05


@dataclass
class SpectrumReport:
    """Ascending Laplacian eigenvalues with matching orthonormal eigenvectors.

    ``eigenvectors[:, k]`` corresponds to ``eigenvalues[k]``. May hold only
    the smallest ``k`` pairs when a partial decomposition was requested.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n: int

    def zero_multiplicity(self, tol: float = ZERO_EIGENVALUE_TOL) -> int:
        return int(np.count_nonzero(self.eigenvalues < tol))

    def gaps(self) -> np.ndarray:
        return np.diff(self.eigenvalues)

    def export_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("# netclust spectrum v1\n")
            fh.write("index,eigenvalue\n")
            for i, lam in enumerate(self.eigenvalues, start=1):
                fh.write(f"{i},{float(lam)!r}\n")


@dataclass
class Embedding:
    """Row-normalized spectral positions, one point in R^L per node.

    Rows whose pre-normalization entries are all (numerically) zero are
    mapped to the zero vector and flagged in ``zero_rows``.
    """

    positions: np.ndarray
    zero_rows: np.ndarray

    def export_csv(self, path, node_ids=None) -> None:
        n, L = self.positions.shape
        ids = np.arange(n) if node_ids is None else np.asarray(node_ids)
        with open(path, "w") as fh:
            fh.write("# netclust embedding v1\n")
            fh.write("node," + ",".join(f"coord_{l + 1}" for l in range(L)) + "\n")
            for i in range(n):
                row = ",".join(repr(float(x)) for x in self.positions[i])
                fh.write(f"{ids[i]},{row}\n")


def _check_positive_degrees(g: Graph) -> None:
    zero = np.flatnonzero(g.degrees <= 0)
    if len(zero):
        raise DomainError(
            f"normalized Laplacian undefined: node {int(zero[0])} has zero degree"
        )


def normalized_laplacian(g: Graph) -> np.ndarray:
    """Dense I - D^{-1/2} A D^{-1/2}; requires all degrees positive."""
    _check_positive_degrees(g)
    return _laplacian_sparse(g).toarray()


def _laplacian_sparse(g: Graph) -> sp.csr_matrix:
    d = 1.0 / np.sqrt(g.degrees)
    A = g.to_sparse()
    L = sp.identity(g.n, format="csr") - sp.diags(d) @ A @ sp.diags(d)
    return L.tocsr()


def spectrum(g: Graph, k: int | None = None) -> SpectrumReport:
    """Eigendecomposition of the normalized Laplacian, eigenvalues ascending.

    Full dense decomposition for graphs up to ``DENSE_THRESHOLD`` nodes
    (partial dense when only ``k`` pairs are wanted on a small graph);
    smallest-k pairs via ARPACK shift-invert for larger graphs or when a
    few pairs are requested on a mid-sized one.
    """
    _check_positive_degrees(g)
    n = g.n
    if k is not None and not 1 <= k <= n:
        raise InputError(f"requested eigenpair count k={k} outside 1..{n}")
    use_iterative = (n > DENSE_THRESHOLD) or (
        k is not None and n >= _ITERATIVE_MIN_N and k <= max(1, n // 10)
    )
    if use_iterative:
        kk = k if k is not None else min(n - 2, 64)
        kk = min(kk, n - 2)
        if kk < 1:
            use_iterative = False
        else:
            L = _laplacian_sparse(g).tocsc()
            v0 = np.full(n, 1.0 / np.sqrt(n))
            try:
                vals, vecs = spla.eigsh(L, k=kk, sigma=_SHIFT, which="LM", v0=v0)
            except spla.ArpackNoConvergence as exc:
                raise NumericError(
                    f"eigensolver failed to converge after {exc.args} "
                    f"({len(exc.eigenvalues)} of {kk} pairs found)"
                ) from exc
            order = np.argsort(vals, kind="stable")
            return SpectrumReport(eigenvalues=vals[order], eigenvectors=vecs[:, order], n=n)
    if n > DENSE_THRESHOLD:
        raise CapacityError(f"graph with n={n} too large for dense decomposition")
    dense = normalized_laplacian(g)
    vals, vecs = np.linalg.eigh(dense)
    if k is not None:
        vals, vecs = vals[:k], vecs[:, :k]
    return SpectrumReport(eigenvalues=vals, eigenvectors=vecs, n=n)


def spectral_embedding(report: SpectrumReport, L: int) -> Embedding:
    """Embed nodes in R^L via the first L eigenvectors, rows normalized to unit length."""
    if not 1 <= L <= report.eigenvectors.shape[1]:
        raise InputError(f"embedding dimension L={L} outside available eigenvectors")
    rows = report.eigenvectors[:, :L].copy()
    norms = np.linalg.norm(rows, axis=1)
    zero = norms < 1e-12
    safe = np.where(zero, 1.0, norms)
    return Embedding(positions=rows / safe[:, None], zero_rows=zero)


# ---------------------------------------------------------------------------
# k-means

KMEANS_RESTARTS = 10
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: sample several d^2-weighted candidates per center
    and keep the one minimizing the potential, which avoids seeding centers
    on isolated outlier points."""
    n = len(points)
    n_trials = 2 + int(np.log(k)) if k > 1 else 1
    centers = np.empty((k, points.shape[1]))
    idx = int(rng.integers(n))
    centers[0] = points[idx]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            cand = rng.integers(n, size=n_trials)
        else:
            cand = rng.choice(n, size=n_trials, p=d2 / total)
        best: tuple[float, int, np.ndarray] | None = None
        for idx in cand:
            trial_d2 = np.minimum(d2, np.sum((points - points[idx]) ** 2, axis=1))
            pot = float(trial_d2.sum())
            if best is None or pot < best[0]:
                best = (pot, int(idx), trial_d2)
        _, idx, d2 = best
        centers[c] = points[idx]
    return centers


def _assign(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    labels = np.argmin(d2, axis=1)
    return labels, np.maximum(d2[np.arange(len(points)), labels], 0.0)


def _lloyd(
    points: np.ndarray,
    centers: np.ndarray,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_TOL,
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """Lloyd iterations; returns (labels, centers, wcss, wcss history)."""
    k = len(centers)
    history: list[float] = []
    labels, d2 = _assign(points, centers)
    wcss = float(d2.sum())
    for _ in range(max_iter):
        history.append(wcss)
        counts = np.bincount(labels, minlength=k)
        # empty-cluster repair: seed from the farthest point
        for c in np.flatnonzero(counts == 0):
            far = int(np.argmax(d2))
            labels[far] = c
            d2[far] = 0.0
            counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, points)
        centers = sums / np.bincount(labels, minlength=k)[:, None]
        labels, d2 = _assign(points, centers)
        new_wcss = float(d2.sum())
        if wcss - new_wcss <= tol * max(wcss, 1e-300):
            wcss = new_wcss
            break
        wcss = new_wcss
    history.append(wcss)
    return labels, centers, wcss, history


def _canonical_relabel(labels: np.ndarray, k: int) -> np.ndarray:
    """Relabel clusters by decreasing size, ties broken by smallest member id."""
    sizes = np.bincount(labels, minlength=k)
    first = np.full(k, len(labels))
    for c in range(k):
        members = np.flatnonzero(labels == c)
        if len(members):
            first[c] = members[0]
    order = sorted(range(k), key=lambda c: (-sizes[c], first[c]))
    remap = np.empty(k, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    return remap[labels]


def _kmeans_labels(
    points: np.ndarray,
    k: int,
    seed: int,
    n_restarts: int = KMEANS_RESTARTS,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Best-of-restarts k-means; order-invariant via internal canonical sort."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if k < 1:
        raise InputError(f"cluster count must be >= 1, got {k}")
    if k > n:
        raise InputError(f"cannot form {k} clusters from {n} points")
    if k > len(np.unique(points, axis=0)):
        raise InputError(f"degenerate input: fewer than {k} distinct points")
    # canonical internal ordering makes the result invariant to input order
    order = np.lexsort(points.T[::-1])
    canon = points[order]
    best: tuple[float, np.ndarray, np.ndarray] | None = None
    for child in np.random.SeedSequence(seed).spawn(n_restarts):
        rng = np.random.default_rng(child)
        centers = _kmeanspp_init(canon, k, rng)
        labels, centers, wcss, _ = _lloyd(canon, centers)
        if best is None or wcss < best[0] - 1e-12:
            best = (wcss, labels, centers)
    assert best is not None
    wcss, canon_labels, centers = best
    labels = np.empty(n, dtype=np.int64)
    labels[order] = canon_labels
    return _canonical_relabel(labels, k), centers, wcss


def kmeans(points: np.ndarray, k: int, seed: int) -> Partition:
    """Lloyd's algorithm with k-means++ init and seeded restarts.

    Deterministic given ``seed``; clusters labeled by decreasing size.
    """
    labels, _, _ = _kmeans_labels(points, k, seed)
    return Partition(labels=labels, L=k)


def spectral_cluster(
    g: Graph, L: int, seed: int, report: SpectrumReport | None = None
) -> Partition:
    """Spectral clustering of a connected graph into L clusters.

    Spectrum -> row-normalized embedding -> k-means; labels are relabeled
    by decreasing cluster size. Embedding rows that are numerically zero
    are held out of k-means and assigned to the nearest centroid. A
    precomputed ``report`` (holding at least L eigenpairs) may be passed
    to avoid a second decomposition.
    """
    if L < 1:
        raise InputError(f"cluster count must be >= 1, got {L}")
    comps = connected_components(g)
    if comps.count != 1:
        raise DomainError(
            f"spectral_cluster requires a connected graph (found {comps.count} components); "
            "pass the giant component"
        )
    if L == 1:
        return Partition(labels=np.zeros(g.n, dtype=np.int64), L=1)
    if report is None:
        report = spectrum(g, k=min(g.n, L))
    emb = spectral_embedding(report, L)
    if emb.zero_rows.any():
        live = np.flatnonzero(~emb.zero_rows)
        labels_live, centers, _ = _kmeans_labels(emb.positions[live], L, seed)
        labels = np.empty(g.n, dtype=np.int64)
        labels[live] = labels_live
        dead = np.flatnonzero(emb.zero_rows)
        near, _ = _assign(emb.positions[dead], centers)
        labels[dead] = near
        labels = _canonical_relabel(labels, L)
    else:
        labels, _, _ = _kmeans_labels(emb.positions, L, seed)
    return Partition(labels=labels, L=L)


# ---------------------------------------------------------------------------
# exact small-graph oracle

BRUTE_FORCE_MAX_N = 14


@functools.lru_cache(maxsize=32)
def _partitions_into_k_blocks(n: int, k: int) -> np.ndarray:
    """All set partitions of n items into exactly k blocks, as label rows.

    Restricted growth strings: labels[0] = 0 and each subsequent label is
    at most one more than the running maximum.
    """
    out: list[list[int]] = []
    labels = [0] * n

    def rec(i: int, used: int) -> None:
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                out.append(labels.copy())
            return
        for lab in range(min(used + 1, k)):
            labels[i] = lab
            rec(i + 1, max(used, lab + 1))

    rec(1, 1)
    return np.array(out, dtype=np.int8)


def brute_force_cheeger(g: Graph, k: int) -> tuple[float, Partition]:
    """Exact minimum over k-partitions of the maximal cluster conductance.

    Exhaustive enumeration; capped at ``BRUTE_FORCE_MAX_N`` nodes. Blocks
    with zero volume are excluded (conductance undefined there).
    """
    if g.n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"brute force cheeger capped at n={BRUTE_FORCE_MAX_N}, got {g.n}")
    if not 2 <= k <= g.n:
        raise InputError(f"partition size k={k} outside 2..{g.n}")
    u, v, w = g.edge_array()
    degs = g.degrees
    all_parts = _partitions_into_k_blocks(g.n, k)
    best_phi = np.inf
    best_labels: np.ndarray | None = None
    chunk = 100_000
    for start in range(0, len(all_parts), chunk):
        labs = all_parts[start:start + chunk]
        phi_max = np.zeros(len(labs))
        valid = np.ones(len(labs), dtype=bool)
        lu = labs[:, u] if len(u) else np.zeros((len(labs), 0), dtype=np.int8)
        lv = labs[:, v] if len(v) else np.zeros((len(labs), 0), dtype=np.int8)
        for lab in range(k):
            mask = labs == lab
            vol = mask @ degs
            bnd = ((lu == lab) != (lv == lab)) @ w if len(u) else np.zeros(len(labs))
            ok = vol > 0
            valid &= ok
            phi = np.divide(bnd, vol, out=np.full(len(labs), np.inf), where=ok)
            np.maximum(phi_max, phi, out=phi_max)
        phi_max[~valid] = np.inf
        i = int(np.argmin(phi_max))
        if phi_max[i] < best_phi:
            best_phi = float(phi_max[i])
            best_labels = labs[i].astype(np.int64)
    if best_labels is None or not np.isfinite(best_phi):
        raise DomainError("no k-partition with all blocks of positive volume exists")
    return best_phi, Partition(labels=_canonical_relabel(best_labels, k), L=k)
