"""Graph representation and combinatorial quantities.

Nodes are dense integer ids ``0..n-1``. Graphs are undirected, weighted
(weight 1.0 for binary graphs), with no self-links. Adjacency is stored
in a CSR-style neighbor-list layout, so all per-node queries are O(deg).
External files may use arbitrary nonnegative integer ids; ingestion
relabels them densely and keeps the original ids for round-tripping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, InputError

__all__ = [
    "Graph",
    "Partition",
    "ComponentLabeling",
    "read_edge_list",
    "write_edge_list",
    "degree",
    "average_degree",
    "path_distance",
    "bfs_distances",
    "neighborhood",
    "neighborhood_moment",
    "connected_components",
    "volume",
    "edge_boundary",
    "conductance",
    "max_conductance",
    "induced_subgraph",
]


class Graph:
    """Undirected weighted graph on nodes ``0..n-1``.

    Construction validates symmetry inputs, rejects self-links and
    duplicate edges, and requires strictly positive weights. Instances
    are read-only after construction and safe to share across threads.
    """

    __slots__ = ("n", "indptr", "indices", "edge_weights", "degrees")

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray | None = None):
        """Build from per-edge endpoint arrays (each undirected edge once)."""
        if n < 0:
            raise InputError(f"node count must be nonnegative, got {n}")
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise InputError("edge endpoint arrays must have equal length")
        if w is None:
            w = np.ones(len(u))
        else:
            w = np.asarray(w, dtype=np.float64)
            if w.shape != u.shape:
                raise InputError("weight array length must match edge count")
        if len(u):
            if u.min(initial=0) < 0 or v.min(initial=0) < 0 or max(u.max(), v.max()) >= n:
                raise InputError("edge endpoint out of range 0..n-1")
            if np.any(u == v):
                raise InputError("self-links are not allowed")
            if np.any(w <= 0):
                raise InputError("edge weights must be strictly positive")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            key = lo * n + hi
            if len(np.unique(key)) != len(key):
                raise InputError("duplicate edges in input")
        self.n = int(n)
        # store both orientations for O(deg) neighbor access
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order = np.argsort(src, kind="stable")
        src, dst, ww = src[order], dst[order], ww[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, src + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = dst
        self.edge_weights = ww
        self.degrees = np.zeros(n)
        np.add.at(self.degrees, src, ww)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple]) -> "Graph":
        """Build from an iterable of ``(u, v)`` or ``(u, v, w)`` tuples."""
        us, vs, ws = [], [], []
        for e in edges:
            if len(e) == 2:
                a, b = e
                c = 1.0
            else:
                a, b, c = e
            us.append(a)
            vs.append(b)
            ws.append(c)
        return cls(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(ws))

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def incident_weights(self, i: int) -> np.ndarray:
        return self.edge_weights[self.indptr[i]:self.indptr[i + 1]]

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def to_sparse(self) -> sp.csr_matrix:
        """Adjacency as a scipy CSR matrix."""
        return sp.csr_matrix(
            (self.edge_weights, self.indices, self.indptr), shape=(self.n, self.n)
        )

    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once, as (u, v, w) with u < v."""
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = src < self.indices
        return src[mask], self.indices[mask], self.edge_weights[mask]

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.num_edges})"


@dataclass
class Partition:
    """Assignment of every node to exactly one cluster label ``0..L-1``."""

    labels: np.ndarray
    L: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.L < 1:
            raise InputError(f"cluster count must be >= 1, got {self.L}")
        if len(self.labels) == 0:
            raise InputError("partition of an empty node set")
        if self.labels.min() < 0 or self.labels.max() >= self.L:
            raise InputError("cluster label out of range 0..L-1")
        if len(np.unique(self.labels)) != self.L:
            raise InputError("every cluster label must be used at least once")

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.L)

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


@dataclass
class ComponentLabeling:
    """Connected-component labels, sizes, and the id of a largest component."""

    labels: np.ndarray
    sizes: np.ndarray
    giant: int = field(init=False)

    def __post_init__(self):
        # ties broken by smallest id: argmax returns the first maximum
        self.giant = int(np.argmax(self.sizes)) if len(self.sizes) else 0

    @property
    def count(self) -> int:
        return len(self.sizes)


# ---------------------------------------------------------------------------
# operations


def _check_node(g: Graph, i: int) -> None:
    if not 0 <= i < g.n:
        raise InputError(f"node id {i} out of range 0..{g.n - 1}")


def degree(g: Graph, i: int) -> float:
    """Sum of weights of edges incident to node ``i``."""
    _check_node(g, i)
    return float(g.degrees[i])


def average_degree(g: Graph) -> float:
    """Mean degree (1/n) sum_i deg(i)."""
    if g.n == 0:
        raise InputError("average degree undefined for empty graph")
    return float(g.degrees.sum() / g.n)


def bfs_distances(g: Graph, source: int, cutoff: int | None = None) -> np.ndarray:
    """Hop distances from ``source``; -1 marks unreachable nodes.

    Weights are ignored: distance is the shortest-path hop count.
    """
    _check_node(g, source)
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = [source]
    d = 0
    while frontier and (cutoff is None or d < cutoff):
        d += 1
        nxt = []
        for i in frontier:
            for j in g.neighbors(i):
                if dist[j] < 0:
                    dist[j] = d
                    nxt.append(int(j))
        frontier = nxt
    return dist


def path_distance(g: Graph, i: int, j: int) -> float:
    """Shortest-path hop count; 0 if i == j, ``math.inf`` if disconnected."""
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        return 0.0
    dist = bfs_distances(g, i)
    return float(dist[j]) if dist[j] >= 0 else math.inf


def neighborhood(g: Graph, i: int, s: int) -> set[int]:
    """All nodes within hop distance ``s`` of ``i`` (always contains ``i``)."""
    if s < 0:
        raise InputError(f"neighborhood radius must be >= 0, got {s}")
    dist = bfs_distances(g, i, cutoff=s)
    return set(np.flatnonzero(dist >= 0).tolist())


def neighborhood_moment(g: Graph, s: int, k: float) -> float:
    """kth moment of the s-neighborhood size, (1/n) sum_i |N(i,s)|^k."""
    if g.n == 0:
        raise InputError("neighborhood moment undefined for empty graph")
    if s < 0 or k <= 0:
        raise InputError("require s >= 0 and k > 0")
    total = 0.0
    for i in range(g.n):
        total += float(np.count_nonzero(bfs_distances(g, i, cutoff=s) >= 0)) ** k
    return total / g.n


def connected_components(g: Graph) -> ComponentLabeling:
    """BFS labeling of connected components."""
    labels = np.full(g.n, -1, dtype=np.int64)
    sizes = []
    comp = 0
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        labels[start] = comp
        frontier = [start]
        size = 1
        while frontier:
            nxt = []
            for i in frontier:
                for j in g.neighbors(i):
                    if labels[j] < 0:
                        labels[j] = comp
                        size += 1
                        nxt.append(int(j))
            frontier = nxt
        sizes.append(size)
        comp += 1
    return ComponentLabeling(labels=labels, sizes=np.array(sizes, dtype=np.int64))


def _member_mask(g: Graph, S) -> np.ndarray:
    idx = np.asarray(sorted(S) if isinstance(S, (set, frozenset)) else S, dtype=np.int64)
    mask = np.zeros(g.n, dtype=bool)
    if len(idx):
        if idx.min() < 0 or idx.max() >= g.n:
            raise InputError("node set contains id out of range")
        mask[idx] = True
    return mask


def volume(g: Graph, S) -> float:
    """Sum of degrees over the node set ``S``."""
    return float(g.degrees[_member_mask(g, S)].sum())


def edge_boundary(g: Graph, S) -> float:
    """Total weight of edges crossing from ``S`` to its complement."""
    mask = _member_mask(g, S)
    src = np.repeat(mask, np.diff(g.indptr))
    crossing = src & ~mask[g.indices]
    return float(g.edge_weights[crossing].sum())


def conductance(g: Graph, S) -> float:
    """Edge boundary of ``S`` divided by its volume; in [0, 1]."""
    mask = _member_mask(g, S)
    vol = float(g.degrees[mask].sum())
    if vol <= 0:
        raise DomainError("conductance undefined for link-free set")
    src = np.repeat(mask, np.diff(g.indptr))
    bnd = float(g.edge_weights[src & ~mask[g.indices]].sum())
    return bnd / vol


def max_conductance(g: Graph, p: Partition) -> float:
    """Maximum cluster conductance over a partition."""
    return max(conductance(g, p.members(l)) for l in range(p.L))


def induced_subgraph(g: Graph, nodes) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes``; returns it with the original ids of its nodes."""
    keep = np.asarray(sorted(nodes) if isinstance(nodes, (set, frozenset)) else nodes,
                      dtype=np.int64)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[keep] = np.arange(len(keep))
    u, v, w = g.edge_array()
    mask = (pos[u] >= 0) & (pos[v] >= 0)
    return Graph(len(keep), pos[u[mask]], pos[v[mask]], w[mask]), keep


# ---------------------------------------------------------------------------
# edge-list text format


def read_edge_list(path) -> tuple[Graph, np.ndarray]:
    """Parse the edge-list text format.

    One edge per line, ``u v`` or ``u v w``, whitespace-separated; '#'
    comments and blank lines ignored; ids are nonnegative integers; each
    undirected edge appears once in either orientation. Returns the graph
    on densely relabeled ids plus the sorted original ids (position k in
    the array is the original id of node k).
    """
    us, vs, ws = [], [], []
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"cannot read edge list: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise InputError(f"{path}:{lineno}: expected 'u v' or 'u v w', got {raw.strip()!r}")
            try:
                a, b = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise InputError(f"{path}:{lineno}: malformed edge line {raw.strip()!r}") from None
            if a < 0 or b < 0:
                raise InputError(f"{path}:{lineno}: node ids must be nonnegative")
            us.append(a)
            vs.append(b)
            ws.append(w)
    ids = np.unique(np.array(us + vs, dtype=np.int64)) if us else np.array([], dtype=np.int64)
    pos = {int(orig): k for k, orig in enumerate(ids)}
    u = np.array([pos[a] for a in us], dtype=np.int64)
    v = np.array([pos[b] for b in vs], dtype=np.int64)
    try:
        g = Graph(len(ids), u, v, np.array(ws))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    return g, ids


def write_edge_list(g: Graph, path, node_ids: Sequence[int] | None = None) -> None:
    """Write the edge-list text format (each undirected edge once)."""
    ids = np.arange(g.n) if node_ids is None else np.asarray(node_ids)
    u, v, w = g.edge_array()
    binary = bool(np.all(w == 1.0))
    with open(path, "w") as fh:
        fh.write("# netclust edge-list v1\n")
        for a, b, c in zip(u, v, w):
            if binary:
                fh.write(f"{ids[a]} {ids[b]}\n")
            else:
                fh.write(f"{ids[a]} {ids[b]} {float(c)!r}\n")
