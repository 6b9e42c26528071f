"""Cluster-count selection, the component-aware clustering pipeline, and
quality reports with warning codes.

The pipeline clusters the giant component spectrally, treats every other
component as its own cluster, and flags clusters below a size floor as
discarded: they keep their labels but are excluded from inference and
from the quality statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError
from .graph import Graph, Partition, connected_components, induced_subgraph
from .spectral import SpectrumReport, spectral_cluster, spectrum

__all__ = [
    "ClusterStats",
    "ClusterDiagnostics",
    "choose_num_clusters",
    "cluster_pipeline",
    "quality_report",
    "write_partition_csv",
    "HIGH_CONDUCTANCE",
    "TOO_FEW_CLUSTERS",
    "UNBALANCED",
]

HIGH_CONDUCTANCE = "HIGH_CONDUCTANCE"
TOO_FEW_CLUSTERS = "TOO_FEW_CLUSTERS"
UNBALANCED = "UNBALANCED"

DEFAULT_MIN_SIZE = 20
DEFAULT_EIGENVALUE_THRESHOLD = 0.05
CONDUCTANCE_WARN_LEVEL = 0.1
MIN_RETAINED_CLUSTERS = 5
UNBALANCED_FRACTION = 0.9


@dataclass
class ClusterStats:
    id: int
    size: int
    volume: float
    boundary: float
    conductance: float
    discarded: bool


@dataclass
class ClusterDiagnostics:
    """Per-cluster statistics plus partition-level summaries and warnings."""

    per_cluster: list[ClusterStats]
    max_conductance: float
    L_effective: int
    lambda_L: float | None = None
    spectral_gap: float | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def retained(self) -> list[ClusterStats]:
        return [c for c in self.per_cluster if not c.discarded]

    def to_json_dict(self) -> dict:
        return {
            "schema": "netclust-diagnostics-v1",
            "clusters": [
                {
                    "id": c.id,
                    "size": c.size,
                    "volume": c.volume,
                    "boundary": c.boundary,
                    "conductance": c.conductance,
                    "discarded": c.discarded,
                }
                for c in self.per_cluster
            ],
            "max_conductance": self.max_conductance,
            "L_effective": self.L_effective,
            "lambda_L": self.lambda_L,
            "spectral_gap": self.spectral_gap,
            "warnings": list(self.warnings),
        }

    def export_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def choose_num_clusters(
    report: SpectrumReport,
    threshold: float = DEFAULT_EIGENVALUE_THRESHOLD,
    max_L: int | None = None,
) -> int:
    """Largest L (capped at ``max_L``) with the Lth eigenvalue below ``threshold``.

    Always at least 1.
    """
    if not 0 < threshold < 2:
        raise InputError(f"threshold must lie in (0, 2), got {threshold}")
    vals = report.eigenvalues
    cap = len(vals) if max_L is None else min(max_L, len(vals))
    below = np.flatnonzero(vals[:cap] < threshold)
    return int(below[-1]) + 1 if len(below) else 1


def _cluster_stats(g: Graph, p: Partition, discarded: np.ndarray) -> list[ClusterStats]:
    mask_by_label = [p.labels == l for l in range(p.L)]
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    out = []
    for l in range(p.L):
        mask = mask_by_label[l]
        vol = float(g.degrees[mask].sum())
        crossing = mask[src] & ~mask[g.indices]
        bnd = float(g.edge_weights[crossing].sum())
        # a zero-volume cluster is a set of isolated nodes: boundary 0
        phi = bnd / vol if vol > 0 else 0.0
        out.append(
            ClusterStats(
                id=l,
                size=int(mask.sum()),
                volume=vol,
                boundary=bnd,
                conductance=phi,
                discarded=bool(discarded[l]),
            )
        )
    return out


def _warnings_for(retained: list[ClusterStats], max_phi: float) -> list[str]:
    warnings = []
    if max_phi > CONDUCTANCE_WARN_LEVEL:
        warnings.append(HIGH_CONDUCTANCE)
    if len(retained) < MIN_RETAINED_CLUSTERS:
        warnings.append(TOO_FEW_CLUSTERS)
    total = sum(c.size for c in retained)
    if retained and max(c.size for c in retained) > UNBALANCED_FRACTION * total:
        warnings.append(UNBALANCED)
    return warnings


def quality_report(g: Graph, p: Partition) -> ClusterDiagnostics:
    """Per-cluster conductance statistics and warning codes for a partition."""
    stats = _cluster_stats(g, p, discarded=np.zeros(p.L, dtype=bool))
    max_phi = max(c.conductance for c in stats)
    return ClusterDiagnostics(
        per_cluster=stats,
        max_conductance=max_phi,
        L_effective=p.L,
        warnings=_warnings_for(stats, max_phi),
    )


def cluster_pipeline(
    g: Graph,
    L_giant: int | None = None,
    min_size: int = DEFAULT_MIN_SIZE,
    seed: int = 0,
    threshold: float = DEFAULT_EIGENVALUE_THRESHOLD,
    max_L: int | None = None,
) -> tuple[Partition, ClusterDiagnostics]:
    """Cluster the giant component spectrally; other components stand alone.

    ``L_giant=None`` selects the cluster count from the giant's spectrum
    (largest L with eigenvalue below ``threshold``). Clusters smaller than
    ``min_size`` are marked discarded. Labels are ordered by decreasing
    cluster size (ties by smallest member id).
    """
    if g.n == 0:
        raise InputError("cannot cluster an empty graph")
    comps = connected_components(g)
    giant_nodes = np.flatnonzero(comps.labels == comps.giant)
    if len(giant_nodes) < min_size:
        raise DomainError(
            f"giant component has {len(giant_nodes)} nodes, below min_size={min_size}"
        )
    sub, _ = induced_subgraph(g, giant_nodes)
    if L_giant is None:
        report = spectrum(sub)
        L_eff = choose_num_clusters(report, threshold=threshold, max_L=max_L)
    else:
        if L_giant < 1:
            raise InputError(f"L_giant must be >= 1, got {L_giant}")
        L_eff = min(L_giant, sub.n)
        report = spectrum(sub, k=min(sub.n, L_eff + 1))
    giant_part = spectral_cluster(sub, L_eff, seed, report=report)

    labels = np.full(g.n, -1, dtype=np.int64)
    labels[giant_nodes] = giant_part.labels
    next_label = L_eff
    for c in range(comps.count):
        if c == comps.giant:
            continue
        labels[comps.labels == c] = next_label
        next_label += 1
    # global canonical order: decreasing size, ties by smallest member id
    sizes = np.bincount(labels, minlength=next_label)
    first = np.zeros(next_label, dtype=np.int64)
    for l in range(next_label):
        first[l] = np.flatnonzero(labels == l)[0]
    order = sorted(range(next_label), key=lambda l: (-sizes[l], first[l]))
    remap = np.empty(next_label, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    part = Partition(labels=remap[labels], L=next_label)

    discarded = part.sizes < min_size
    stats = _cluster_stats(g, part, discarded)
    retained = [c for c in stats if not c.discarded]
    max_phi = max((c.conductance for c in retained), default=0.0)
    lam = report.eigenvalues
    lambda_L = float(lam[L_eff - 1]) if L_eff <= len(lam) else None
    gap = float(lam[L_eff] - lam[L_eff - 1]) if L_eff < len(lam) else None
    diag = ClusterDiagnostics(
        per_cluster=stats,
        max_conductance=max_phi,
        L_effective=L_eff,
        lambda_L=lambda_L,
        spectral_gap=gap,
        warnings=_warnings_for(retained, max_phi),
    )
    return part, diag


def write_partition_csv(
    p: Partition,
    path,
    diagnostics: ClusterDiagnostics | None = None,
    node_ids=None,
) -> None:
    """Partition CSV: ``node,cluster,discarded`` (one row per node)."""
    ids = np.arange(len(p.labels)) if node_ids is None else np.asarray(node_ids)
    disc = np.zeros(p.L, dtype=bool)
    if diagnostics is not None:
        for c in diagnostics.per_cluster:
            disc[c.id] = c.discarded
    with open(path, "w") as fh:
        fh.write("# netclust partition v1\n")
        fh.write("node,cluster,discarded\n")
        for i, lab in enumerate(p.labels):
            fh.write(f"{ids[i]},{lab},{int(disc[lab])}\n")
