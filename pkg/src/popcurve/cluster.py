"""Agglomerative complete-linkage clustering, medoid labeling, and
k-means/silhouette diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster import hierarchy
from scipy.spatial.distance import squareform
from sklearn.cluster import KMeans

from .curvefit import CurveLabel
from .dtw import DistanceMatrix
from .errors import InsufficientClusters

DEFAULT_CLUSTER_THRESHOLD = 30.0
DEFAULT_PURITY_THRESHOLD = 0.55


@dataclass(frozen=True)
class Dendrogram:
    """Complete-linkage merge tree in scipy linkage format: each row is
    (cluster_a, cluster_b, height, size), new cluster i gets id n_leaves+i."""

    n_leaves: int
    merges: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [
                [int(a), int(b), float(h), int(sz)] for a, b, h, sz in self.merges
            ],
        }


@dataclass(frozen=True)
class FlatClustering:
    assignments: np.ndarray
    threshold: float
    clusters: list[list[int]]

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class LabeledCluster:
    cluster_id: int
    medoid_index: int
    label: CurveLabel
    purity: float
    members: list[int]
    demoted: bool = False


def linkage(d: DistanceMatrix) -> Dendrogram:
    """Standard complete-linkage merge tree: at each step the pair of
    clusters with the smallest maximum cross-pair distance merges."""
    if d.n == 1:
        return Dendrogram(n_leaves=1, merges=np.empty((0, 4)))
    condensed = squareform(d.entries, checks=False)
    merges = hierarchy.linkage(condensed, method="complete")
    return Dendrogram(n_leaves=d.n, merges=merges)


def flatten(t: Dendrogram, threshold: float) -> FlatClustering:
    """Cut the tree at ``threshold``: clusters are the maximal subtrees whose
    merge height is <= threshold. Cluster ids follow leaf order of the first
    member."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if t.n_leaves == 1:
        return FlatClustering(np.zeros(1, dtype=int), threshold, [[0]])
    raw = hierarchy.fcluster(t.merges, t=threshold, criterion="distance")
    remap: dict[int, int] = {}
    assignments = np.empty(t.n_leaves, dtype=int)
    for leaf, cid in enumerate(raw):
        if cid not in remap:
            remap[cid] = len(remap)
        assignments[leaf] = remap[cid]
    clusters: list[list[int]] = [[] for _ in range(len(remap))]
    for leaf, cid in enumerate(assignments):
        clusters[cid].append(leaf)
    return FlatClustering(assignments, threshold, clusters)


def medoid(members, d: DistanceMatrix) -> int:
    """Member minimizing the summed distance to the other members; ties break
    to the lowest leaf index."""
    members = list(members)
    if not members:
        raise ValueError("cluster is empty")
    idx = np.array(members)
    sub = d.entries[np.ix_(idx, idx)]
    sums = sub.sum(axis=1)
    return int(idx[int(np.argmin(sums))])


def label_clusters(
    f: FlatClustering,
    fit_labels,
    d: DistanceMatrix,
    purity_threshold: float = DEFAULT_PURITY_THRESHOLD,
) -> list[LabeledCluster]:
    """Label each cluster with its medoid's fit label, demoting the whole
    cluster to Outlier when the fraction of members sharing that label does
    not exceed ``purity_threshold``."""
    out = []
    for cid, members in enumerate(f.clusters):
        med = medoid(members, d)
        candidate = fit_labels[med]
        purity = float(
            np.mean([fit_labels[m] == candidate for m in members])
        )
        demoted = purity <= purity_threshold
        out.append(
            LabeledCluster(
                cluster_id=cid,
                medoid_index=med,
                label=CurveLabel.OUTLIER if demoted else candidate,
                purity=purity,
                members=list(members),
                demoted=demoted,
            )
        )
    return out


def kmeans(X, k: int, seed: int = 0) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding on raw vectors."""
    X = np.asarray(X, dtype=float)
    km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=300,
                random_state=seed)
    return km.fit_predict(X)


def silhouette(assignments, data, precomputed: bool = False) -> float:
    """Mean silhouette score; ``data`` is either a square distance matrix
    (``precomputed=True`` or a DistanceMatrix) or raw vectors under euclidean
    distance. Singleton samples score 0."""
    assignments = np.asarray(assignments)
    if isinstance(data, DistanceMatrix):
        dist = data.entries
    elif precomputed:
        dist = np.asarray(data, dtype=float)
    else:
        X = np.asarray(data, dtype=float)
        diff = X[:, None, :] - X[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
    labels = np.unique(assignments)
    if labels.size < 2:
        raise InsufficientClusters("silhouette needs at least 2 clusters")
    scores = np.zeros(assignments.size)
    for i in range(assignments.size):
        own = assignments == assignments[i]
        n_own = own.sum()
        if n_own == 1:
            continue
        a = dist[i, own].sum() / (n_own - 1)
        b = np.inf
        for lab in labels:
            if lab == assignments[i]:
                continue
            other = assignments == lab
            b = min(b, dist[i, other].mean())
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())
