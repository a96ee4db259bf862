"""End-to-end two-method experiment: fit-label, split, cluster the training
set, label clusters, classify the test set by nearest medoid, and report
agreement plus the confusion matrix."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict

import numpy as np
from joblib import Parallel, delayed

from .cluster import (
    DEFAULT_CLUSTER_THRESHOLD,
    DEFAULT_PURITY_THRESHOLD,
    Dendrogram,
    LabeledCluster,
    flatten,
    label_clusters,
    linkage,
)
from .curvefit import (
    DEFAULT_DYING_EPSILON,
    DEFAULT_FIT_ERROR_THRESHOLD,
    LABEL_ORDER,
    CurveLabel,
    classify_by_fit,
    detect_constant,
)
from .dtw import distance_matrix
from .errors import EmptyMatrix, TooFewSeries
from .knn import DEFAULT_KNN_THRESHOLD, MedoidEntry, MedoidIndex, classify_knn
from .series import DEFAULT_SIM_LENGTH, NormalizedSeries


@dataclass(frozen=True)
class ExperimentConfig:
    sim_length: int = DEFAULT_SIM_LENGTH
    split_ratio: float = 0.70
    cluster_threshold: float = DEFAULT_CLUSTER_THRESHOLD
    purity_threshold: float = DEFAULT_PURITY_THRESHOLD
    knn_threshold: float = DEFAULT_KNN_THRESHOLD
    fit_error_threshold: float = DEFAULT_FIT_ERROR_THRESHOLD
    dying_epsilon: float = DEFAULT_DYING_EPSILON
    rng_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must be in (0, 1)")
        for name in ("sim_length", "cluster_threshold", "purity_threshold",
                     "knn_threshold", "fit_error_threshold", "dying_epsilon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are curve-fit ("expected") labels, columns the clustering/KNN
    classification, both in LABEL_ORDER."""

    counts: np.ndarray

    @classmethod
    def from_pairs(cls, expected, predicted) -> "ConfusionMatrix":
        pos = {lab: i for i, lab in enumerate(LABEL_ORDER)}
        counts = np.zeros((len(LABEL_ORDER), len(LABEL_ORDER)), dtype=int)
        for e, p in zip(expected, predicted, strict=True):
            counts[pos[e], pos[p]] += 1
        return cls(counts=counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.counts))

    def row_totals(self) -> dict[str, int]:
        return {
            lab.value: int(self.counts[i].sum())
            for i, lab in enumerate(LABEL_ORDER)
        }

    def to_dict(self) -> dict:
        return {
            "labels": [lab.value for lab in LABEL_ORDER],
            "matrix": self.counts.tolist(),
        }

    def to_csv(self, path) -> None:
        names = [lab.value for lab in LABEL_ORDER]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["expected\\classified"] + names
                            + ["total", "correct", "incorrect"])
            for i, name in enumerate(names):
                row = self.counts[i]
                writer.writerow(
                    [name] + [int(v) for v in row]
                    + [int(row.sum()), int(row[i]), int(row.sum() - row[i])]
                )


def agreement(cm: ConfusionMatrix) -> float:
    """Percent of series on which both methods agree: 100 * trace / total."""
    if cm.total == 0:
        raise EmptyMatrix("confusion matrix is empty")
    return 100.0 * cm.trace / cm.total


@dataclass(frozen=True)
class ValidationReport:
    dataset_tag: str
    config: ExperimentConfig
    train_size: int
    test_size: int
    n_clusters: int
    clusters: list[LabeledCluster]
    demoted_clusters: list[int]
    training_agreement_pct: float
    test_agreement_pct: float
    confusion: ConfusionMatrix
    dendrogram: Dendrogram
    medoid_index: MedoidIndex
    fit_labels: list[CurveLabel]
    train_indices: list[int]
    test_indices: list[int]
    test_predictions: list[CurveLabel]

    def to_dict(self) -> dict:
        return {
            "dataset_tag": self.dataset_tag,
            "config": self.config.to_dict(),
            "train_size": self.train_size,
            "test_size": self.test_size,
            "n_clusters": self.n_clusters,
            "clusters": [
                {
                    "id": c.cluster_id,
                    "size": len(c.members),
                    "label": c.label.value,
                    "purity": round(c.purity, 6),
                    "medoid": c.medoid_index,
                    "demoted": c.demoted,
                }
                for c in self.clusters
            ],
            "demoted_clusters": self.demoted_clusters,
            "training_agreement_pct": round(self.training_agreement_pct, 4),
            "test_agreement_pct": round(self.test_agreement_pct, 4),
            "confusion": self.confusion.to_dict(),
        }

    def to_json(self, extra: dict | None = None) -> str:
        payload = self.to_dict()
        if extra:
            payload.update(extra)
        return json.dumps(payload, sort_keys=True, indent=2)


def split(n: int, ratio: float, seed: int) -> tuple[list[int], list[int]]:
    """Seeded uniform partition; the test share is rounded down."""
    if n == 0:
        raise ValueError("dataset is empty")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_test = int(np.floor(n * (1.0 - ratio)))
    test = sorted(int(i) for i in perm[:n_test])
    train = sorted(int(i) for i in perm[n_test:])
    return train, test


def fit_label_all(series: list[NormalizedSeries], cfg: ExperimentConfig):
    """Curve-fit labels for every series, parallel over series."""
    if cfg.jobs == 1:
        return [
            classify_by_fit(s, cfg.fit_error_threshold, cfg.dying_epsilon)
            for s in series
        ]
    return Parallel(n_jobs=cfg.jobs)(
        delayed(classify_by_fit)(s, cfg.fit_error_threshold, cfg.dying_epsilon)
        for s in series
    )


def run_experiment(
    series: list[NormalizedSeries],
    cfg: ExperimentConfig,
    dataset_tag: str = "",
    fit_results=None,
) -> ValidationReport:
    """Full pipeline on preprocessed series. ``fit_results`` may be supplied
    when the caller has already fit-labeled everything."""
    n = len(series)
    if n < 3:
        raise TooFewSeries(f"need at least 3 series, got {n}")
    if fit_results is None:
        fit_results = fit_label_all(series, cfg)
    fit_labels = [r.label for r in fit_results]

    train_idx, test_idx = split(n, cfg.split_ratio, cfg.rng_seed)

    # constants are excluded from clustering but kept in the test set
    clustered_idx = [i for i in train_idx if not detect_constant(series[i])]
    if len(clustered_idx) < 2:
        raise TooFewSeries("fewer than 2 non-constant training series")

    dmat = distance_matrix([series[i] for i in clustered_idx], jobs=cfg.jobs)
    tree = linkage(dmat)
    flat = flatten(tree, cfg.cluster_threshold)
    clusters = label_clusters(
        flat,
        [fit_labels[clustered_idx[m]] for m in range(len(clustered_idx))],
        dmat,
        cfg.purity_threshold,
    )
    demoted = [c.cluster_id for c in clusters if c.demoted]

    # training agreement over clustered members, against the final (possibly
    # demoted) cluster label
    matches = 0
    for c in clusters:
        matches += sum(
            fit_labels[clustered_idx[m]] == c.label for m in c.members
        )
    training_agreement = 100.0 * matches / len(clustered_idx)

    index = MedoidIndex(
        entries=[
            MedoidEntry(
                values=series[clustered_idx[c.medoid_index]].values,
                label=c.label,
                cluster_id=c.cluster_id,
            )
            for c in clusters
        ]
    )

    predictions = []
    for i in test_idx:
        label, _, _ = classify_knn(series[i], index, cfg.knn_threshold)
        predictions.append(label)
    cm = ConfusionMatrix.from_pairs([fit_labels[i] for i in test_idx], predictions)

    return ValidationReport(
        dataset_tag=dataset_tag,
        config=cfg,
        train_size=len(train_idx),
        test_size=len(test_idx),
        n_clusters=len(clusters),
        clusters=clusters,
        demoted_clusters=demoted,
        training_agreement_pct=training_agreement,
        test_agreement_pct=agreement(cm) if test_idx else 0.0,
        confusion=cm,
        dendrogram=tree,
        medoid_index=index,
        fit_labels=fit_labels,
        train_indices=train_idx,
        test_indices=test_idx,
        test_predictions=predictions,
    )
