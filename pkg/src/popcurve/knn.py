"""1-nearest-medoid classification with a minimum-distance outlier cutoff."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .curvefit import CurveLabel, detect_constant
from .dtw import dtw_distance
from .errors import EmptyIndex
from .series import NormalizedSeries

DEFAULT_KNN_THRESHOLD = 5.0


@dataclass(frozen=True)
class MedoidEntry:
    values: np.ndarray
    label: CurveLabel
    cluster_id: int


@dataclass(frozen=True)
class MedoidIndex:
    entries: list[MedoidEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, path) -> None:
        payload = [
            {
                "values": [float(v) for v in e.values],
                "label": e.label.value,
                "cluster_id": e.cluster_id,
            }
            for e in self.entries
        ]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path) -> "MedoidIndex":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(
            entries=[
                MedoidEntry(
                    values=np.array(e["values"], dtype=float),
                    label=CurveLabel(e["label"]),
                    cluster_id=int(e["cluster_id"]),
                )
                for e in payload
            ]
        )


def classify_knn(
    s: NormalizedSeries,
    index: MedoidIndex,
    min_distance_threshold: float = DEFAULT_KNN_THRESHOLD,
    constant_shortcut: bool = True,
) -> tuple[CurveLabel, int | None, float]:
    """Label a series by its nearest medoid under DTW, or Outlier when no
    medoid is within the distance threshold.

    Constant series short-circuit to Constant: constants are removed before
    clustering, so no constant medoid can exist.
    """
    if len(index) == 0:
        raise EmptyIndex("medoid index is empty")
    if constant_shortcut and detect_constant(s):
        return CurveLabel.CONSTANT, None, 0.0
    best_id, best_dist = None, np.inf
    for mid, entry in enumerate(index.entries):
        dist = dtw_distance(s, entry.values)
        if dist < best_dist:
            best_id, best_dist = mid, dist
    if best_dist > min_distance_threshold:
        return CurveLabel.OUTLIER, best_id, best_dist
    return index.entries[best_id].label, best_id, best_dist
