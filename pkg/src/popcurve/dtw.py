"""Dynamic-time-warping distance and pairwise distance matrices.

Local cost is the squared pointwise difference, accumulated along monotone
warping paths; the reported distance is the square root of the minimal
accumulated cost (DTW with euclidean distance).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numba
import numpy as np

from .errors import LengthMismatch
from .series import NormalizedSeries


@numba.njit(cache=True)
def _dtw_sq(a, b, window):
    n, m = a.size, b.size
    if window < 0:
        window = max(n, m)
    w = max(window, abs(n - m))
    prev = np.full(m + 1, np.inf)
    cur = np.full(m + 1, np.inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cur[:] = np.inf
        lo = max(1, i - w)
        hi = min(m, i + w)
        for j in range(lo, hi + 1):
            d = a[i - 1] - b[j - 1]
            best = prev[j - 1]
            if prev[j] < best:
                best = prev[j]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = d * d + best
        prev, cur = cur, prev
    return prev[m]


@numba.njit(cache=True, parallel=True)
def _pairwise_sq(X, ii, jj, window):
    out = np.empty(ii.size)
    for k in numba.prange(ii.size):
        out[k] = _dtw_sq(X[ii[k]], X[jj[k]], window)
    return out


def _values(s) -> np.ndarray:
    if isinstance(s, NormalizedSeries):
        return s.values
    return np.asarray(s, dtype=float)


def dtw_distance(a, b, window: int = -1) -> float:
    """DTW distance between two series (arrays or NormalizedSeries).

    ``window`` is an optional Sakoe-Chiba band half-width; negative means
    unconstrained (the default).
    """
    return float(np.sqrt(_dtw_sq(_values(a), _values(b), window)))


@dataclass(frozen=True)
class DistanceMatrix:
    n: int
    entries: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in self.entries:
                writer.writerow([repr(float(v)) for v in row])


def distance_matrix(xs, window: int = -1, jobs: int | None = None) -> DistanceMatrix:
    """Symmetric pairwise DTW matrix. Pair evaluation order (and thread
    count) cannot affect the values, so results are reproducible.
    """
    arrays = [_values(s) for s in xs]
    n = len(arrays)
    if n == 0:
        raise ValueError("need at least one series")
    length = arrays[0].size
    for k, arr in enumerate(arrays):
        if arr.size != length:
            raise LengthMismatch(
                f"series {k} has length {arr.size}, expected {length}"
            )
    entries = np.zeros((n, n))
    if n > 1:
        ii, jj = np.triu_indices(n, k=1)
        if jobs is not None:
            numba.set_num_threads(min(max(1, jobs), numba.config.NUMBA_NUM_THREADS))
        vals = np.sqrt(_pairwise_sq(np.stack(arrays), ii, jj, window))
        entries[ii, jj] = vals
        entries[jj, ii] = vals
    return DistanceMatrix(n=n, entries=entries)
