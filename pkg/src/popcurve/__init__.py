"""popcurve: classify population time series into canonical ecological curve
shapes by parametric curve fitting and DTW-based clustering, and measure
cross-method agreement."""

__version__ = "0.1.0"

from .cluster import (
    Dendrogram,
    FlatClustering,
    LabeledCluster,
    flatten,
    kmeans,
    label_clusters,
    linkage,
    medoid,
    silhouette,
)
from .curvefit import (
    FAMILIES,
    LABEL_ORDER,
    CurveFamily,
    CurveLabel,
    FitResult,
    classify_by_fit,
    detect_constant,
    detect_dying,
    fit_family,
)
from .dtw import DistanceMatrix, distance_matrix, dtw_distance
from .knn import MedoidEntry, MedoidIndex, classify_knn
from .series import NormalizedSeries, RawSeries, ingest_csv, preprocess
from .synth import GenSpec, generate, make_corpus, write_corpus
from .validation import (
    ConfusionMatrix,
    ExperimentConfig,
    ValidationReport,
    agreement,
    run_experiment,
    split,
)
