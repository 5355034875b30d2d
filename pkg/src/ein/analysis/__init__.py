from .importance import aggregate_columns, aggregate_weights, top_n_emotions
from .infogain import FeatureRanking, entropy, information_gain
from .metrics import MetricsReport, binary_metrics, compute_metrics, confusion_matrix
from .projection import export_penultimate, pca_project, read_penultimate, write_projection
from .ttest import TTestResult, betainc, welch_t_test

__all__ = [
    "FeatureRanking", "MetricsReport", "TTestResult", "aggregate_columns", "aggregate_weights",
    "betainc", "binary_metrics", "compute_metrics", "confusion_matrix", "entropy",
    "export_penultimate", "information_gain", "pca_project", "read_penultimate",
    "top_n_emotions", "welch_t_test", "write_projection",
]
