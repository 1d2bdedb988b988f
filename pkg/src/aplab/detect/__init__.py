from .centers import ClassCenters, compute_centers, distance_embedding
from .ensemble import max_combine, quantile_normalize
from .learned import (
    BinaryDetector,
    PathDetector,
    plus_one_flag,
    plus_one_score,
    train_binary_net,
    train_path_detector,
    train_plus_one,
)
from .reports import DetectError, DetectorReport, apply_threshold, calibrate_threshold, roc
from .scores import (
    ADV_DIRECTION,
    LogitBank,
    PcaBasis,
    bue_score,
    kde_score,
    logit_recon_score,
    median_heuristic_sigma,
    mmd_statistic,
    non_me_score,
    pca_tail_score,
    softmax_kl_score,
    squeeze_score,
)

__all__ = [
    "ADV_DIRECTION", "BinaryDetector", "ClassCenters", "DetectError",
    "DetectorReport", "LogitBank", "PathDetector", "PcaBasis",
    "apply_threshold", "bue_score", "calibrate_threshold", "compute_centers",
    "distance_embedding", "kde_score", "logit_recon_score", "max_combine",
    "median_heuristic_sigma", "mmd_statistic", "non_me_score",
    "pca_tail_score", "plus_one_flag", "plus_one_score", "quantile_normalize",
    "roc", "softmax_kl_score", "squeeze_score", "train_binary_net",
    "train_path_detector", "train_plus_one",
]
