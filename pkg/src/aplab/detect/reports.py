"""Threshold calibration and ROC evaluation shared by every detector."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DetectError(ValueError):
    pass


@dataclass
class DetectorReport:
    scores: np.ndarray
    labels: np.ndarray          # 1 = adversarial, 0 = clean
    direction: str              # "above" or "below": which side flags adversarial
    threshold: float = None
    tpr_at_threshold: float = None
    fpr_at_threshold: float = None
    roc_fpr: np.ndarray = field(default=None, repr=False)
    roc_tpr: np.ndarray = field(default=None, repr=False)
    auc: float = None


def calibrate_threshold(clean_scores, direction: str, target_fpr: float) -> float:
    """Empirical clean-score quantile achieving FPR <= target in `direction`."""
    scores = np.asarray(clean_scores, dtype=np.float64)
    if len(scores) < 20:
        raise DetectError(f"need >= 20 clean scores to calibrate, got {len(scores)}")
    if not 0.0 < target_fpr < 1.0:
        raise DetectError(f"target_fpr must be in (0, 1), got {target_fpr}")
    if direction == "above":
        # flag score > T; pick the smallest T with at most target mass above
        return float(np.quantile(scores, 1.0 - target_fpr, method="higher"))
    if direction == "below":
        return float(np.quantile(scores, target_fpr, method="lower"))
    raise DetectError(f"direction must be 'above' or 'below', got {direction!r}")


def apply_threshold(scores, threshold: float, direction: str) -> np.ndarray:
    scores = np.asarray(scores, dtype=np.float64)
    return scores > threshold if direction == "above" else scores < threshold


def roc(scores, labels, direction: str = "above", threshold: float = None) -> DetectorReport:
    """Full ROC sweep with trapezoid AUC; ties are grouped, so reflecting the
    scores reflects the AUC (AUC(s) + AUC(-s) = 1).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if set(np.unique(labels)) - {0, 1}:
        raise DetectError("labels must be 0 (clean) or 1 (adversarial)")
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DetectError("roc needs both clean and adversarial examples")

    effective = scores if direction == "above" else -scores
    order = np.argsort(-effective, kind="stable")
    sorted_scores = effective[order]
    sorted_labels = labels[order]
    # group ties: cumulative counts at each distinct score boundary
    distinct = np.nonzero(np.diff(sorted_scores))[0]
    boundaries = np.concatenate([distinct, [len(sorted_scores) - 1]])
    tp = np.cumsum(sorted_labels)[boundaries]
    fp = np.cumsum(1 - sorted_labels)[boundaries]
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    auc = float(np.trapezoid(tpr, fpr))

    report = DetectorReport(scores=scores, labels=labels, direction=direction,
                            roc_fpr=fpr, roc_tpr=tpr, auc=auc)
    if threshold is not None:
        flags = apply_threshold(scores, threshold, direction)
        report.threshold = float(threshold)
        report.tpr_at_threshold = float(flags[labels == 1].mean())
        report.fpr_at_threshold = float(flags[labels == 0].mean())
    return report
