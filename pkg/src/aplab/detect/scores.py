"""Statistical detection scores.

Directions (which side of the threshold flags adversarial):
  kde LOW, bue HIGH, squeeze HIGH, pca_tail HIGH, softmax_kl LOW,
  non_me LOW, logit_recon HIGH.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import SqueezerSpec
from ..models import (
    ClassifierParams,
    LogitDecoderParams,
    classify,
    decode,
    flatten_images,
    predict,
    recon_error,
)
from ..numerics import Rng
from .reports import DetectError

ADV_DIRECTION = {
    "kde": "below",
    "bue": "above",
    "squeeze": "above",
    "pca_tail": "above",
    "softmax_kl": "below",
    "non_me": "below",
    "logit_recon": "above",
    "path_mlp": "above",
    "binary_net": "above",
    "plus_one": "above",
}


# -- kernel density in logit space -------------------------------------------


@dataclass
class LogitBank:
    """Per-class clean-training logits for the KDE detector."""
    banks: dict  # class id -> (n_c, C) array

    @classmethod
    def build(cls, clf: ClassifierParams, images, labels) -> "LogitBank":
        z, _ = classify(clf, images)
        labels = np.asarray(labels)
        return cls({int(c): z[labels == c] for c in np.unique(labels)})


def kde_score(x, clf: ClassifierParams, bank: LogitBank, sigma: float = 1.0) -> np.ndarray:
    """Gaussian-kernel density of Z(x) against the predicted class's bank."""
    if sigma <= 0:
        raise DetectError("kde bandwidth must be positive")
    z, _ = classify(clf, x)
    preds = predict(clf, x)
    out = np.empty(len(z))
    for i, (zi, cls_id) in enumerate(zip(z, preds)):
        b = bank.banks.get(int(cls_id))
        if b is None or len(b) == 0:
            raise DetectError(f"empty logit bank for predicted class {cls_id}")
        d2 = ((b - zi) ** 2).sum(axis=1)
        out[i] = np.exp(-d2 / sigma**2).mean()
    return out


# -- dropout uncertainty -------------------------------------------------------


def bue_score(x, clf: ClassifierParams, n_passes: int, rng: Rng) -> np.ndarray:
    """Prediction variance over stochastic dropout passes:
    mean_i(f_i . f_i) - mean_i(f_i) . mean_i(f_i).
    """
    if clf.p_drop <= 0:
        raise DetectError("bue needs a dropout rate > 0 on the classifier")
    if n_passes < 2:
        raise DetectError("bue needs at least 2 stochastic passes")
    sq_sum = None
    mean_sum = None
    for i in range(n_passes):
        _, probs = classify(clf, x, mode="stochastic", rng=rng.substream(i))
        sq = (probs * probs).sum(axis=1)
        sq_sum = sq if sq_sum is None else sq_sum + sq
        mean_sum = probs if mean_sum is None else mean_sum + probs
    mean_probs = mean_sum / n_passes
    return sq_sum / n_passes - (mean_probs * mean_probs).sum(axis=1)


# -- two-sample kernel statistic ----------------------------------------------


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aa = (a * a).sum(axis=1)[:, None]
    bb = (b * b).sum(axis=1)[None, :]
    return np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)


def median_heuristic_sigma(a, b) -> float:
    """Median pairwise distance over the pooled sample."""
    pooled = np.concatenate([flatten_images(np.asarray(a)), flatten_images(np.asarray(b))])
    d2 = _sq_dists(pooled, pooled)
    med = np.median(np.sqrt(d2[np.triu_indices(len(pooled), k=1)]))
    return float(med) if med > 0 else 1.0


def mmd_statistic(sample_a, sample_b, sigma: float = None) -> float:
    """Biased squared-MMD estimate with a gaussian kernel; >= 0, and 0 when
    the samples coincide."""
    a = flatten_images(np.asarray(sample_a, dtype=np.float64))
    b = flatten_images(np.asarray(sample_b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise DetectError("mmd needs nonempty samples")
    if sigma is None:
        sigma = median_heuristic_sigma(a, b)
    if sigma <= 0:
        raise DetectError("mmd bandwidth must be positive")
    gamma = 1.0 / (2.0 * sigma**2)
    k_aa = np.exp(-gamma * _sq_dists(a, a)).mean()
    k_bb = np.exp(-gamma * _sq_dists(b, b)).mean()
    k_ab = np.exp(-gamma * _sq_dists(a, b)).mean()
    return float(max(k_aa + k_bb - 2.0 * k_ab, 0.0))


# -- feature squeezing ----------------------------------------------------------


def squeeze_score(x, clf: ClassifierParams, squeezers) -> np.ndarray:
    """max over squeezers of the L1 gap between raw and squeezed softmax."""
    squeezers = list(squeezers)
    if not squeezers:
        raise DetectError("need at least one squeezer")
    x = np.asarray(x, dtype=np.float64)
    _, base = classify(clf, x)
    best = None
    for sq in squeezers:
        _, squeezed = classify(clf, sq.apply(x))
        gap = np.abs(base - squeezed).sum(axis=1)
        best = gap if best is None else np.maximum(best, gap)
    return best


# -- input-space PCA tail -------------------------------------------------------


@dataclass
class PcaBasis:
    mean: np.ndarray
    components: np.ndarray   # (D, D) rows = principal directions, variance-sorted
    scales: np.ndarray       # per-component std with a numerical floor

    @classmethod
    def fit(cls, images, floor_rel: float = 1e-6) -> "PcaBasis":
        flat = flatten_images(np.asarray(images, dtype=np.float64))
        mean = flat.mean(axis=0)
        centered = flat - mean
        cov = centered.T @ centered / (len(flat) - 1)
        eigvals, eigvecs = np.linalg.eigh(cov)
        order = np.argsort(eigvals)[::-1]
        eigvals, eigvecs = eigvals[order], eigvecs[:, order]
        floor = max(eigvals.max(), 0.0) * floor_rel + 1e-12
        scales = np.sqrt(np.maximum(eigvals, floor))
        return cls(mean=mean, components=eigvecs.T, scales=scales)


def pca_tail_score(x, basis: PcaBasis, tail_k: int) -> np.ndarray:
    """Mean squared magnitude of the trailing whitened PCA coefficients."""
    flat = flatten_images(np.asarray(x, dtype=np.float64))
    dim = basis.components.shape[0]
    if not 1 <= tail_k <= dim:
        raise DetectError(f"tail_k must be in [1, {dim}], got {tail_k}")
    coeffs = (flat - basis.mean) @ basis.components.T / basis.scales
    tail = coeffs[:, dim - tail_k:]
    return (tail * tail).mean(axis=1)


# -- softmax statistics ----------------------------------------------------------


def softmax_kl_score(x, clf: ClassifierParams) -> np.ndarray:
    """KL between the softmax output and the uniform distribution
    (log C - entropy); 0 for a uniform output, ~log C for a confident one.
    Normal examples sit far from uniform, adversarial ones closer.
    """
    _, probs = classify(clf, x)
    c = probs.shape[1]
    safe = np.clip(probs, 1e-300, 1.0)
    entropy = -(safe * np.log(safe)).sum(axis=1)
    return np.log(c) - entropy


def non_me_score(x, clf: ClassifierParams) -> np.ndarray:
    """Entropy of the renormalized non-argmax probabilities of an RCE model;
    values below threshold flag adversarial."""
    if clf.loss_kind != "rce" or not clf.reversed_logits:
        raise DetectError("non_me requires an RCE-trained (reversed-logit) classifier")
    _, probs = classify(clf, x)
    return _non_max_entropy(probs)


def _non_max_entropy(probs: np.ndarray) -> np.ndarray:
    n, c = probs.shape
    top = probs.argmax(axis=1)
    mask = np.ones_like(probs, dtype=bool)
    mask[np.arange(n), top] = False
    rest = probs[mask].reshape(n, c - 1)
    total = rest.sum(axis=1, keepdims=True)
    q = rest / np.maximum(total, 1e-300)
    safe = np.clip(q, 1e-300, 1.0)
    return -(safe * np.log(safe)).sum(axis=1)


# -- logit-decoder reconstruction ------------------------------------------------


def logit_recon_score(x, clf: ClassifierParams, dec: LogitDecoderParams) -> np.ndarray:
    """Reconstruction error of the image decoded from the classifier's logits."""
    z, _ = classify(clf, x)
    return recon_error(flatten_images(np.asarray(x, dtype=np.float64)), decode(dec, z))
