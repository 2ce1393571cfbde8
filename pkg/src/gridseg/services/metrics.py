"""Saliency metrics: MAE, precision-recall, adaptive F-beta and majority voting."""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from gridseg.exceptions import InputError, MetricError
from gridseg.imaging.raster import BinaryMask, RasterImage, require_same_shape

BETA_SQ = 0.3
THRESHOLD_COUNT = 256
# Highest adaptive threshold; keeps the predicted set of an all-ones map non-empty
MAX_ADAPTIVE_TAU = 1.0 - 1.0 / 510.0

SaliencyLike = Union[RasterImage, np.ndarray]


@dataclass(frozen=True, eq=False)
class PRCurve:
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray

    def fbeta(self) -> np.ndarray:
        return fbeta_score(self.precision, self.recall)


@dataclass(frozen=True)
class FBetaResult:
    fbeta: float
    precision: float
    recall: float
    tau: float


def pr_thresholds() -> np.ndarray:
    return np.arange(THRESHOLD_COUNT, dtype=np.float64) / 255.0


def _values(s: SaliencyLike) -> np.ndarray:
    if isinstance(s, RasterImage):
        if s.channels != 1:
            raise InputError("Saliency maps must have one channel")
        return s.data[:, :, 0]
    arr = np.asarray(s, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    return arr


def _pair(s: SaliencyLike, gt: BinaryMask):
    values = _values(s)
    require_same_shape(values.shape, gt.shape, "saliency map and ground truth")
    return values, gt.data.astype(bool)


def _require_positive(truth: np.ndarray) -> None:
    if not truth.any():
        raise MetricError("Ground truth has no salient pixels; precision/recall are undefined")


def fbeta_score(precision, recall, beta_sq: float = BETA_SQ):
    """(1 + b2) P R / (b2 P + R), defined as 0 when P = R = 0."""
    p = np.asarray(precision, dtype=np.float64)
    r = np.asarray(recall, dtype=np.float64)
    denom = beta_sq * p + r
    with np.errstate(invalid='ignore', divide='ignore'):
        f = np.where(denom > 0, (1.0 + beta_sq) * p * r / np.where(denom > 0, denom, 1.0), 0.0)
    return float(f) if f.ndim == 0 else f


def mae(s: SaliencyLike, gt: BinaryMask) -> float:
    values, truth = _pair(s, gt)
    return float(np.mean(np.abs(values - truth)))


def precision_recall(pred: np.ndarray, truth: np.ndarray):
    """Precision and recall of a boolean prediction; precision of an empty prediction is 0."""
    predicted = int(pred.sum())
    hits = int(np.count_nonzero(pred & truth))
    precision = hits / predicted if predicted else 0.0
    return precision, hits / int(truth.sum())


def pr_curve(s: SaliencyLike, gt: BinaryMask) -> PRCurve:
    """Precision and recall of S > tau for tau = 0, 1/255, ..., 1."""
    values, truth = _pair(s, gt)
    _require_positive(truth)
    taus = pr_thresholds()
    all_sorted = np.sort(values.ravel())
    pos_sorted = np.sort(values[truth])
    predicted = all_sorted.size - np.searchsorted(all_sorted, taus, side='right')
    hits = pos_sorted.size - np.searchsorted(pos_sorted, taus, side='right')
    with np.errstate(invalid='ignore', divide='ignore'):
        precision = np.where(predicted > 0, hits / np.maximum(predicted, 1), 0.0)
    recall = hits / pos_sorted.size
    return PRCurve(taus, precision.astype(np.float64), recall.astype(np.float64))


def adaptive_threshold(s: SaliencyLike) -> float:
    return min(2.0 * float(np.mean(_values(s))), MAX_ADAPTIVE_TAU)


def binarize_adaptive(s: SaliencyLike) -> np.ndarray:
    values = _values(s)
    return values > adaptive_threshold(values)


def adaptive_fbeta(s: SaliencyLike, gt: BinaryMask) -> FBetaResult:
    """F-beta at twice the mean saliency."""
    values, truth = _pair(s, gt)
    _require_positive(truth)
    tau = adaptive_threshold(values)
    precision, recall = precision_recall(values > tau, truth)
    return FBetaResult(fbeta_score(precision, recall), precision, recall, tau)


def max_fbeta(curve: PRCurve) -> float:
    return float(np.max(curve.fbeta()))


def majority_vote(maps: Sequence[SaliencyLike]) -> BinaryMask:
    """Pixel is salient when at least ceil((k+1)/2) of the k adaptively binarized maps agree."""
    if not maps:
        raise InputError("Majority vote needs at least one map")
    planes = [_values(m) for m in maps]
    for plane in planes[1:]:
        require_same_shape(plane.shape, planes[0].shape, "voted maps")
    votes = np.sum([binarize_adaptive(p) for p in planes], axis=0)
    needed = math.ceil((len(planes) + 1) / 2)
    return BinaryMask((votes >= needed).astype(np.uint8))


def mean_curve(curves: Sequence[PRCurve]) -> PRCurve:
    """Per-threshold arithmetic mean of several curves."""
    if not curves:
        taus = pr_thresholds()
        return PRCurve(taus, np.zeros_like(taus), np.zeros_like(taus))
    return PRCurve(
        curves[0].thresholds,
        np.mean([c.precision for c in curves], axis=0),
        np.mean([c.recall for c in curves], axis=0),
    )
