import numpy as np

from gridseg.imaging.raster import require_same_shape
from gridseg.nn.constants import BCE_CLAMP


def bce_loss(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7]."""
    require_same_shape(pred.shape, target.shape, "prediction and target")
    p = np.clip(pred.astype(np.float64), BCE_CLAMP, 1.0 - BCE_CLAMP)
    y = target.astype(np.float64)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def bce_logit_gradient(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """d(bce_loss(sigmoid(z)))/dz given pred = sigmoid(z); zero where the clamp is active."""
    require_same_shape(pred.shape, target.shape, "prediction and target")
    p = pred.astype(np.float64)
    inside = (p > BCE_CLAMP) & (p < 1.0 - BCE_CLAMP)
    grad = np.where(inside, p - target.astype(np.float64), 0.0) / p.size
    return grad.astype(pred.dtype)
