"""Layer primitives on NHWC arrays.

Every forward function returns ``(output, cache)``; the matching backward
takes the upstream gradient and that cache. Reductions accumulate in float64
and results are cast back to the input dtype.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from gridseg.exceptions import DimensionMismatchError
from gridseg.nn.constants import BN_EPS, BN_MOMENTUM

_PAD = ((0, 0), (1, 1), (1, 1), (0, 0))


def _windows(x: np.ndarray) -> np.ndarray:
    """3x3 neighbourhoods of the zero-padded input, shape (N, H, W, K, 3, 3)."""
    return sliding_window_view(np.pad(x, _PAD), (3, 3), axis=(1, 2))


def conv3x3_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Stride-1 cross-correlation with one pixel of zero padding.

    Args:
        x: (N, H, W, Cin)
        w: (3, 3, Cin, Cout)
        b: (Cout,)
    """
    if x.ndim != 4 or w.shape[2] != x.shape[3] or b.shape != (w.shape[3],):
        raise DimensionMismatchError(
            f"conv3x3 input {x.shape} does not match kernel {w.shape} / bias {b.shape}"
        )
    win = _windows(x)
    out = np.tensordot(win, w, axes=((3, 4, 5), (2, 0, 1))) + b
    return out.astype(x.dtype, copy=False), (win, w)


def conv3x3_backward(dout: np.ndarray, cache):
    win, w = cache
    dw = np.tensordot(win, dout, axes=((0, 1, 2), (0, 1, 2)))  # (Cin, 3, 3, Cout)
    dw = dw.transpose(1, 2, 0, 3).astype(w.dtype, copy=False)
    db = dout.sum(axis=(0, 1, 2), dtype=np.float64).astype(w.dtype)
    flipped = w[::-1, ::-1]
    dx = np.tensordot(_windows(dout), flipped, axes=((3, 4, 5), (3, 0, 1)))
    return dx.astype(dout.dtype, copy=False), dw, db


def batchnorm_forward(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray,
                      running_mean: np.ndarray, running_var: np.ndarray,
                      training: bool, momentum: float = BN_MOMENTUM, eps: float = BN_EPS):
    """Per-channel normalization over (N, H, W).

    In training mode the batch statistics are used and the running statistics
    are updated in place; in eval mode the running statistics are used.
    """
    if not (gamma.shape == beta.shape == running_mean.shape == running_var.shape == (x.shape[3],)):
        raise DimensionMismatchError(f"batchnorm parameters do not match {x.shape[3]} channels")
    x64 = x.astype(np.float64)
    if training:
        mean = x64.mean(axis=(0, 1, 2))
        var = x64.var(axis=(0, 1, 2))
        running_mean[...] = momentum * running_mean + (1.0 - momentum) * mean
        running_var[...] = momentum * running_var + (1.0 - momentum) * var
    else:
        mean = running_mean.astype(np.float64)
        var = running_var.astype(np.float64)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = (x64 - mean) * inv_std
    out = gamma.astype(np.float64) * xhat + beta
    return out.astype(x.dtype), (xhat, inv_std, gamma)


def batchnorm_backward(dout: np.ndarray, cache):
    """Gradient of training-mode batchnorm; returns (dx, dgamma, dbeta)."""
    xhat, inv_std, gamma = cache
    d = dout.astype(np.float64)
    count = d.shape[0] * d.shape[1] * d.shape[2]
    dbeta = d.sum(axis=(0, 1, 2))
    dgamma = (d * xhat).sum(axis=(0, 1, 2))
    dxhat = d * gamma.astype(np.float64)
    dx = (inv_std / count) * (count * dxhat - dxhat.sum(axis=(0, 1, 2)) - xhat * (dxhat * xhat).sum(axis=(0, 1, 2)))
    return dx.astype(dout.dtype), dgamma.astype(gamma.dtype), dbeta.astype(gamma.dtype)


def relu_forward(x: np.ndarray):
    mask = x > 0
    return np.where(mask, x, 0).astype(x.dtype, copy=False), mask


def relu_backward(dout: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.where(mask, dout, 0).astype(dout.dtype, copy=False)


def relu(x: np.ndarray) -> np.ndarray:
    return relu_forward(np.asarray(x))[0]


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Logistic function; stable for large |x|."""
    return expit(x)
