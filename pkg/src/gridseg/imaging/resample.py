"""Separable Catmull-Rom bicubic resampling, antialiased when shrinking."""

from functools import lru_cache

import numpy as np

from gridseg.exceptions import InputError
from gridseg.imaging.raster import RasterImage

CUBIC_A = -0.5


def cubic_kernel(x: np.ndarray, a: float = CUBIC_A) -> np.ndarray:
    """Keys cubic convolution kernel; a = -0.5 gives Catmull-Rom."""
    x = np.abs(np.asarray(x, dtype=np.float64))
    x2 = x * x
    x3 = x2 * x
    near = (a + 2.0) * x3 - (a + 3.0) * x2 + 1.0
    far = a * x3 - 5.0 * a * x2 + 8.0 * a * x - 4.0 * a
    return np.where(x <= 1.0, near, np.where(x < 2.0, far, 0.0))


@lru_cache(maxsize=64)
def _weights(src: int, dst: int) -> np.ndarray:
    """Return the (dst, src) interpolation matrix for one axis.

    Pixel centres are aligned (half-pixel convention) and out-of-range taps
    are folded onto the nearest edge sample. When shrinking, the kernel is
    stretched by the scale factor so every source sample is averaged in, and
    each row is renormalized to sum to one.
    """
    scale = src / dst
    stretch = max(scale, 1.0)
    reach = int(np.ceil(2.0 * stretch))
    centers = (np.arange(dst) + 0.5) * scale - 0.5
    base = np.floor(centers).astype(np.int64)
    matrix = np.zeros((dst, src), dtype=np.float64)
    rows = np.arange(dst)
    for tap in range(1 - reach, reach + 1):
        idx = base + tap
        w = cubic_kernel((centers - idx) / stretch)
        np.add.at(matrix, (rows, np.clip(idx, 0, src - 1)), w)
    matrix /= matrix.sum(axis=1, keepdims=True)
    matrix.setflags(write=False)
    return matrix


def resize_plane(plane: np.ndarray, new_h: int, new_w: int) -> np.ndarray:
    """Resample a 2-D or HxWxC array without clamping."""
    wy = _weights(plane.shape[0], new_h)
    wx = _weights(plane.shape[1], new_w)
    if plane.ndim == 2:
        return wy @ plane @ wx.T
    return np.einsum('ij,jkc,lk->ilc', wy, plane, wx)


def resize_bicubic(image: RasterImage, new_h: int, new_w: int) -> RasterImage:
    if new_h < 1 or new_w < 1:
        raise InputError(f"Target size must be positive, got {new_h}x{new_w}")
    out = resize_plane(image.data, new_h, new_w)
    return RasterImage(np.clip(out, 0.0, 1.0))
