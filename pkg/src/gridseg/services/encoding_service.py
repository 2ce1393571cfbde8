"""Grid encoding of images and ground truths, and reconstruction back to pixels."""

import logging
from dataclasses import dataclass

import numpy as np

from gridseg.exceptions import DimensionMismatchError, InputError
from gridseg.grid.labeling import SuperpixelGrid
from gridseg.imaging.raster import BinaryMask, RasterImage, require_same_shape

logger = logging.getLogger(__name__)

TENSOR_DTYPE = np.float32


@dataclass(frozen=True, eq=False)
class GridTensor:
    """Per-cell values of an R x C lattice, stored as (R, C, channels) float32."""
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=TENSOR_DTYPE)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.ndim != 3 or 0 in data.shape:
            raise InputError(f"GridTensor must be RxCxK and non-empty, got shape {data.shape}")
        object.__setattr__(self, 'data', data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape

    def flipped(self) -> 'GridTensor':
        return GridTensor(self.data[:, ::-1, :].copy())

    def same_as(self, other: 'GridTensor') -> bool:
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))


def _cell_means(values: np.ndarray, grid: SuperpixelGrid) -> np.ndarray:
    """Mean of `values` (H, W, K) over every cell, accumulated in float64."""
    flat = grid.labels.ravel()
    sizes = np.bincount(flat, minlength=grid.dims.cells).astype(np.float64)
    if np.any(sizes == 0):
        raise InputError("Grid has empty cells")
    channels = values.shape[2]
    out = np.empty((grid.dims.cells, channels), dtype=np.float64)
    for k in range(channels):
        sums = np.bincount(flat, weights=values[:, :, k].ravel().astype(np.float64), minlength=grid.dims.cells)
        out[:, k] = sums / sizes
    return out.reshape(grid.dims.rows, grid.dims.cols, channels)


def encode_image(image: RasterImage, grid: SuperpixelGrid) -> GridTensor:
    """Encode each superpixel with its mean color."""
    require_same_shape(image.shape, grid.shape, "image and grid")
    return GridTensor(_cell_means(image.data, grid))


def encode_label(mask: BinaryMask, grid: SuperpixelGrid) -> GridTensor:
    """Binary per-cell label: 1 when at least half of the cell is salient."""
    require_same_shape(mask.shape, grid.shape, "mask and grid")
    flat = grid.labels.ravel()
    sizes = np.bincount(flat, minlength=grid.dims.cells)
    positives = np.bincount(flat, weights=mask.data.ravel(), minlength=grid.dims.cells)
    # integer form of mean >= 0.5
    labels = (2 * positives.astype(np.int64) >= sizes).astype(TENSOR_DTYPE)
    return GridTensor(labels.reshape(grid.dims.rows, grid.dims.cols, 1))


def minmax_normalize(tensor: GridTensor) -> GridTensor:
    """Rescale all cells and channels jointly to [0, 1]; a constant tensor becomes zeros."""
    data = tensor.data.astype(np.float64)
    lo, hi = data.min(), data.max()
    if hi == lo:
        return GridTensor(np.zeros_like(data))
    return GridTensor((data - lo) / (hi - lo))


def reconstruct(pred: GridTensor, grid: SuperpixelGrid) -> RasterImage:
    """Replicate every cell value onto the pixels of that cell."""
    if (pred.rows, pred.cols) != (grid.dims.rows, grid.dims.cols):
        raise DimensionMismatchError(
            f"Tensor is {pred.rows}x{pred.cols} but the grid is {grid.dims.rows}x{grid.dims.cols}"
        )
    flat = pred.data.reshape(-1, pred.channels).astype(np.float64)
    return RasterImage(flat[grid.labels])


def encode_pair(image: RasterImage, mask: BinaryMask, grid: SuperpixelGrid):
    """Normalized network input and binary label for one image on one grid."""
    return minmax_normalize(encode_image(image, grid)), encode_label(mask, grid)
