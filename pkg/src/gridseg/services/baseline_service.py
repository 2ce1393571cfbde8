"""Plain bicubic downsampling, the encoding the gridized pipeline is compared with."""

import logging
from typing import Tuple, Union

import numpy as np

from gridseg.grid.dims import GridDims, aspect_dims
from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.imaging.resample import resize_bicubic
from gridseg.services.encoding_service import GridTensor, minmax_normalize

logger = logging.getLogger(__name__)


def baseline_dims(height: int, width: int, target_n: int) -> GridDims:
    """Aspect-preserving low resolution with about `target_n` pixels."""
    return aspect_dims(height, width, target_n)


def downsample_baseline(image: RasterImage, mask: BinaryMask, target_n: int) -> Tuple[RasterImage, BinaryMask]:
    """Bicubic downsample of an image and its mask; the mask is re-binarized at 0.5."""
    dims = baseline_dims(image.height, image.width, target_n)
    small = resize_bicubic(image, dims.rows, dims.cols)
    small_mask = resize_bicubic(RasterImage.from_mask(mask), dims.rows, dims.cols)
    return small, BinaryMask((small_mask.data[:, :, 0] >= 0.5).astype(np.uint8))


def downsample_image(image: RasterImage, target_n: int) -> RasterImage:
    dims = baseline_dims(image.height, image.width, target_n)
    return resize_bicubic(image, dims.rows, dims.cols)


def upsample_prediction(lowres: Union[RasterImage, np.ndarray], height: int, width: int) -> RasterImage:
    """Bicubic upsample of a low-resolution map back to height x width, clamped to [0, 1]."""
    if not isinstance(lowres, RasterImage):
        lowres = RasterImage(np.clip(np.asarray(lowres, dtype=np.float64), 0.0, 1.0))
    return resize_bicubic(lowres, height, width)


def encode_baseline_pair(image: RasterImage, mask: BinaryMask, target_n: int) -> Tuple[GridTensor, GridTensor]:
    """Normalized network input and binary label from the downsampled pair."""
    small, small_mask = downsample_baseline(image, mask, target_n)
    return minmax_normalize(GridTensor(small.data)), GridTensor(small_mask.data.astype(np.float32))
