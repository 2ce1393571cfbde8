import numpy as np
from scipy import ndimage

from gridseg.imaging.raster import BoundaryMap, RasterImage

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_grayscale(image: RasterImage) -> RasterImage:
    if image.channels == 1:
        return image
    luma = image.data @ LUMA_WEIGHTS
    # Weights sum to one, so only rounding can leave [0, 1]
    return RasterImage(np.clip(luma, 0.0, 1.0))


def gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    """Sobel gradient magnitude with edge-replicated borders."""
    gx = ndimage.sobel(plane, axis=1, mode='nearest')
    gy = ndimage.sobel(plane, axis=0, mode='nearest')
    return np.hypot(gx, gy)


def boundary_map(image: RasterImage) -> BoundaryMap:
    """Edge strength of the luma channel, min-max normalized to [0, 1].

    A constant image has no edges and yields an all-zero map.
    """
    magnitude = gradient_magnitude(to_grayscale(image).plane())
    lo, hi = magnitude.min(), magnitude.max()
    if hi - lo <= 0.0:
        return BoundaryMap(np.zeros_like(magnitude))
    return BoundaryMap((magnitude - lo) / (hi - lo))
