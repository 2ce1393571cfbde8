"""Full-resolution image containers.

Images are float64 arrays of shape (height, width, channels) with values in
[0, 1]; masks are uint8 arrays of shape (height, width) holding 0 or 1.
"""

from dataclasses import dataclass

import numpy as np

from gridseg.exceptions import DimensionMismatchError, InputError

# Smallest side the gridization pipeline accepts
MIN_SIDE = 8

IMAGE_DTYPE = np.float64


@dataclass(frozen=True, eq=False)
class RasterImage:
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=IMAGE_DTYPE)
        if data.ndim == 2:
            data = data[:, :, None]
        if data.ndim != 3 or data.shape[2] not in (1, 3):
            raise InputError(f"Image must be HxWx1 or HxWx3, got shape {data.shape}")
        if data.shape[0] == 0 or data.shape[1] == 0:
            raise InputError("Image has zero size")
        if not np.all(np.isfinite(data)) or data.min() < 0.0 or data.max() > 1.0:
            raise InputError("Image values must lie in [0, 1]")
        object.__setattr__(self, 'data', data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape[:2]

    def plane(self) -> np.ndarray:
        """Return the single channel of a gray image as a 2-D array."""
        if self.channels != 1:
            raise InputError("plane() needs a 1-channel image")
        return self.data[:, :, 0]

    def check_pipeline_size(self) -> None:
        if self.height < MIN_SIDE or self.width < MIN_SIDE:
            raise InputError(
                f"Image is {self.height}x{self.width}; the pipeline needs at least {MIN_SIDE}x{MIN_SIDE}"
            )

    @classmethod
    def from_mask(cls, mask: 'BinaryMask') -> 'RasterImage':
        return cls(mask.data.astype(IMAGE_DTYPE))


@dataclass(frozen=True, eq=False)
class BinaryMask:
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise InputError(f"Mask must be 2-D, got shape {data.shape}")
        if not np.all((data == 0) | (data == 1)):
            raise InputError("Mask values must be exactly 0 or 1")
        object.__setattr__(self, 'data', data.astype(np.uint8))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def positives(self) -> int:
        return int(self.data.sum())


@dataclass(frozen=True, eq=False)
class BoundaryMap:
    data: np.ndarray

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


def require_same_shape(a_shape, b_shape, what: str = "inputs") -> None:
    if tuple(a_shape) != tuple(b_shape):
        raise DimensionMismatchError(f"Shape mismatch between {what}: {tuple(a_shape)} vs {tuple(b_shape)}")


def flip_horizontal(image: RasterImage) -> RasterImage:
    return RasterImage(image.data[:, ::-1, :].copy())
