from .raster import (
    BinaryMask,
    BoundaryMap,
    MIN_SIDE,
    RasterImage,
    flip_horizontal,
    require_same_shape,
)
from .io import load_image, load_label_map, load_mask, save_image, save_label_map, save_mask
from .filters import boundary_map, to_grayscale
from .resample import resize_bicubic

__all__ = ['BinaryMask', 'BoundaryMap', 'MIN_SIDE', 'RasterImage', 'flip_horizontal',
           'require_same_shape', 'load_image', 'load_label_map', 'load_mask', 'save_image',
           'save_label_map', 'save_mask', 'boundary_map', 'to_grayscale', 'resize_bicubic']
