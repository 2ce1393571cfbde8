"""Image file I/O for PNG and binary PPM/PGM."""

import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from gridseg.exceptions import ImageReadError, InputError, UnsupportedImageError
from gridseg.imaging.raster import BinaryMask, RasterImage

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# Pillow modes that are not 8 bits per sample
_WIDE_MODES = {'I', 'I;16', 'I;16B', 'I;16L', 'I;16N', 'F'}

# Pillow modes converted to RGB / L on load
_TO_RGB = {'RGBA', 'RGBX', 'P', 'PA', 'CMYK', 'YCbCr', 'LAB', 'HSV'}
_TO_GRAY = {'1', 'LA', 'La'}

_PNM_MAGIC = {b'P2', b'P3', b'P5', b'P6'}
_PNM_HEADER_BYTES = 512

_FORMATS = {'.png': 'PNG', '.ppm': 'PPM', '.pgm': 'PPM', '.pnm': 'PPM'}


def _pnm_maxval(path: PathLike) -> Optional[int]:
    """Sample maximum from a gray or color PNM header, None for other files."""
    with open(path, 'rb') as f:
        head = f.read(_PNM_HEADER_BYTES)
    if head[:2] not in _PNM_MAGIC:
        return None
    tokens = re.sub(rb'#[^\n]*', b' ', head[2:]).split()[:3]
    if len(tokens) < 3 or not all(t.isdigit() for t in tokens):
        return None
    return int(tokens[2])


def _rawmode(tile) -> str:
    args = tile[3]
    if isinstance(args, tuple):
        args = args[0] if args else ''
    return args if isinstance(args, str) else ''


def _require_eight_bit(im: Image.Image, path: PathLike) -> None:
    # 16-bit color PNGs open as plain RGB and are only narrowed by the decoder
    wide = [m for m in map(_rawmode, im.tile) if ';16' in m or ';32' in m]
    if wide:
        raise UnsupportedImageError(f"Unsupported bit depth ({wide[0]}) in {path}; only 8-bit images are read")


def _open(path: PathLike, eight_bit: bool = False) -> Image.Image:
    try:
        if eight_bit:
            maxval = _pnm_maxval(path)
            if maxval is not None and maxval > 255:
                raise UnsupportedImageError(
                    f"Unsupported sample maximum {maxval} in {path}; only 8-bit images are read"
                )
        with Image.open(path) as im:
            if eight_bit:
                _require_eight_bit(im, path)
            im.load()
            return im.copy()
    except FileNotFoundError as e:
        raise ImageReadError(f"Image file not found: {path}") from e
    except (UnidentifiedImageError, OSError, SyntaxError) as e:
        raise ImageReadError(f"Cannot read image {path}: {e}") from e


def _to_array(im: Image.Image, path: PathLike) -> np.ndarray:
    if im.mode in _WIDE_MODES:
        raise UnsupportedImageError(f"Unsupported bit depth ({im.mode}) in {path}; only 8-bit images are read")
    if im.mode in _TO_RGB:
        im = im.convert('RGB')
    elif im.mode in _TO_GRAY:
        im = im.convert('L')
    if im.mode not in ('L', 'RGB'):
        raise UnsupportedImageError(f"Unsupported image mode {im.mode} in {path}")
    if im.width == 0 or im.height == 0:
        raise ImageReadError(f"Image {path} has zero size")
    return np.asarray(im, dtype=np.uint8)


def load_image(path: PathLike) -> RasterImage:
    """Load an 8-bit gray or color image, scaling samples to [0, 1]."""
    arr = _to_array(_open(path, eight_bit=True), path)
    logger.debug("Loaded %s: %s", path, arr.shape)
    return RasterImage(arr.astype(np.float64) / 255.0)


def load_mask(path: PathLike) -> BinaryMask:
    """Load a ground-truth mask; pixels with scaled value >= 0.5 are salient."""
    im = _open(path, eight_bit=True)
    arr = _to_array(im, path)
    if arr.ndim == 3:
        # Color-encoded masks are read through their luma
        arr = np.asarray(Image.fromarray(arr).convert('L'), dtype=np.uint8)
    # 128/255 is the first 8-bit level at or above one half
    return BinaryMask((arr >= 128).astype(np.uint8))


def _format_for(path: PathLike) -> str:
    suffix = Path(path).suffix.lower()
    if suffix not in _FORMATS:
        raise InputError(f"Unsupported output format '{suffix}' for {path}; use .png, .ppm or .pgm")
    return _FORMATS[suffix]


def quantize(data: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to 8-bit levels round(v * 255)."""
    return np.clip(np.floor(np.asarray(data, dtype=np.float64) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def save_image(image: RasterImage, path: PathLike) -> None:
    arr = quantize(image.data)
    if image.channels == 1:
        pil = Image.fromarray(arr[:, :, 0])
    else:
        pil = Image.fromarray(arr)
    pil.save(path, format=_format_for(path))


def save_mask(mask: BinaryMask, path: PathLike) -> None:
    Image.fromarray(mask.data * np.uint8(255)).save(path, format=_format_for(path))


def save_label_map(labels: np.ndarray, path: PathLike) -> None:
    """Write a cell-index map as a 16-bit binary PGM."""
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() > 65535:
        raise InputError("Label map values must fit in 16 bits")
    Image.fromarray(labels.astype(np.int32)).save(path, format='PPM')


def load_label_map(path: PathLike) -> np.ndarray:
    im = _open(path)
    return np.asarray(im, dtype=np.int64)
