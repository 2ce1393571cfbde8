"""Synthetic single-object datasets for desk-scale training and evaluation.

Each image has a smooth background (linear gradient plus value noise) and a
salient object made of one or two overlapping convex shapes. In one channel
the object differs from the local background by a fixed offset of 0.35-0.45.
With ``thin=True`` the object also carries narrow bars a few pixels wide.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from PIL import Image, ImageDraw

from gridseg.exceptions import InputError
from gridseg.imaging.io import save_image, save_mask
from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.imaging.resample import resize_plane
from gridseg.services.dataset_service import DatasetManifest, write_manifest

logger = logging.getLogger(__name__)

MIN_SIDE = 192
MAX_SIDE = 320
MIN_AREA = 0.05
MAX_AREA = 0.5
MIN_OFFSET = 0.35
MAX_OFFSET = 0.45
BACKGROUND_SPREAD = 0.2
MAX_ATTEMPTS = 200

MANIFEST_NAME = 'manifest.txt'


@dataclass(frozen=True, eq=False)
class SyntheticSample:
    image: RasterImage
    mask: BinaryMask
    background: np.ndarray
    channel: int
    offset: float


def _smooth_field(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """Low-frequency field in [0, 1]: a random linear ramp mixed with value noise."""
    angle = rng.uniform(0, 2 * math.pi)
    yy, xx = np.mgrid[0:height, 0:width]
    ramp = math.cos(angle) * yy / height + math.sin(angle) * xx / width
    coarse = rng.random((rng.integers(4, 9), rng.integers(4, 9)))
    noise = resize_plane(coarse, height, width)
    field = 0.6 * ramp + 0.4 * noise
    lo, hi = field.min(), field.max()
    return (field - lo) / (hi - lo) if hi > lo else np.zeros_like(field)


def _background(rng: np.random.Generator, height: int, width: int, channel: int, sign: float) -> np.ndarray:
    planes = []
    for k in range(3):
        if k == channel:
            # leaves room for the object offset inside [0, 1]
            base = rng.uniform(0.05, 0.3) if sign > 0 else rng.uniform(0.5, 0.75)
        else:
            base = rng.uniform(0.1, 0.7)
        planes.append(base + BACKGROUND_SPREAD * _smooth_field(rng, height, width))
    return np.stack(planes, axis=2)


def _ellipse(rng: np.random.Generator, cy: float, cx: float, scale: float) -> List[Tuple[float, float]]:
    ry = scale * rng.uniform(0.5, 1.0)
    rx = scale * rng.uniform(0.5, 1.0)
    theta = rng.uniform(0, math.pi)
    t = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    ey, ex = ry * np.sin(t), rx * np.cos(t)
    ys = cy + ey * math.cos(theta) - ex * math.sin(theta)
    xs = cx + ey * math.sin(theta) + ex * math.cos(theta)
    return list(zip(xs.tolist(), ys.tolist()))


def _polygon(rng: np.random.Generator, cy: float, cx: float, scale: float) -> List[Tuple[float, float]]:
    """Convex polygon: vertices at sorted angles on one circle."""
    count = int(rng.integers(3, 9))
    angles = np.sort(rng.uniform(0, 2 * math.pi, count))
    radius = scale * rng.uniform(0.6, 1.0)
    return list(zip((cx + radius * np.cos(angles)).tolist(), (cy + radius * np.sin(angles)).tolist()))


def _bar(rng: np.random.Generator, cy: float, cx: float, side: int) -> List[Tuple[float, float]]:
    """Thin rotated rectangle starting at (cy, cx)."""
    length = side * rng.uniform(0.25, 0.45)
    half_width = rng.uniform(1.5, 3.0)
    theta = rng.uniform(0, 2 * math.pi)
    dy, dx = math.sin(theta), math.cos(theta)
    ny, nx = -dx * half_width, dy * half_width
    ey, ex = cy + dy * length, cx + dx * length
    return [(cx + nx, cy + ny), (ex + nx, ey + ny), (ex - nx, ey - ny), (cx - nx, cy - ny)]


def _object_mask(rng: np.random.Generator, height: int, width: int, thin: bool) -> np.ndarray:
    side = min(height, width)
    canvas = Image.new('L', (width, height), 0)
    draw = ImageDraw.Draw(canvas)
    cy = rng.uniform(0.3, 0.7) * height
    cx = rng.uniform(0.3, 0.7) * width
    scale = side * rng.uniform(0.15, 0.35)
    shapes = [_ellipse if rng.random() < 0.5 else _polygon]
    if rng.random() < 0.5:
        shapes.append(_ellipse if rng.random() < 0.5 else _polygon)
    for i, make in enumerate(shapes):
        if i == 0:
            draw.polygon(make(rng, cy, cx, scale), fill=1)
        else:
            # second shape overlaps the first
            oy = cy + rng.uniform(-0.7, 0.7) * scale
            ox = cx + rng.uniform(-0.7, 0.7) * scale
            draw.polygon(make(rng, oy, ox, scale * rng.uniform(0.5, 0.9)), fill=1)
    if thin:
        for _ in range(int(rng.integers(1, 4))):
            draw.polygon(_bar(rng, cy, cx, side), fill=1)
    return np.asarray(canvas, dtype=np.uint8)


def synthesize(rng: np.random.Generator, thin: bool = False) -> SyntheticSample:
    """Draw one image/mask pair."""
    height = int(rng.integers(MIN_SIDE, MAX_SIDE + 1))
    width = int(rng.integers(MIN_SIDE, MAX_SIDE + 1))
    channel = int(rng.integers(0, 3))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    offset = float(rng.uniform(MIN_OFFSET, MAX_OFFSET))
    background = _background(rng, height, width, channel, sign)

    for _ in range(MAX_ATTEMPTS):
        mask = _object_mask(rng, height, width, thin)
        if MIN_AREA <= mask.mean() <= MAX_AREA:
            break
    else:
        raise InputError("Could not place an object with a valid area fraction")

    image = background.copy()
    inside = mask.astype(bool)
    image[inside, channel] = background[inside, channel] + sign * offset
    for k in range(3):
        if k != channel:
            # object tint in the remaining channels
            image[inside, k] = np.clip(background[inside, k] + rng.uniform(-0.2, 0.2), 0.0, 1.0)
    return SyntheticSample(RasterImage(np.clip(image, 0.0, 1.0)), BinaryMask(mask), background, channel, offset)


def generate_synthetic(count: int, seed: int, out_dir: Union[str, Path], thin: bool = False) -> DatasetManifest:
    """Write `count` image/mask PNG pairs and a manifest under `out_dir`.

    Image i depends only on (seed, i).
    """
    if count < 1:
        raise InputError(f"Sample count must be at least 1, got {count}")
    out_dir = Path(out_dir)
    (out_dir / 'images').mkdir(parents=True, exist_ok=True)
    (out_dir / 'masks').mkdir(parents=True, exist_ok=True)

    children = np.random.SeedSequence(seed).spawn(count)
    entries = []
    for i, child in enumerate(children):
        sample = synthesize(np.random.default_rng(child), thin)
        image_rel = f'images/{i:05d}.png'
        mask_rel = f'masks/{i:05d}.png'
        save_image(sample.image, out_dir / image_rel)
        save_mask(sample.mask, out_dir / mask_rel)
        entries.append((image_rel, mask_rel))

    manifest_path = out_dir / MANIFEST_NAME
    write_manifest(entries, manifest_path)
    logger.info("Generated %d synthetic pairs in %s", count, out_dir)
    return DatasetManifest([(out_dir / a, out_dir / b) for a, b in entries], 'train', str(manifest_path))
