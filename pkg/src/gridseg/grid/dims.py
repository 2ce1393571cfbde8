import math
from dataclasses import dataclass

from gridseg.exceptions import GridTooSmallError, InputError


def round_half_up(value: float) -> int:
    """Round to nearest integer with halves going up (no banker's rounding)."""
    return int(math.floor(value + 0.5))


@dataclass(frozen=True)
class GridDims:
    rows: int
    cols: int

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"Grid dimensions must be positive, got {self.rows}x{self.cols}")

    @property
    def cells(self) -> int:
        return self.rows * self.cols


def aspect_dims(height: int, width: int, target_n: int) -> GridDims:
    """Aspect-preserving R x C with R*C close to target_n."""
    if target_n < 4:
        raise InputError(f"Superpixel count must be at least 4, got {target_n}")
    rows = max(2, round_half_up(math.sqrt(target_n * height / width)))
    cols = max(2, round_half_up(target_n / rows))
    return GridDims(rows, cols)


def choose_dims(height: int, width: int, target_n: int) -> GridDims:
    """Pick lattice dimensions for a height x width image.

    Rejects lattices that would leave fewer than two pixels per cell side.
    """
    dims = aspect_dims(height, width, target_n)
    if height < 2 * dims.rows or width < 2 * dims.cols:
        raise GridTooSmallError(
            f"Image {height}x{width} is too small for a {dims.rows}x{dims.cols} lattice "
            f"({target_n} superpixels requested)"
        )
    return dims


def seed_positions(extent: int, count: int):
    """Regular seed coordinates 0..extent-1 split into `count` intervals."""
    return [round_half_up(i * (extent - 1) / count) for i in range(count + 1)]
