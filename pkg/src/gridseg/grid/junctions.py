"""Seed placement and relocation of lattice junctions."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from gridseg.exceptions import GridTooSmallError
from gridseg.grid.dims import GridDims, seed_positions
from gridseg.imaging.raster import BoundaryMap

logger = logging.getLogger(__name__)

# Steps an interior path stays straight on each side of an interior junction
PIN_ARM = 2


@dataclass(frozen=True, eq=False)
class JunctionSet:
    # (R+1, C+1) integer arrays of junction coordinates
    ys: np.ndarray
    xs: np.ndarray

    @property
    def rows(self) -> int:
        return self.ys.shape[0] - 1

    @property
    def cols(self) -> int:
        return self.ys.shape[1] - 1

    def position(self, r: int, c: int) -> Tuple[int, int]:
        return int(self.ys[r, c]), int(self.xs[r, c])

    def is_ordered(self) -> bool:
        return bool(np.all(np.diff(self.xs, axis=1) > 0) and np.all(np.diff(self.ys, axis=0) > 0))


def window_half_sizes(height: int, width: int, dims: GridDims) -> Tuple[int, int]:
    """Half extent of the relocation windows, vertical then horizontal."""
    hy = max(0, (height - 1) // (2 * dims.rows) - 1)
    hx = max(0, (width - 1) // (2 * dims.cols) - 1)
    return hy, hx


def pin_arm(height: int, width: int, dims: GridDims) -> int:
    """Straight half length around interior junctions, shortened on very fine lattices."""
    spacing = min(
        int(np.diff(seed_positions(height, dims.rows)).min()),
        int(np.diff(seed_positions(width, dims.cols)).min()),
    )
    return min(PIN_ARM, spacing // 2)


def path_span_ok(gap_along, gap_across, pinned_ends, arm: int):
    """Whether a unit-step path can join two consecutive junctions of one path.

    `pinned_ends` counts the interior junctions among the two; the path runs
    straight for `arm` steps on each side of those.
    """
    return np.abs(gap_across) <= np.asarray(gap_along) - arm * np.asarray(pinned_ends)


def is_interior(r: int, c: int, dims: GridDims) -> int:
    return int(0 < r < dims.rows and 0 < c < dims.cols)


def regular_junctions(height: int, width: int, dims: GridDims) -> JunctionSet:
    ys = np.array(seed_positions(height, dims.rows), dtype=np.int64)
    xs = np.array(seed_positions(width, dims.cols), dtype=np.int64)
    yy, xx = np.meshgrid(ys, xs, indexing='ij')
    return JunctionSet(yy.copy(), xx.copy())


def _best_in_window(bmap: np.ndarray, y0: int, x0: int, ylo: int, yhi: int, xlo: int, xhi: int,
                    allowed: Optional[np.ndarray] = None) -> Tuple[int, int]:
    """Argmax of bmap in [ylo..yhi] x [xlo..xhi], restricted to `allowed` when given.

    Ties go to the smallest displacement from (y0, x0), then smallest y, then smallest x.
    """
    window = bmap[ylo:yhi + 1, xlo:xhi + 1]
    if allowed is None:
        allowed = np.ones(window.shape, dtype=bool)
    peak = window[allowed].max()
    cand_y, cand_x = np.nonzero((window == peak) & allowed)
    cand_y = cand_y + ylo
    cand_x = cand_x + xlo
    disp = (cand_y - y0) ** 2 + (cand_x - x0) ** 2
    # lexsort: last key is primary
    order = np.lexsort((cand_x, cand_y, disp))
    return int(cand_y[order[0]]), int(cand_x[order[0]])


def _reachable(dims: GridDims, r: int, c: int, cand_y: np.ndarray, cand_x: np.ndarray,
               ys: np.ndarray, xs: np.ndarray, seeds: JunctionSet, arm: int) -> np.ndarray:
    """Window positions from which the interior paths through (r, c) reach their neighbours.

    Left and upper neighbours are already placed. Right and lower neighbours
    are checked at their seeds, so every later junction can at least stay put.
    """
    ok = np.ones(cand_y.shape, dtype=bool)
    here = is_interior(r, c, dims)
    if 0 < r < dims.rows:
        if c > 0:
            pinned = here + is_interior(r, c - 1, dims)
            ok &= path_span_ok(cand_x - xs[r, c - 1], cand_y - ys[r, c - 1], pinned, arm)
        if c < dims.cols:
            pinned = here + is_interior(r, c + 1, dims)
            ok &= path_span_ok(seeds.xs[r, c + 1] - cand_x, seeds.ys[r, c + 1] - cand_y, pinned, arm)
    if 0 < c < dims.cols:
        if r > 0:
            pinned = here + is_interior(r - 1, c, dims)
            ok &= path_span_ok(cand_y - ys[r - 1, c], cand_x - xs[r - 1, c], pinned, arm)
        if r < dims.rows:
            pinned = here + is_interior(r + 1, c, dims)
            ok &= path_span_ok(seeds.ys[r + 1, c] - cand_y, seeds.xs[r + 1, c] - cand_x, pinned, arm)
    return ok


def place_and_relocate_junctions(bmap: BoundaryMap, dims: GridDims) -> JunctionSet:
    """Move regular seeds to the strongest boundary response in their window.

    Interior junctions search a 2-D window, border junctions slide along their
    border, corners stay fixed. Windows of neighbouring seeds are disjoint,
    so junction ordering survives relocation. Junctions are placed in
    row-major order and only take window positions that the paths to their
    neighbours can still reach (see `path_span_ok`).
    """
    height, width = bmap.shape
    if height < 2 * dims.rows or width < 2 * dims.cols:
        raise GridTooSmallError(
            f"Boundary map {height}x{width} is too small for a {dims.rows}x{dims.cols} lattice"
        )
    data = bmap.data
    seeds = regular_junctions(height, width, dims)
    ys = seeds.ys.copy()
    xs = seeds.xs.copy()
    hy, hx = window_half_sizes(height, width, dims)
    arm = pin_arm(height, width, dims)
    moved = 0

    for r in range(dims.rows + 1):
        for c in range(dims.cols + 1):
            y0, x0 = int(seeds.ys[r, c]), int(seeds.xs[r, c])
            on_row_border = r in (0, dims.rows)
            on_col_border = c in (0, dims.cols)
            if on_row_border and on_col_border:
                continue
            if on_row_border:
                ylo = yhi = y0
            else:
                ylo, yhi = max(0, y0 - hy), min(height - 1, y0 + hy)
            if on_col_border:
                xlo = xhi = x0
            else:
                xlo, xhi = max(0, x0 - hx), min(width - 1, x0 + hx)
            cand_y, cand_x = np.mgrid[ylo:yhi + 1, xlo:xhi + 1]
            allowed = _reachable(dims, r, c, cand_y, cand_x, ys, xs, seeds, arm)
            # the seed itself always qualifies
            allowed[y0 - ylo, x0 - xlo] = True
            y, x = _best_in_window(data, y0, x0, ylo, yhi, xlo, xhi, allowed)
            if (y, x) != (y0, x0):
                moved += 1
            ys[r, c], xs[r, c] = y, x

    logger.debug("Relocated %d of %d junctions (window %dx%d, arm %d)",
                 moved, ys.size, 2 * hy + 1, 2 * hx + 1, arm)
    return JunctionSet(ys, xs)
