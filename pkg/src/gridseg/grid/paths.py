"""Maximum edge-strength paths through the junctions of the lattice.

Horizontal paths advance one column per move and change row by at most one;
vertical paths are traced the same way on the transposed boundary map.

Every interior path runs straight for a few steps on each side of every
interior junction it passes, so a horizontal and a vertical path cross
exactly once, at their shared junction. Between junctions a path is confined
to a corridor bounded by the halfway lines between the straight reference
paths of neighbouring rows, which keeps paths of the same family apart.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gridseg.grid.dims import GridDims, round_half_up
from gridseg.grid.junctions import JunctionSet, pin_arm
from gridseg.imaging.raster import BoundaryMap

logger = logging.getLogger(__name__)

# Predecessor offsets in tie-break order: straight, up, down
_STEPS = (0, -1, 1)


@dataclass(frozen=True, eq=False)
class BoundaryPathSet:
    # horizontal[r, x] is the row of path r at column x, shape (R+1, W)
    horizontal: np.ndarray
    # vertical[c, y] is the column of path c at row y, shape (C+1, H)
    vertical: np.ndarray
    # paths that fell back to their straight reference
    straight_segments: int = 0

    @property
    def rows(self) -> int:
        return self.horizontal.shape[0] - 1

    @property
    def cols(self) -> int:
        return self.vertical.shape[0] - 1


def best_segment(strength: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 start: int, end: int) -> Optional[np.ndarray]:
    """Monotone path of maximal summed strength from column 0 to the last column.

    Args:
        strength: (H, L) edge strengths; column i is the i-th step
        lo, hi: inclusive per-column row bounds of the corridor
        start: row at column 0
        end: row at column L-1

    Returns:
        Row index per column, or None when `end` cannot be reached inside the corridor.
    """
    height, length = strength.shape
    rows = np.arange(height)
    last = length - 1
    if not (lo[0] <= start <= hi[0]) or not (lo[last] <= end <= hi[last]):
        return None

    score = np.full(height, -np.inf)
    score[start] = strength[start, 0]
    choice = np.zeros((length, height), dtype=np.int8)

    for i in range(1, length):
        shifted = {
            0: score,
            -1: np.concatenate((score[1:], [-np.inf])),
            1: np.concatenate(([-np.inf], score[:-1])),
        }
        best = shifted[0].copy()
        step = np.zeros(height, dtype=np.int8)
        for s in _STEPS[1:]:
            better = shifted[s] > best
            best[better] = shifted[s][better]
            step[better] = s
        allowed = (rows >= lo[i]) & (rows <= hi[i]) & (np.abs(rows - end) <= last - i)
        score = np.where(allowed, best + strength[:, i], -np.inf)
        choice[i] = step

    if not np.isfinite(score[end]):
        return None

    path = np.empty(length, dtype=np.int64)
    y = end
    for i in range(last, -1, -1):
        path[i] = y
        y -= int(choice[i, y])
    return path


def path_score(strength: np.ndarray, path: np.ndarray) -> float:
    return float(strength[path, np.arange(len(path))].sum())


def straight_segment(start: int, end: int, length: int) -> np.ndarray:
    if length == 1:
        return np.array([start], dtype=np.int64)
    t = np.arange(length) / (length - 1)
    return np.array([round_half_up(start + (end - start) * v) for v in t], dtype=np.int64)


def reference_path(across: np.ndarray, along: np.ndarray, length: int, arm: int) -> np.ndarray:
    """Straight path through one row of junctions, flat for `arm` steps around interior ones.

    `across[k]`, `along[k]` locate junction k; the first and last junctions
    sit on the image border.
    """
    anchors = [(int(along[0]), int(across[0]))]
    for a, y in zip(along[1:-1], across[1:-1]):
        anchors.append((max(0, int(a) - arm), int(y)))
        anchors.append((min(length - 1, int(a) + arm), int(y)))
    anchors.append((int(along[-1]), int(across[-1])))

    path = np.empty(length, dtype=np.int64)
    for (a, ya), (b, yb) in zip(anchors, anchors[1:]):
        if b >= a:
            path[a:b + 1] = straight_segment(ya, yb, b - a + 1)
    return path


def _pinned_bounds(lo: np.ndarray, hi: np.ndarray, across: np.ndarray, along: np.ndarray, arm: int):
    """Narrow the corridor to the junction row on the straight stretches."""
    lo, hi = lo.copy(), hi.copy()
    length = lo.size
    for a, y in zip(along[1:-1], across[1:-1]):
        span = slice(max(0, int(a) - arm), min(length, int(a) + arm + 1))
        lo[span] = np.maximum(lo[span], y)
        hi[span] = np.minimum(hi[span], y)
    return lo, hi


def _trace_family(strength: np.ndarray, across: np.ndarray, along: np.ndarray, arm: int):
    """Trace all paths of one family.

    `strength` is indexed [across, along]; junction k of path r sits at
    (across[r, k], along[r, k]). Returns (paths, straight_count).
    """
    extent, length = strength.shape
    count = across.shape[0] - 1
    paths = np.empty((count + 1, length), dtype=np.int64)
    paths[0] = 0
    paths[count] = extent - 1
    if count < 2:
        return paths, 0

    references = {r: reference_path(across[r], along[r], length, arm) for r in range(1, count)}
    # separators[r] lies between path r and path r + 1
    separators = {0: np.zeros(length, dtype=np.int64), count - 1: np.full(length, extent - 1, dtype=np.int64)}
    for r in range(1, count - 1):
        separators[r] = (references[r] + references[r + 1]) // 2
    straight = 0

    for r in range(1, count):
        lo, hi = _pinned_bounds(separators[r - 1] + 1, separators[r] - 1, across[r], along[r], arm)
        top, bottom = int(lo.min()), int(hi.max())
        path = None
        if top <= bottom:
            window = strength[top:bottom + 1]
            path = best_segment(window, lo - top, hi - top, int(across[r, 0]) - top, int(across[r, -1]) - top)
        if path is None:
            straight += 1
            logger.debug("Straight fallback for path %d", r)
            paths[r] = references[r]
        else:
            paths[r] = path + top
    return paths, straight


def trace_paths(bmap: BoundaryMap, junctions: JunctionSet) -> BoundaryPathSet:
    """Connect neighbouring junctions by maximum edge-strength paths.

    Border paths coincide with the image border.
    """
    data = bmap.data
    height, width = data.shape
    arm = pin_arm(height, width, GridDims(junctions.rows, junctions.cols))
    horizontal, straight_h = _trace_family(data, junctions.ys, junctions.xs, arm)
    vertical, straight_v = _trace_family(data.T, junctions.xs.T, junctions.ys.T, arm)
    if straight_h or straight_v:
        logger.info("%d paths fell back to straight lines", straight_h + straight_v)
    return BoundaryPathSet(horizontal, vertical, straight_h + straight_v)
