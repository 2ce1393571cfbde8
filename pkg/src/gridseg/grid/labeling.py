"""Cell labeling of the gridized lattice."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import ndimage

from gridseg.grid.dims import GridDims, seed_positions
from gridseg.grid.junctions import JunctionSet
from gridseg.grid.paths import BoundaryPathSet

logger = logging.getLogger(__name__)

# 4-connectivity structuring element
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)

MAX_REPAIR_PASSES = 8


@dataclass(frozen=True, eq=False)
class SuperpixelGrid:
    dims: GridDims
    # (H, W) cell index r * C + c
    labels: np.ndarray
    fallback: bool = False
    junctions: Optional[JunctionSet] = field(default=None, compare=False)
    paths: Optional[BoundaryPathSet] = field(default=None, compare=False)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self):
        return self.labels.shape

    @property
    def row_index(self) -> np.ndarray:
        return self.labels // self.dims.cols

    @property
    def col_index(self) -> np.ndarray:
        return self.labels % self.dims.cols

    @property
    def cell_sizes(self) -> np.ndarray:
        """Pixel count |s_i| per cell, shape (R, C)."""
        counts = np.bincount(self.labels.ravel(), minlength=self.dims.cells)
        return counts.reshape(self.dims.rows, self.dims.cols)

    def flipped(self) -> 'SuperpixelGrid':
        """Mirror the grid left-right, renumbering columns c -> C-1-c."""
        rows = self.row_index[:, ::-1]
        cols = self.dims.cols - 1 - self.col_index[:, ::-1]
        return SuperpixelGrid(self.dims, (rows * self.dims.cols + cols).astype(np.int32), self.fallback)


def regular_labels(height: int, width: int, dims: GridDims) -> np.ndarray:
    """Rectangular partition cut by straight lines through the regular seeds."""
    ys = np.array(seed_positions(height, dims.rows)[1:-1])
    xs = np.array(seed_positions(width, dims.cols)[1:-1])
    rows = np.searchsorted(ys, np.arange(height), side='right')
    cols = np.searchsorted(xs, np.arange(width), side='right')
    return (rows[:, None] * dims.cols + cols[None, :]).astype(np.int32)


def regular_grid(height: int, width: int, dims: GridDims, fallback: bool = False) -> SuperpixelGrid:
    return SuperpixelGrid(dims, regular_labels(height, width, dims), fallback)


def cell_labels(paths: BoundaryPathSet, dims: GridDims) -> np.ndarray:
    """Cell index per pixel: rows below each horizontal path, columns right of each vertical one."""
    horizontal, vertical = paths.horizontal, paths.vertical
    height, width = vertical.shape[1], horizontal.shape[1]
    yy = np.arange(height)[None, :, None]
    xx = np.arange(width)[None, None, :]
    # Interior paths only; the last path is the image border
    rows = (horizontal[1:dims.rows, None, :] <= yy).sum(axis=0)
    cols = (vertical[1:dims.cols, :, None] <= xx).sum(axis=0)
    return (rows * dims.cols + cols).astype(np.int32)


def _neighbour_pairs(labels: np.ndarray) -> np.ndarray:
    """Unique unordered label pairs that touch through a 4-neighbour edge."""
    pairs = []
    for a, b in ((labels[:, :-1], labels[:, 1:]), (labels[:-1, :], labels[1:, :])):
        differ = a != b
        lo = np.minimum(a[differ], b[differ])
        hi = np.maximum(a[differ], b[differ])
        pairs.append(np.stack([lo, hi], axis=1))
    stacked = np.concatenate(pairs) if pairs else np.empty((0, 2), dtype=labels.dtype)
    return np.unique(stacked, axis=0)


def _touching_counts(labels: np.ndarray, component: np.ndarray) -> np.ndarray:
    """Count 4-adjacent pixel pairs between `component` and every label."""
    counts = np.zeros(int(labels.max()) + 1, dtype=np.int64)
    for shift_axis, offset in ((0, 1), (0, -1), (1, 1), (1, -1)):
        neighbour = np.roll(component, offset, axis=shift_axis)
        # Undo the wrap-around of np.roll
        if shift_axis == 0:
            neighbour[0 if offset == 1 else -1, :] = False
        else:
            neighbour[:, 0 if offset == 1 else -1] = False
        touching = neighbour & ~component
        counts += np.bincount(labels[touching], minlength=counts.size)
    return counts


def _lattice_close(a: np.ndarray, b: int, cols: int) -> np.ndarray:
    """Cells within one lattice step of cell `b`, diagonals included."""
    return (np.abs(a // cols - b // cols) <= 1) & (np.abs(a % cols - b % cols) <= 1)


def _repair_target(counts: np.ndarray, cols: int) -> Optional[int]:
    """Longest-border touching cell whose lattice neighbours include every other touching cell."""
    touching = np.flatnonzero(counts)
    candidates = [int(t) for t in touching if _lattice_close(touching, int(t), cols).all()]
    if not candidates:
        return None
    return max(candidates, key=lambda t: (counts[t], -t))


def repair_connectivity(labels: np.ndarray, dims: GridDims) -> int:
    """Merge every non-largest component of a cell into a touching cell.

    A fragment goes to the touching cell it shares the longest border with,
    among those that gain no adjacency to a non-neighbouring cell. Fragments
    without such a cell are left alone. Works in place; returns the number of
    reassigned fragments.
    """
    cells = dims.cells
    reassigned = 0
    for _ in range(MAX_REPAIR_PASSES):
        changed = 0
        slices = ndimage.find_objects(labels + 1, max_label=cells)
        for cell, sl in enumerate(slices):
            if sl is None:
                continue
            # Pad the bounding box by one pixel to see the neighbours
            sl = tuple(slice(max(0, s.start - 1), s.stop + 1) for s in sl)
            window = labels[sl]
            components, n = ndimage.label(window == cell, structure=FOUR_CONNECTED)
            if n <= 1:
                continue
            sizes = np.bincount(components.ravel())[1:]
            keep = int(np.argmax(sizes)) + 1
            for comp in range(1, n + 1):
                if comp == keep:
                    continue
                mask = components == comp
                counts = _touching_counts(window, mask)
                counts[cell] = 0
                target = _repair_target(counts, dims.cols)
                if target is None:
                    continue
                window[mask] = target
                changed += 1
        reassigned += changed
        if not changed:
            break
    return reassigned


def check_grid_invariants(labels: np.ndarray, dims: GridDims) -> List[str]:
    """Return a list of violated lattice invariants (empty when the grid is valid)."""
    problems = []
    cells = dims.cells
    if labels.min() < 0 or labels.max() >= cells:
        problems.append("label outside 0..R*C-1")
        return problems

    sizes = np.bincount(labels.ravel(), minlength=cells)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        problems.append(f"{empty.size} empty cells")

    for cell, sl in enumerate(ndimage.find_objects(labels + 1, max_label=cells)):
        if sl is None:
            continue
        _, n = ndimage.label(labels[sl] == cell, structure=FOUR_CONNECTED)
        if n > 1:
            problems.append(f"cell {cell} has {n} components")

    pairs = _neighbour_pairs(labels)
    r0, c0 = pairs[:, 0] // dims.cols, pairs[:, 0] % dims.cols
    r1, c1 = pairs[:, 1] // dims.cols, pairs[:, 1] % dims.cols
    far = (np.abs(r0 - r1) > 1) | (np.abs(c0 - c1) > 1)
    if far.any():
        problems.append(f"{int(far.sum())} adjacencies between non-neighbouring cells")

    present = set(map(tuple, pairs.tolist()))
    missing = 0
    for r in range(dims.rows):
        for c in range(dims.cols):
            k = r * dims.cols + c
            if c + 1 < dims.cols and (k, k + 1) not in present:
                missing += 1
            if r + 1 < dims.rows and (k, k + dims.cols) not in present:
                missing += 1
    if missing:
        problems.append(f"{missing} lattice neighbours do not touch")
    return problems


def label_cells(paths: BoundaryPathSet, dims: GridDims, junctions: Optional[JunctionSet] = None) -> SuperpixelGrid:
    """Turn boundary paths into a per-pixel cell map.

    Paths traced by `trace_paths` already bound valid cells; the repair pass
    and the regular fallback only act on lattices too fine for the straight
    stretches at junctions.
    """
    labels = cell_labels(paths, dims)
    height, width = labels.shape
    reassigned = repair_connectivity(labels, dims)
    if reassigned:
        logger.debug("Connectivity repair reassigned %d fragments", reassigned)

    problems = check_grid_invariants(labels, dims)
    if problems:
        logger.warning("Gridization fell back to a regular partition: %s", "; ".join(problems))
        return SuperpixelGrid(dims, regular_labels(height, width, dims), True, junctions, paths)
    return SuperpixelGrid(dims, labels, False, junctions, paths)
