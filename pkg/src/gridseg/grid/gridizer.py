"""Image -> superpixel lattice."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from gridseg.grid.dims import choose_dims
from gridseg.grid.junctions import place_and_relocate_junctions
from gridseg.grid.labeling import SuperpixelGrid, label_cells
from gridseg.grid.paths import trace_paths
from gridseg.imaging.filters import boundary_map
from gridseg.imaging.raster import RasterImage

logger = logging.getLogger(__name__)

OVERLAY_COLOR = np.array([1.0, 0.0, 0.0])


def gridize(image: RasterImage, target_n: int) -> SuperpixelGrid:
    """Build a boundary-adherent R x C lattice with about `target_n` cells."""
    image.check_pipeline_size()
    bmap = boundary_map(image)
    dims = choose_dims(image.height, image.width, target_n)
    junctions = place_and_relocate_junctions(bmap, dims)
    paths = trace_paths(bmap, junctions)
    grid = label_cells(paths, dims, junctions)
    logger.debug("Gridized %dx%d image into %dx%d cells (fallback=%s)",
                 image.height, image.width, dims.rows, dims.cols, grid.fallback)
    return grid


def grid_metadata(grid: SuperpixelGrid, target_n: int = None) -> Dict[str, Any]:
    meta: Dict[str, Any] = {
        'rows': grid.dims.rows,
        'cols': grid.dims.cols,
        'cells': grid.dims.cells,
        'height': grid.height,
        'width': grid.width,
        'fallback': grid.fallback,
    }
    if target_n is not None:
        meta['requested'] = target_n
    if grid.paths is not None:
        meta['straight_segments'] = grid.paths.straight_segments
    if grid.junctions is not None:
        meta['junctions'] = [
            [[int(y), int(x)] for y, x in zip(row_y, row_x)]
            for row_y, row_x in zip(grid.junctions.ys, grid.junctions.xs)
        ]
    return meta


def write_grid_metadata(grid: SuperpixelGrid, path: Union[str, Path], target_n: int = None) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(grid_metadata(grid, target_n), f, indent=2)


def cell_boundaries(labels: np.ndarray) -> np.ndarray:
    """Pixels whose right or lower neighbour lies in another cell."""
    edge = np.zeros(labels.shape, dtype=bool)
    edge[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    edge[:-1, :] |= labels[:-1, :] != labels[1:, :]
    return edge


def render_overlay(image: RasterImage, grid: SuperpixelGrid) -> RasterImage:
    """Draw cell boundaries over the image for visual inspection."""
    rgb = image.data if image.channels == 3 else np.repeat(image.data, 3, axis=2)
    out = rgb.copy()
    out[cell_boundaries(grid.labels)] = OVERLAY_COLOR
    return RasterImage(out)
