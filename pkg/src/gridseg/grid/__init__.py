from .dims import GridDims, choose_dims
from .junctions import JunctionSet, place_and_relocate_junctions
from .paths import BoundaryPathSet, trace_paths
from .labeling import SuperpixelGrid, check_grid_invariants, label_cells, regular_grid
from .gridizer import gridize, grid_metadata, render_overlay, write_grid_metadata

__all__ = ['GridDims', 'choose_dims', 'JunctionSet', 'place_and_relocate_junctions',
           'BoundaryPathSet', 'trace_paths', 'SuperpixelGrid', 'check_grid_invariants',
           'label_cells', 'regular_grid', 'gridize', 'grid_metadata', 'render_overlay',
           'write_grid_metadata']
