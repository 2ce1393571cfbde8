import json

import numpy as np
import pytest

from gridseg.grid.dims import GridDims, choose_dims
from gridseg.grid.gridizer import cell_boundaries, grid_metadata, gridize, render_overlay, write_grid_metadata
from gridseg.grid.junctions import place_and_relocate_junctions
from gridseg.grid.labeling import (
    cell_labels,
    check_grid_invariants,
    regular_grid,
    regular_labels,
    repair_connectivity,
)
from gridseg.grid.paths import trace_paths
from gridseg.imaging.filters import boundary_map
from gridseg.imaging.raster import RasterImage
from gridseg.services.synthetic_service import synthesize


class TestRegularPartition:
    def test_partition_bands(self):
        labels = regular_labels(60, 80, GridDims(3, 4))
        assert labels.shape == (60, 80)
        assert set(np.unique(labels)) == set(range(12))
        assert check_grid_invariants(labels, GridDims(3, 4)) == []

    def test_band_heights_nearly_equal(self):
        grid = regular_grid(97, 53, GridDims(7, 5))
        assert grid.cell_sizes.sum() == 97 * 53
        row_heights = np.bincount(grid.row_index[:, 0])
        assert row_heights.size == 7
        assert row_heights.max() - row_heights.min() <= 2


class TestInvariantChecker:
    def test_detects_empty_cell(self):
        dims = GridDims(2, 2)
        labels = regular_labels(20, 20, dims)
        labels[labels == 3] = 2
        assert any('empty' in p for p in check_grid_invariants(labels, dims))

    def test_detects_split_cell(self):
        dims = GridDims(3, 3)
        labels = regular_labels(30, 30, dims)
        labels[25, 25] = 0
        problems = check_grid_invariants(labels, dims)
        assert any('components' in p for p in problems)
        assert any('non-neighbouring' in p for p in problems)

    def test_detects_out_of_range(self):
        labels = np.full((10, 10), 7)
        assert check_grid_invariants(labels, GridDims(2, 2))


class TestRepair:
    def test_stray_pixel_joins_surrounding_cell(self):
        dims = GridDims(2, 2)
        labels = regular_labels(20, 20, dims).astype(np.int32)
        labels[15, 15] = 0
        reassigned = repair_connectivity(labels, dims)
        assert reassigned == 1
        assert labels[15, 15] == 3
        assert check_grid_invariants(labels, dims) == []

    def test_valid_labels_untouched(self):
        dims = GridDims(3, 3)
        labels = regular_labels(30, 30, dims).astype(np.int32)
        before = labels.copy()
        assert repair_connectivity(labels, dims) == 0
        np.testing.assert_array_equal(labels, before)

    def test_fragment_skips_target_that_would_touch_distant_cells(self):
        dims = GridDims(3, 3)
        labels = regular_labels(30, 30, dims).astype(np.int32)
        # bands: rows 0-9, 10-18, 19-29; a strip of cell 2 down the left edge
        # touches cell 0 most, but cell 0 would then touch cell 6
        labels[1:21, 0] = 2
        assert repair_connectivity(labels, dims) == 1
        assert np.all(labels[1:21, 0] == 3)
        assert check_grid_invariants(labels, dims) == []


class TestGridize:
    def test_constant_image_is_regular(self):
        img = RasterImage(np.full((60, 80, 3), 0.5))
        grid = gridize(img, 48)
        assert not grid.fallback
        np.testing.assert_array_equal(grid.labels, regular_labels(60, 80, grid.dims))
        assert grid.paths.straight_segments == 0
        assert np.all(np.diff(grid.paths.horizontal, axis=1) == 0)

    def test_reported_cell_count(self):
        grid = gridize(RasterImage(np.full((300, 400), 0.2)), 950)
        assert (grid.dims.rows, grid.dims.cols) == (27, 35)
        assert grid.dims.cells == 945
        assert len(np.unique(grid.labels)) == 945

    def test_deterministic(self, noise_image):
        a = gridize(noise_image, 48)
        b = gridize(noise_image, 48)
        np.testing.assert_array_equal(a.labels, b.labels)
        assert a.fallback == b.fallback

    def test_invariants_on_random_images(self, rng):
        for _ in range(20):
            coarse = rng.random((8, 8, 3))
            data = np.clip(np.kron(coarse, np.ones((16, 16, 1))) + 0.1 * rng.standard_normal((128, 128, 3)), 0, 1)
            grid = gridize(RasterImage(data), 200)
            assert not grid.fallback
            assert check_grid_invariants(grid.labels, grid.dims) == []
            assert grid.cell_sizes.sum() == 128 * 128
            assert grid.cell_sizes.min() >= 1

    def test_traced_lattice_on_synthetic_images(self):
        rng = np.random.default_rng(21)
        kept = 0
        for _ in range(10):
            sample = synthesize(rng, thin=True)
            grid = gridize(sample.image, 950)
            assert check_grid_invariants(grid.labels, grid.dims) == []
            kept += not grid.fallback
        assert kept >= 9

    def test_traced_labels_need_no_repair(self, noise_image):
        bmap = boundary_map(noise_image)
        dims = choose_dims(noise_image.height, noise_image.width, 48)
        paths = trace_paths(bmap, place_and_relocate_junctions(bmap, dims))
        labels = cell_labels(paths, dims)
        assert check_grid_invariants(labels, dims) == []
        assert repair_connectivity(labels.copy(), dims) == 0

    def test_rectangle_edges_lie_on_cell_boundaries(self):
        data = np.full((120, 160), 0.1)
        data[30:90, 40:120] = 0.9
        grid = gridize(RasterImage(data), 400)
        labels = grid.labels
        hits = []
        for x in range(44, 116):
            for edge in (30, 90):
                hits.append(any(labels[y - 1, x] != labels[y, x] for y in (edge - 1, edge, edge + 1)))
        for y in range(34, 86):
            for edge in (40, 120):
                hits.append(any(labels[y, x - 1] != labels[y, x] for x in (edge - 1, edge, edge + 1)))
        assert np.mean(hits) >= 0.95

    def test_flipped_grid_mirrors_columns(self, noise_image):
        grid = gridize(noise_image, 48)
        flipped = grid.flipped()
        np.testing.assert_array_equal(flipped.row_index, grid.row_index[:, ::-1])
        np.testing.assert_array_equal(flipped.col_index, grid.dims.cols - 1 - grid.col_index[:, ::-1])


class TestMetadataAndOverlay:
    def test_metadata(self, noise_image, temp_dir):
        grid = gridize(noise_image, 48)
        meta = grid_metadata(grid, 48)
        assert meta['rows'] == grid.dims.rows and meta['cols'] == grid.dims.cols
        assert meta['requested'] == 48
        assert meta['fallback'] == grid.fallback
        assert len(meta['junctions']) == grid.dims.rows + 1
        assert len(meta['junctions'][0]) == grid.dims.cols + 1
        write_grid_metadata(grid, temp_dir / 'g.json', 48)
        assert json.loads((temp_dir / 'g.json').read_text())['cells'] == grid.dims.cells

    def test_overlay_marks_boundaries(self, noise_image):
        grid = gridize(noise_image, 48)
        overlay = render_overlay(noise_image, grid)
        edges = cell_boundaries(grid.labels)
        assert overlay.channels == 3
        np.testing.assert_array_equal(overlay.data[edges], np.tile([1.0, 0.0, 0.0], (edges.sum(), 1)))
        np.testing.assert_array_equal(overlay.data[~edges], noise_image.data[~edges])

    def test_gray_overlay_is_rgb(self):
        img = RasterImage(np.full((40, 40), 0.3))
        overlay = render_overlay(img, gridize(img, 16))
        assert overlay.channels == 3


@pytest.mark.parametrize('n', [100, 400])
def test_cell_count_matches_dims(noise_image, n):
    grid = gridize(noise_image, n)
    assert grid.cell_sizes.shape == (grid.dims.rows, grid.dims.cols)
