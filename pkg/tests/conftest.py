"""
Gridseg Test Configuration
==========================

This file contains common fixtures and configuration for the test suite.

Test Verification Strategy
-------------------------
1. Unit Tests:
   - Test individual functions (imaging, gridization, codec, network layers,
     metrics) in isolation on small hand-built arrays
   - Compare against closed-form values or brute-force enumeration

2. Integration Tests:
   - Run CLI command sequences (synth -> train -> predict -> eval) on tiny
     synthetic datasets in temporary directories

3. Slow Acceptance Runs:
   - Desk-scale training experiments are marked `slow` and only run when
     GRIDSEG_RUN_SLOW=1 is set
"""

import os

import numpy as np
import pytest

from gridseg.imaging.io import save_image, save_mask
from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.services.dataset_service import write_manifest


def pytest_collection_modifyitems(config, items):
    if os.getenv('GRIDSEG_RUN_SLOW') == '1':
        return
    skip_slow = pytest.mark.skip(reason="set GRIDSEG_RUN_SLOW=1 to run desk-scale experiments")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def temp_dir(tmp_path):
    """Create a temporary directory for test files."""
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_square_pair(height=48, width=64, top=12, left=16, size=20, value=0.9, background=0.1):
    """Gray-ish RGB image with one bright square and its mask."""
    img = np.full((height, width, 3), background)
    mask = np.zeros((height, width), dtype=np.uint8)
    img[top:top + size, left:left + size] = value
    mask[top:top + size, left:left + size] = 1
    return RasterImage(img), BinaryMask(mask)


@pytest.fixture
def square_pair():
    """Image with a bright square on a dark background plus its mask."""
    return make_square_pair()


@pytest.fixture
def noise_image(rng):
    """Smooth random RGB image."""
    coarse = rng.random((6, 8, 3))
    data = np.kron(coarse, np.ones((10, 10, 1)))
    data = 0.7 * data + 0.3 * rng.random(data.shape)
    return RasterImage(data)


@pytest.fixture
def tiny_dataset(temp_dir):
    """Three image/mask PNG pairs with a manifest; returns the manifest path."""
    entries = []
    for i in range(3):
        img, mask = make_square_pair(top=8 + 4 * i, left=10 + 3 * i, size=18 + 2 * i)
        save_image(img, temp_dir / f'img{i}.png')
        save_mask(mask, temp_dir / f'mask{i}.png')
        entries.append((f'img{i}.png', f'mask{i}.png'))
    manifest = temp_dir / 'manifest.txt'
    write_manifest(entries, manifest)
    return manifest
