"""
Gridify and Encode Command Tests
================================

Test Verification Strategy
-------------------------
- Run the commands through CliRunner on small generated images
- Verify the files each command writes and their formats
- Verify exit codes for missing and unusable inputs
"""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from gridseg.commands.cmd_encode import encode
from gridseg.commands.cmd_gridify import gridify
from gridseg.imaging.io import load_image, load_label_map, save_image, save_mask
from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.utils.tensor_codec import read_tensor


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def image_files(temp_dir, square_pair):
    img, mask = square_pair
    save_image(img, temp_dir / 'sq.png')
    save_mask(mask, temp_dir / 'sq_mask.png')
    return temp_dir / 'sq.png', temp_dir / 'sq_mask.png'


class TestGridify:
    def test_writes_labels_and_metadata(self, runner, image_files, temp_dir):
        image, _ = image_files
        out = temp_dir / 'out'
        result = runner.invoke(gridify, [str(image), '--n', '48', '--out', str(out), '--overlay'])
        assert result.exit_code == 0, result.output
        meta = json.loads((out / 'sq.grid.json').read_text())
        labels = load_label_map(out / 'sq.labels.pgm')
        assert labels.shape == (48, 64)
        assert len(np.unique(labels)) == meta['cells'] == meta['rows'] * meta['cols']
        assert load_image(out / 'sq.overlay.png').channels == 3
        assert 'Grid 6x8' in result.output

    def test_missing_image(self, runner, temp_dir):
        result = runner.invoke(gridify, [str(temp_dir / 'none.png'), '--out', str(temp_dir)])
        assert result.exit_code == 2

    def test_image_too_small(self, runner, temp_dir):
        save_image(RasterImage(np.zeros((20, 20))), temp_dir / 'small.png')
        result = runner.invoke(gridify, [str(temp_dir / 'small.png'), '--n', '950', '--out', str(temp_dir)])
        assert result.exit_code == 2
        assert 'too small' in result.output

    def test_unreadable_image(self, runner, temp_dir):
        (temp_dir / 'bad.png').write_bytes(b'garbage')
        result = runner.invoke(gridify, [str(temp_dir / 'bad.png'), '--out', str(temp_dir)])
        assert result.exit_code == 2


class TestEncode:
    def test_image_and_mask(self, runner, image_files, temp_dir):
        image, mask = image_files
        out = temp_dir / 'enc'
        result = runner.invoke(encode, [str(image), str(mask), '--n', '48', '--out', str(out)])
        assert result.exit_code == 0, result.output
        assert (out / 'sq.X.grdt').read_bytes()[:4] == b'GRDT'
        x = read_tensor(out / 'sq.X.grdt')
        y = read_tensor(out / 'sq.Y.grdt')
        assert x.shape == (6, 8, 3)
        assert y.shape == (6, 8, 1)
        assert set(np.unique(y.data)) <= {0.0, 1.0}
        assert load_image(out / 'sq.preview.png').shape == (48, 64)
        assert (out / 'sq.gt-preview.png').exists()

    def test_normalized_input(self, runner, image_files, temp_dir):
        image, _ = image_files
        result = runner.invoke(encode, [str(image), '--n', '48', '--out', str(temp_dir / 'enc'), '--normalize'])
        assert result.exit_code == 0, result.output
        x = read_tensor(temp_dir / 'enc' / 'sq.X.grdt')
        assert x.data.min() == 0.0 and x.data.max() == 1.0
        assert not (temp_dir / 'enc' / 'sq.Y.grdt').exists()

    def test_mask_size_mismatch(self, runner, image_files, temp_dir):
        image, _ = image_files
        save_mask(BinaryMask(np.zeros((10, 10))), temp_dir / 'wrong.png')
        result = runner.invoke(encode, [str(image), str(temp_dir / 'wrong.png'), '--out', str(temp_dir / 'enc')])
        assert result.exit_code == 2
