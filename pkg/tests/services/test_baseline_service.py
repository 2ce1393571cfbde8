import numpy as np

from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.services.baseline_service import (
    baseline_dims,
    downsample_baseline,
    encode_baseline_pair,
    upsample_prediction,
)


def test_baseline_dims():
    dims = baseline_dims(300, 400, 950)
    assert (dims.rows, dims.cols) == (27, 35)


def test_constant_round_trip():
    img = RasterImage(np.full((60, 80, 3), 0.42))
    mask = BinaryMask(np.zeros((60, 80)))
    small, _ = downsample_baseline(img, mask, 48)
    back = upsample_prediction(small.data[:, :, :1], 60, 80)
    assert back.shape == (60, 80)
    np.testing.assert_allclose(back.data, 0.42, atol=1e-6)


def test_mask_stays_binary(square_pair):
    img, mask = square_pair
    _, small_mask = downsample_baseline(img, mask, 48)
    assert set(np.unique(small_mask.data)) <= {0, 1}
    assert small_mask.positives() > 0


def test_encoded_pair_matches_lowres(square_pair):
    img, mask = square_pair
    x, y = encode_baseline_pair(img, mask, 48)
    assert (x.rows, x.cols) == (6, 8)
    assert (y.rows, y.cols, y.channels) == (6, 8, 1)
    assert x.data.min() == 0.0 and x.data.max() == 1.0


def test_upsample_clamps():
    out = upsample_prediction(np.array([[0.0, 1.0], [1.0, 0.0]]), 9, 9)
    assert out.data.min() >= 0.0 and out.data.max() <= 1.0
