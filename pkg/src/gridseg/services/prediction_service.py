"""Saliency prediction: encode, run the network, reconstruct.

Besides trained models, two stub predictors are available for oracle runs:
``stub:gt`` returns the encoded ground truth, ``stub:const=<v>`` a constant map.
"""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from gridseg.exceptions import ConfigError, InputError
from gridseg.grid.gridizer import gridize
from gridseg.grid.labeling import SuperpixelGrid
from gridseg.imaging.raster import BinaryMask, RasterImage
from gridseg.nn.network import GridsNet
from gridseg.nn.serialization import load_model
from gridseg.services.baseline_service import downsample_baseline, downsample_image, upsample_prediction
from gridseg.services.encoding_service import (
    GridTensor,
    encode_image,
    encode_label,
    minmax_normalize,
    reconstruct,
)

logger = logging.getLogger(__name__)

STUB_PREFIX = 'stub:'


class SaliencyPredictor(ABC):
    """Maps a normalized (R, C, 3) input to per-cell saliency in [0, 1]."""

    name: str = 'predictor'
    needs_ground_truth: bool = False

    @abstractmethod
    def predict_cells(self, x: GridTensor, label: Optional[GridTensor] = None) -> GridTensor:
        pass

    def parameter_count(self) -> Optional[int]:
        return None


class ModelPredictor(SaliencyPredictor):
    def __init__(self, model: GridsNet, name: str = 'model'):
        self.model = model
        self.name = name

    def predict_cells(self, x: GridTensor, label: Optional[GridTensor] = None) -> GridTensor:
        return GridTensor(self.model.predict(x.data))

    def parameter_count(self) -> Optional[int]:
        return self.model.count_parameters()


class GroundTruthStub(SaliencyPredictor):
    name = 'stub:gt'
    needs_ground_truth = True

    def predict_cells(self, x: GridTensor, label: Optional[GridTensor] = None) -> GridTensor:
        if label is None:
            raise InputError("stub:gt needs the ground truth mask")
        return label


class ConstantStub(SaliencyPredictor):
    def __init__(self, value: float):
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"Constant stub value must be in [0, 1], got {value}")
        self.value = value
        self.name = f'stub:const={value:g}'

    def predict_cells(self, x: GridTensor, label: Optional[GridTensor] = None) -> GridTensor:
        return GridTensor(np.full((x.rows, x.cols, 1), self.value, dtype=np.float32))


def load_predictor(spec: str) -> SaliencyPredictor:
    """`stub:gt`, `stub:const=<v>` or the path of a model file."""
    if spec.startswith(STUB_PREFIX):
        kind = spec[len(STUB_PREFIX):]
        if kind == 'gt':
            return GroundTruthStub()
        if kind.startswith('const='):
            try:
                return ConstantStub(float(kind[len('const='):]))
            except ValueError as e:
                raise ConfigError(f"Bad constant stub '{spec}'") from e
        raise ConfigError(f"Unknown stub model '{spec}'")
    return ModelPredictor(load_model(spec), Path(spec).stem)


def predict_saliency(predictor: SaliencyPredictor, image: RasterImage, target_n: int,
                     gt: Optional[BinaryMask] = None) -> Tuple[RasterImage, SuperpixelGrid]:
    """Gridize, encode, normalize, predict and reconstruct one image."""
    grid = gridize(image, target_n)
    x = minmax_normalize(encode_image(image, grid))
    label = encode_label(gt, grid) if gt is not None else None
    cells = predictor.predict_cells(x, label)
    return reconstruct(cells, grid), grid


def predict_baseline(predictor: SaliencyPredictor, image: RasterImage, target_n: int,
                     gt: Optional[BinaryMask] = None) -> RasterImage:
    """Downsample, predict at low resolution, upsample back to the image size."""
    if gt is not None:
        small, small_mask = downsample_baseline(image, gt, target_n)
        label = GridTensor(small_mask.data.astype(np.float32))
    else:
        small, label = downsample_image(image, target_n), None
    cells = predictor.predict_cells(minmax_normalize(GridTensor(small.data)), label)
    return upsample_prediction(cells.data.astype(np.float64), image.height, image.width)
