import logging
import math

import numpy as np

from gridseg.nn.constants import KERNEL_SIZE
from gridseg.nn.network import GridsNet

logger = logging.getLogger(__name__)


def xavier_bound(in_channels: int, out_channels: int) -> float:
    """Half-width of the uniform Xavier range for a 3x3 convolution."""
    area = KERNEL_SIZE * KERNEL_SIZE
    return math.sqrt(6.0 / (area * in_channels + area * out_channels))


def xavier_init(model: GridsNet, seed: int) -> GridsNet:
    """Uniform Xavier weights, zero biases, unit/zero batchnorm parameters.

    Layers draw from one generator in layout order, so the result depends
    only on the seed.
    """
    rng = np.random.default_rng(seed)
    for spec in model.layout:
        if spec.kind == 'conv':
            bound = xavier_bound(spec.in_channels, spec.out_channels)
            shape = model.params[f'{spec.name}.weight'].shape
            model.params[f'{spec.name}.weight'] = rng.uniform(-bound, bound, size=shape).astype(model.dtype)
            model.params[f'{spec.name}.bias'][...] = 0
        else:
            model.params[f'{spec.name}.gamma'][...] = 1
            model.params[f'{spec.name}.beta'][...] = 0
            model.params[f'{spec.name}.running_mean'][...] = 0
            model.params[f'{spec.name}.running_var'][...] = 1
    logger.debug("Initialized %d parameters with seed %d", model.count_parameters(), seed)
    return model


def build_model(filters: int, blocks: int, seed: int, in_channels: int = 3) -> GridsNet:
    return xavier_init(GridsNet(filters, blocks, in_channels), seed)
