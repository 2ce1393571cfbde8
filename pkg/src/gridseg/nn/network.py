"""Fully convolutional residual network operating on encoded grids.

Layout: conv(in->F) + relu; ``blocks`` residual blocks of
bn-relu-conv-bn-relu-conv with an identity shortcut; bn-relu-conv(F->1);
sigmoid. Every convolution is 3x3, stride 1, zero padded, so the output has
the spatial shape of the input.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from gridseg.exceptions import DimensionMismatchError, NumericError
from gridseg.nn.constants import DEFAULT_BLOCKS, KERNEL_SIZE, PARAM_DTYPE
from gridseg.nn.layers import (
    batchnorm_backward,
    batchnorm_forward,
    conv3x3_backward,
    conv3x3_forward,
    relu_backward,
    relu_forward,
    sigmoid,
)
from gridseg.nn.loss import bce_logit_gradient, bce_loss

logger = logging.getLogger(__name__)

CONV_PARAMS = ('weight', 'bias')
BN_PARAMS = ('gamma', 'beta', 'running_mean', 'running_var')
RUNNING_STATS = ('running_mean', 'running_var')

Params = Dict[str, np.ndarray]


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str  # 'conv' or 'bn'
    in_channels: int
    out_channels: int

    def param_shapes(self) -> List[Tuple[str, tuple]]:
        if self.kind == 'conv':
            return [
                (f'{self.name}.weight', (KERNEL_SIZE, KERNEL_SIZE, self.in_channels, self.out_channels)),
                (f'{self.name}.bias', (self.out_channels,)),
            ]
        return [(f'{self.name}.{p}', (self.out_channels,)) for p in BN_PARAMS]


def build_layout(filters: int, blocks: int, in_channels: int) -> List[LayerSpec]:
    layout = [LayerSpec('conv_in', 'conv', in_channels, filters)]
    for i in range(blocks):
        prefix = f'block{i:02d}'
        layout += [
            LayerSpec(f'{prefix}.bn1', 'bn', filters, filters),
            LayerSpec(f'{prefix}.conv1', 'conv', filters, filters),
            LayerSpec(f'{prefix}.bn2', 'bn', filters, filters),
            LayerSpec(f'{prefix}.conv2', 'conv', filters, filters),
        ]
    layout += [
        LayerSpec('bn_out', 'bn', filters, filters),
        LayerSpec('conv_out', 'conv', filters, 1),
    ]
    return layout


def parameter_count(filters: int, blocks: int, in_channels: int = 3, trainable_only: bool = False) -> int:
    """Closed-form parameter total of the layout, without building it."""
    area = KERNEL_SIZE * KERNEL_SIZE
    bn = (2 if trainable_only else 4) * filters
    conv_in = area * in_channels * filters + filters
    block = 2 * (area * filters * filters + filters) + 2 * bn
    head = bn + area * filters + 1
    return conv_in + blocks * block + head


def _bn(h, params: Params, name: str, training: bool):
    return batchnorm_forward(
        h, params[f'{name}.gamma'], params[f'{name}.beta'],
        params[f'{name}.running_mean'], params[f'{name}.running_var'], training,
    )


def _conv(h, params: Params, name: str):
    return conv3x3_forward(h, params[f'{name}.weight'], params[f'{name}.bias'])


def residual_block_forward(h: np.ndarray, params: Params, prefix: str, training: bool):
    """bn-relu-conv-bn-relu-conv plus the block input."""
    cache = {}
    t, cache['bn1'] = _bn(h, params, f'{prefix}.bn1', training)
    t, cache['relu1'] = relu_forward(t)
    t, cache['conv1'] = _conv(t, params, f'{prefix}.conv1')
    t, cache['bn2'] = _bn(t, params, f'{prefix}.bn2', training)
    t, cache['relu2'] = relu_forward(t)
    t, cache['conv2'] = _conv(t, params, f'{prefix}.conv2')
    cache['prefix'] = prefix
    return t + h, cache


def residual_block_backward(dout: np.ndarray, cache) -> Tuple[np.ndarray, Params]:
    """Returns the gradient w.r.t. the block input and the block's parameter gradients."""
    prefix = cache['prefix']
    grads: Params = {}
    d, grads[f'{prefix}.conv2.weight'], grads[f'{prefix}.conv2.bias'] = conv3x3_backward(dout, cache['conv2'])
    d = relu_backward(d, cache['relu2'])
    d, grads[f'{prefix}.bn2.gamma'], grads[f'{prefix}.bn2.beta'] = batchnorm_backward(d, cache['bn2'])
    d, grads[f'{prefix}.conv1.weight'], grads[f'{prefix}.conv1.bias'] = conv3x3_backward(d, cache['conv1'])
    d = relu_backward(d, cache['relu1'])
    d, grads[f'{prefix}.bn1.gamma'], grads[f'{prefix}.bn1.beta'] = batchnorm_backward(d, cache['bn1'])
    # shortcut
    return d + dout, grads


def _check_finite(x: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(x)):
        raise NumericError(f"Non-finite values at {where}")


class GridsNet:
    """Residual FCNN with ``filters`` feature maps and ``blocks`` residual blocks.

    Parameters live in ``self.params`` keyed by ``<layer>.<param>`` in layout
    order. A fresh model holds zero weights; use ``xavier_init`` before training.
    """

    def __init__(self, filters: int = 32, blocks: int = DEFAULT_BLOCKS, in_channels: int = 3,
                 dtype=PARAM_DTYPE):
        if filters < 1 or blocks < 0 or in_channels < 1:
            raise ValueError(f"Invalid architecture filters={filters} blocks={blocks} in_channels={in_channels}")
        self.filters = filters
        self.blocks = blocks
        self.in_channels = in_channels
        self.dtype = np.dtype(dtype)
        self.layout = build_layout(filters, blocks, in_channels)
        self.params: Params = {}
        for spec in self.layout:
            for name, shape in spec.param_shapes():
                fill = 1.0 if name.endswith(('.gamma', '.running_var')) else 0.0
                self.params[name] = np.full(shape, fill, dtype=self.dtype)
        self._caches: Optional[dict] = None

    # -- introspection --------------------------------------------------

    def parameter_names(self, trainable_only: bool = False) -> List[str]:
        if not trainable_only:
            return list(self.params)
        return [n for n in self.params if not n.endswith(RUNNING_STATS)]

    def trainable(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in self.parameter_names(trainable_only=True):
            yield name, self.params[name]

    def count_parameters(self, trainable_only: bool = False) -> int:
        return int(sum(self.params[n].size for n in self.parameter_names(trainable_only)))

    @property
    def conv_layers(self) -> int:
        return sum(1 for spec in self.layout if spec.kind == 'conv')

    @property
    def receptive_field(self) -> int:
        """Theoretical receptive field side of one output unit."""
        return 1 + (KERNEL_SIZE - 1) * self.conv_layers

    def describe(self) -> dict:
        return {
            'filters': self.filters,
            'residual_blocks': self.blocks,
            'conv_layers': self.conv_layers,
            'batchnorm_layers': sum(1 for spec in self.layout if spec.kind == 'bn'),
            'pooling_layers': 0,
            'strided_layers': 0,
            'parameters': self.count_parameters(),
            'trainable_parameters': self.count_parameters(trainable_only=True),
            'receptive_field': self.receptive_field,
        }

    # -- state ----------------------------------------------------------

    def state_dict(self) -> Params:
        return {name: value.copy() for name, value in self.params.items()}

    def load_state_dict(self, state: Params) -> None:
        if list(state) != list(self.params):
            raise DimensionMismatchError("State dict does not match the model layout")
        for name, value in state.items():
            if value.shape != self.params[name].shape:
                raise DimensionMismatchError(f"{name}: expected {self.params[name].shape}, got {value.shape}")
            self.params[name] = np.array(value, dtype=self.dtype)

    def copy(self) -> 'GridsNet':
        return self.astype(self.dtype)

    def astype(self, dtype) -> 'GridsNet':
        clone = GridsNet(self.filters, self.blocks, self.in_channels, dtype)
        clone.load_state_dict(self.params)
        return clone

    # -- computation ----------------------------------------------------

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        """Saliency in (0, 1) of shape (N, H, W, 1) for input (N, H, W, in_channels).

        Training mode uses batch statistics, updates running statistics and
        records what ``backward`` needs.
        """
        x = np.asarray(x, dtype=self.dtype)
        if x.ndim != 4 or x.shape[3] != self.in_channels:
            raise DimensionMismatchError(f"Expected (N, H, W, {self.in_channels}) input, got {x.shape}")
        _check_finite(x, 'network input')
        p = self.params
        caches = {}

        h, caches['conv_in'] = _conv(x, p, 'conv_in')
        h, caches['relu_in'] = relu_forward(h)
        blocks = []
        for i in range(self.blocks):
            h, cache = residual_block_forward(h, p, f'block{i:02d}', training)
            blocks.append(cache)
        _check_finite(h, 'residual trunk output')
        caches['blocks'] = blocks

        h, caches['bn_out'] = _bn(h, p, 'bn_out', training)
        h, caches['relu_out'] = relu_forward(h)
        z, caches['conv_out'] = _conv(h, p, 'conv_out')
        _check_finite(z, 'network logits')

        self._caches = caches if training else None
        out = sigmoid(z).astype(self.dtype, copy=False)
        # keep outputs strictly inside (0, 1)
        tiny = np.finfo(self.dtype).tiny
        return np.clip(out, tiny, np.nextafter(self.dtype.type(1), self.dtype.type(0)))

    def backward(self, dlogits: np.ndarray) -> Tuple[Params, np.ndarray]:
        """Gradients w.r.t. all trainable parameters and the input, given d(loss)/d(logits)."""
        if self._caches is None:
            raise RuntimeError("backward() needs a preceding training-mode forward()")
        c = self._caches
        grads: Params = {}
        d, grads['conv_out.weight'], grads['conv_out.bias'] = conv3x3_backward(dlogits.astype(self.dtype), c['conv_out'])
        d = relu_backward(d, c['relu_out'])
        d, grads['bn_out.gamma'], grads['bn_out.beta'] = batchnorm_backward(d, c['bn_out'])
        for cache in reversed(c['blocks']):
            d, block_grads = residual_block_backward(d, cache)
            grads.update(block_grads)
        d = relu_backward(d, c['relu_in'])
        dx, grads['conv_in.weight'], grads['conv_in.bias'] = conv3x3_backward(d, c['conv_in'])
        self._caches = None
        return {name: grads[name] for name in self.parameter_names(trainable_only=True)}, dx

    def loss_and_gradients(self, x: np.ndarray, y: np.ndarray) -> Tuple[float, Params]:
        pred = self.forward(x, training=True)
        loss = bce_loss(pred, y)
        if not np.isfinite(loss):
            raise NumericError(f"Non-finite loss {loss}")
        grads, _ = self.backward(bce_logit_gradient(pred, y))
        return loss, grads

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Eval-mode forward of a single (H, W, K) grid tensor, returning (H, W)."""
        return self.forward(np.asarray(x)[None], training=False)[0, :, :, 0]
