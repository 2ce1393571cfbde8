"""Nesterov-accelerated Adam."""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from gridseg.exceptions import DimensionMismatchError, NumericError
from gridseg.nn.constants import DEFAULT_LEARNING_RATE, NADAM_BETA1, NADAM_BETA2, NADAM_EPS

logger = logging.getLogger(__name__)


@dataclass
class TrainState:
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = NADAM_BETA1
    beta2: float = NADAM_BETA2
    eps: float = NADAM_EPS
    # number of completed steps
    t: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def nadam_step(state: TrainState, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> TrainState:
    """Apply one update to every parameter in `grads`, in place.

    The whole step is rejected, leaving parameters and moments untouched,
    if any gradient is non-finite.
    """
    for name, g in grads.items():
        if g.shape != params[name].shape:
            raise DimensionMismatchError(f"Gradient {name} has shape {g.shape}, parameter {params[name].shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"Non-finite gradient for {name} at step {state.t + 1}")

    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    m_corr = 1.0 - b1 ** (t + 1)
    g_corr = 1.0 - b1 ** t
    v_corr = 1.0 - b2 ** t

    for name, g in grads.items():
        g64 = g.astype(np.float64)
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(g64)
            v = np.zeros_like(g64)
        m = b1 * m + (1.0 - b1) * g64
        v = b2 * v + (1.0 - b2) * g64 * g64
        m_hat = m / m_corr
        v_hat = v / v_corr
        update = state.learning_rate * (b1 * m_hat + (1.0 - b1) * g64 / g_corr) / (np.sqrt(v_hat) + state.eps)
        param = params[name]
        params[name] = (param.astype(np.float64) - update).astype(param.dtype)
        state.m[name] = m
        state.v[name] = v

    state.t = t
    return state
