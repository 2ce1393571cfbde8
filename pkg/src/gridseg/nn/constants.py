"""Numerical constants of the network engine."""

import numpy as np

PARAM_DTYPE = np.float32

# Batch normalization
BN_EPS = 1e-5
BN_MOMENTUM = 0.99

# Binary cross-entropy clamps predictions to [BCE_CLAMP, 1 - BCE_CLAMP]
BCE_CLAMP = 1e-7

# Nadam
NADAM_BETA1 = 0.9
NADAM_BETA2 = 0.999
NADAM_EPS = 1e-8
DEFAULT_LEARNING_RATE = 0.002

DEFAULT_BLOCKS = 13
KERNEL_SIZE = 3
