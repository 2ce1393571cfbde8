from .cmd_gridify import gridify
from .cmd_encode import encode
from .cmd_train import train_model
from .cmd_predict import predict
from .cmd_eval import evaluate
from .cmd_synth import synth


__all__ = ['gridify', 'encode', 'train_model', 'predict', 'evaluate', 'synth']
