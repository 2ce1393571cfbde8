from .network import GridsNet, LayerSpec
from .init import build_model, xavier_init
from .optimizer import TrainState, nadam_step
from .loss import bce_loss
from .serialization import load_model, save_model

__all__ = ['GridsNet', 'LayerSpec', 'build_model', 'xavier_init', 'TrainState', 'nadam_step',
           'bce_loss', 'load_model', 'save_model']
