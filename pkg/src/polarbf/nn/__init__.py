from .layers import (
    BCE_EPS,
    Conv2D,
    Dense,
    Dropout,
    ReLU,
    bce_logit_grad,
    bce_loss,
    relu,
    sigmoid,
)
from .model import (
    WEIGHTS_FORMAT_VERSION,
    FlipPredictor,
    ModelConfig,
    load_weights,
    save_weights,
)
from .train import AdamState, ArrayDataset, TrainConfig, TrainLog, adam_step, train
from .gradcheck import (
    central_difference,
    check_layer_gradients,
    check_model_gradients,
    max_relative_error,
)

__all__ = [
    "BCE_EPS",
    "Conv2D",
    "Dense",
    "Dropout",
    "ReLU",
    "relu",
    "sigmoid",
    "bce_loss",
    "bce_logit_grad",
    "ModelConfig",
    "FlipPredictor",
    "save_weights",
    "load_weights",
    "WEIGHTS_FORMAT_VERSION",
    "TrainConfig",
    "TrainLog",
    "AdamState",
    "ArrayDataset",
    "adam_step",
    "train",
    "central_difference",
    "max_relative_error",
    "check_layer_gradients",
    "check_model_gradients",
]
