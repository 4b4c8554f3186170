"""Template 1-D convolutional QC classifier implemented on numpy."""

from .io import ModelFormatError, load_model, read_sidecar, save_model
from .network import (
    DEFAULT_NEGATIVE_SLOPE,
    LayerSpec,
    NetworkSpec,
    Parameters,
    ShapeError,
    backward,
    build_template_network,
    count_layers,
    forward,
    init_parameters,
    loss,
    zero_parameters,
)
from .train import (
    AdamState,
    NetworkClassifier,
    TrainerConfig,
    TrainingDivergedError,
    TrainReport,
    adam_step,
    classify,
    misclassification_rate,
    predict_proba,
    train,
)

__all__ = [
    "DEFAULT_NEGATIVE_SLOPE", "LayerSpec", "NetworkSpec", "Parameters", "ShapeError",
    "backward", "build_template_network", "count_layers", "forward", "init_parameters",
    "loss", "zero_parameters", "ModelFormatError", "load_model", "read_sidecar",
    "save_model", "AdamState", "NetworkClassifier", "TrainerConfig",
    "TrainingDivergedError", "TrainReport", "adam_step", "classify",
    "misclassification_rate", "predict_proba", "train",
]
