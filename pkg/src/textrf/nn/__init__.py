from textrf.nn.tensor import Tensor, as_tensor, concat, conv1d, maximum, minimum, parameter
from textrf.nn.losses import (
    cross_entropy_loss,
    focal_loss,
    localization_loss,
    loss_warnings,
    reset_loss_warnings,
    tal_total_loss,
)
from textrf.nn.heads import HarHead, TalPyramid, load_params, save_params
from textrf.nn.optim import Adam, TrainConfig, TrainResult, finite_difference_check, grad_check, train

__all__ = [
    "Tensor",
    "as_tensor",
    "parameter",
    "concat",
    "conv1d",
    "maximum",
    "minimum",
    "cross_entropy_loss",
    "focal_loss",
    "localization_loss",
    "tal_total_loss",
    "loss_warnings",
    "reset_loss_warnings",
    "HarHead",
    "TalPyramid",
    "save_params",
    "load_params",
    "Adam",
    "TrainConfig",
    "TrainResult",
    "train",
    "grad_check",
    "finite_difference_check",
]
