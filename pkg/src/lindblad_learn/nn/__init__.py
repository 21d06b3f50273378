from .checkpoint import load_checkpoint, save_checkpoint
from .optim import AdamW, EarlyStopping, ReduceLROnPlateau, clip_grad_norm
from .training import TrainedRegressor, evaluate, grad_check, r2_score, regression_metrics, train
from .transformer import RegressorConfig, TransformerRegressor, attention, mse_loss, softmax

__all__ = ["AdamW", "EarlyStopping", "ReduceLROnPlateau", "RegressorConfig", "TrainedRegressor",
           "TransformerRegressor", "attention", "clip_grad_norm", "evaluate", "grad_check",
           "load_checkpoint", "mse_loss", "r2_score", "regression_metrics", "save_checkpoint",
           "softmax", "train"]
