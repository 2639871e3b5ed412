from .io import ModelFormatError, load_model, model_from_bytes, model_to_bytes, save_model
from .model import (GcnConfig, GcnModel, GraphIndex, attention_weights, forward, forward_logits,
                    init_model, message_pass_step, node_to_edge, param_shapes)
from .optim import AdamState, apply_update
from .training import (Sample, TrainConfig, TrainResult, class_weights, evaluate_loss,
                       fit_normalization, loss_and_gradients, merge_samples, train)

__all__ = [
    "AdamState", "GcnConfig", "GcnModel", "GraphIndex", "ModelFormatError", "Sample",
    "TrainConfig", "TrainResult", "apply_update", "attention_weights", "class_weights",
    "evaluate_loss", "fit_normalization", "forward", "forward_logits", "init_model",
    "load_model", "loss_and_gradients", "merge_samples", "message_pass_step",
    "model_from_bytes", "model_to_bytes", "node_to_edge", "param_shapes", "save_model",
    "train",
]
