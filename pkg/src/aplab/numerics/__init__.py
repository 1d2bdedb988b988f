from .graph import Graph, GraphError, evaluate, gradient
from .optim import Adam, AdamState, adam_update, ema_update, init_adam
from .projections import project_box, project_norm_ball, project_norm_ball_rows
from .rng import Rng, sample
from .tensor import (
    NonFiniteError,
    ShapeMismatch,
    Tensor,
    absolute,
    add,
    bce_with_logits,
    concat,
    dropout_apply,
    exp,
    log,
    log_softmax,
    matmul,
    multiply,
    narrow,
    relu,
    sigmoid,
    softmax,
    square,
    tanh,
    tmean,
    tsum,
)

__all__ = [
    "Adam", "AdamState", "Graph", "GraphError", "NonFiniteError", "Rng",
    "ShapeMismatch", "Tensor", "absolute", "adam_update", "add",
    "bce_with_logits", "concat", "dropout_apply", "ema_update", "evaluate",
    "exp", "gradient", "init_adam", "log", "log_softmax", "matmul",
    "multiply", "narrow", "project_box", "project_norm_ball",
    "project_norm_ball_rows", "relu", "sample", "sigmoid", "softmax",
    "square", "tanh", "tmean", "tsum",
]
