from .checkpoint import CheckpointError, checkpoint_hash, load_checkpoint, save_checkpoint
from .classifier import (
    ClassifierParams,
    accuracy,
    classify,
    flatten_images,
    forward_layers,
    hidden_activations,
    init_mlp_weights,
    logits_t,
    nll_loss_t,
    onehot,
    predict,
    reversed_targets,
    smoothed_targets,
    train_classifier,
    training_targets,
    wrap_weights,
)
from .logit_decoder import LogitDecoderParams, decode, train_logit_decoder
from .vae import (
    VaeParams,
    encode_t,
    kl_terms,
    recon_error,
    recon_error_t,
    reconstruct,
    reconstruct_t,
    train_vae,
)

__all__ = [
    "CheckpointError", "ClassifierParams", "LogitDecoderParams", "VaeParams",
    "accuracy", "checkpoint_hash", "classify", "decode", "encode_t",
    "flatten_images", "forward_layers", "hidden_activations",
    "init_mlp_weights", "kl_terms", "load_checkpoint", "logits_t",
    "nll_loss_t", "onehot", "predict", "recon_error", "recon_error_t",
    "reconstruct", "reconstruct_t", "reversed_targets", "save_checkpoint",
    "smoothed_targets", "train_classifier", "train_logit_decoder",
    "train_vae", "training_targets", "wrap_weights",
]
