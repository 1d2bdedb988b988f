from .adaptive import counter_attack_a, counter_attack_b, detector_blend_attack
from .core import classifier_input_grad, classifier_loss_t, finalize, input_grad, sign_ascent
from .methods import cw, deepfool, fgsm, pgd, random_perturb
from .specs import METHODS, AttackResult, AttackSpec, perturbation_norms

__all__ = [
    "METHODS", "AttackResult", "AttackSpec", "classifier_input_grad",
    "classifier_loss_t", "counter_attack_a", "counter_attack_b", "cw",
    "deepfool", "detector_blend_attack", "fgsm", "finalize", "input_grad",
    "pgd", "perturbation_norms", "random_perturb", "sign_ascent",
]
