from .calibrate import CalibrationStats, calibrate
from .objective import purify_mnist
from .variants import PurifySpec, VARIANTS, purify, purify_direct

__all__ = [
    "CalibrationStats", "PurifySpec", "VARIANTS", "calibrate", "purify",
    "purify_direct", "purify_mnist",
]
