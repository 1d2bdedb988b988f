"""aplab: a desk-scale adversarial-robustness workbench.

Attack generators, VAE-based input purification with all update-rule
variants, adaptive counter-attacks and a suite of detection statistics,
built on a small self-contained float64 autodiff core.
"""

__version__ = "0.1.0"
