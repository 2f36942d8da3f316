"""ViSA - contrastive goal-conditioned RL with visited-state augmentation."""

__version__ = "0.1.0"
