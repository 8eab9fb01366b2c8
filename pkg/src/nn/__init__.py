"""Minimal differentiable function approximators: MLPs, Adam, squashed Gaussian head."""
