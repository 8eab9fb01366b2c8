"""Training loop, evaluation and random stream management."""
