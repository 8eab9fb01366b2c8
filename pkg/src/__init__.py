"""Risk-conditioned soft actor critic for chance-constrained navigation in 2-D mazes."""
