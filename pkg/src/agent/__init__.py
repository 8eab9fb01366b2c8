"""Risk-conditioned soft actor critic agent."""
