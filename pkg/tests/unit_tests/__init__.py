"""For unit tests."""
