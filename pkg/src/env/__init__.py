"""Maze environments with linear and Dubins-car dynamics."""
