"""Immediate-risk and execution-risk estimation."""
