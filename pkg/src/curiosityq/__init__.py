"""Optimal Bayesian exploration with curiosity Q-values."""

__version__ = "0.1.0"
