"""Numerical laboratory for the critical q > 4 random-cluster / six-vertex pair."""
from .kernel import ModelParams, params_from_c, params_from_delta, params_from_q

__all__ = ["ModelParams", "params_from_q", "params_from_c", "params_from_delta"]
__version__ = "0.1.0"
