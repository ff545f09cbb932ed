"""Lipschitz stability bounds for generalized phase retrieval with matrix frames."""

__version__ = "0.1.0"
