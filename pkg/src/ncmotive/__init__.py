"""Computational experiments on endomotives, KMS states and the explicit formula."""
__version__ = "0.1.0"
