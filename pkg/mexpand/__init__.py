"""Multivariate differential and falsified sampling expansions with matrix dilations."""

from mexpand.exceptions import MexpandError

__version__ = "0.1.0"

__all__ = ["MexpandError", "__version__"]
