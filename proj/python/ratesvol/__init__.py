"""Yield-curve principal components with volatility-driven autoregression."""

from ._core import *  # noqa: F401,F403
from ._core import RatesvolError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
