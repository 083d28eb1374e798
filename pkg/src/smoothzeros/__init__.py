"""Certified constructions of real functions with prescribed zero sets."""

from . import errors, numkit, zeroset

__version__ = "0.1.0"

__all__ = ["errors", "numkit", "zeroset", "__version__"]
