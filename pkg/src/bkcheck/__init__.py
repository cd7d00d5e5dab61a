"""Exact verification of Belkale-Kumar structure constants and related combinatorics."""

from .errors import (BKCheckError, InvariantError, PreconditionError, ResourceError,
                     TheoremViolation, ValidationError)
from .rootsys import RootSystem, build_root_system
from .weyl import WeylGroup, enumerate_group

__version__ = "0.1.0"

__all__ = [
    "BKCheckError", "InvariantError", "PreconditionError", "ResourceError",
    "TheoremViolation", "ValidationError", "RootSystem", "build_root_system",
    "WeylGroup", "enumerate_group", "__version__",
]
