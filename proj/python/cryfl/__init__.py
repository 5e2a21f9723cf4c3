"""Federated linear-SVM infant-cry screening pipeline (C++ core)."""

from ._cryfl import *  # noqa: F401,F403
from ._cryfl import CryflError

__all__ = [name for name in dir() if not name.startswith("_")]
