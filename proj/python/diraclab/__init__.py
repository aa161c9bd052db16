"""Numerical laboratory for the 1+1-D cubic nonlinear Dirac system."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
