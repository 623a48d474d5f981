"""Pseudospectral simulation and verification toolkit for the pseudospherical
Novikov equation: evolution, Gevrey/Kato-Masuda analyticity diagnostics and
pseudospherical geometry checks."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
