"""Steady logistic-diffusive solver and habitat-resource optimizer."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
