"""Convolutional sentence matching and greedy alignment for text simplification."""

from ._core import *  # noqa: F401,F403
from ._core import ClsmError, __doc__  # noqa: F401
