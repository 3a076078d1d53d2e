"""Extreme expectile estimation for short-tailed distributions."""

from ._expectail import *  # noqa: F401,F403
from ._expectail import __version__  # noqa: F401
