"""Extractive summaries of Stack Overflow answer posts."""

from ._assort import *  # noqa: F401,F403
from ._assort import __doc__  # noqa: F401

__version__ = "0.1.0"
