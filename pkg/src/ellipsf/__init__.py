"""Elliptic refinable functions and the polynomial spaces they reproduce."""

import logging

from .errors import *  # noqa: F401,F403

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"
