"""Superfield variational calculus for the Poisson sigma model."""

from .bv import *  # noqa: F401,F403
from .superfields import *  # noqa: F401,F403
from .variational import *  # noqa: F401,F403
