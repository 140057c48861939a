"""Python bindings for the bddgen core library."""

from ._bddgen import *  # noqa: F401,F403
from ._bddgen import __version__  # noqa: F401
