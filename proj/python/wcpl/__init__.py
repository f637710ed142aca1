"""Radial weak-coupling eigenvalue toolkit (python face of the C++ core)."""

try:
    from ._wcpl import *  # noqa: F401,F403
    from ._wcpl import __version__  # noqa: F401
except ImportError:
    from _wcpl import *  # noqa: F401,F403
    from _wcpl import __version__  # noqa: F401
