"""Certified integral-curve engine.

Picard iteration to a verified fixed point, Gronwall distance and uniqueness
certificates, and chart-switching integration on builtin compact manifolds.
All numerics live in the C++ extension; this package re-exports it.
"""

from curvecert._core import *  # noqa: F401,F403
from curvecert._core import __version__  # noqa: F401
