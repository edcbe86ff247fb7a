"""Favored-bandwidth independence screening for ultrahigh-dimensional
nonparametric regression.

The heavy numerics live in the C++ extension module; this package re-exports
its surface. In-memory variable indices are 0-based; serialized reports (JSON,
CSV, CLI output) use 1-based indices.
"""

from fbis._core import *  # noqa: F401,F403
from fbis._core import __version__  # noqa: F401
