"""Randomized atomic features for stable system identification.

Thin re-export of the compiled core. See the package README for the model
class, the fitting problem, and the kernel diagnostics this exposes.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__, rng_id  # noqa: F401
