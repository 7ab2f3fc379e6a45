"""Near-field moving-array localization: bounds, synthesis and ML search."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
