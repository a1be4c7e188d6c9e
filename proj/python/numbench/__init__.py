"""Network utility maximization solvers: mirror descent and the dual ellipsoid
method with primal recovery, plus instance generation and exact tiny-instance
reference solutions."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
