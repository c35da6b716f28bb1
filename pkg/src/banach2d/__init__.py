"""Orthogonality, compatible point pairs and extreme contractions on
two-dimensional normed spaces."""

from .errors import *  # noqa: F401,F403
from .spaces import *  # noqa: F401,F403
from .orthogonality import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
from .cpp import *  # noqa: F401,F403
from .extremality import *  # noqa: F401,F403
from .oracle import brute_force_oracle, hp_op_norm  # noqa: F401
from ._kernels import USE_NUMBA  # noqa: F401

__version__ = "0.1.0"
