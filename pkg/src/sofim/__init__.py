"""Stochastic optimization with a regularized rank-one Fisher surrogate.

The core update keeps an exponentially decayed first moment of the
mini-batch gradients, models curvature as that moment's outer product
plus a scaled identity, and inverts the surrogate in closed form, so
each step costs O(d) time and memory like SGD with momentum.

Subpackages and modules:

- :mod:`sofim.core` - the optimizer and its algebraic building blocks.
- :mod:`sofim.baselines` - SGD momentum, Adam, dense natural-gradient and
  Newton oracles for comparison and testing.
- :mod:`sofim.problems` - convex and small neural test problems on
  synthetic and CSV datasets.
- :mod:`sofim.harness` - experiment runner, sweeps, scaling probe.
- :mod:`sofim.cli` - command-line front end.

The hot update kernels run on a compiled backend when the extension is
available and fall back to numpy otherwise; ``sofim.KERNEL_BACKEND``
names the one in use and the ``SOFIM_BACKEND`` environment variable
(``auto``, ``cython``, ``numpy``) forces a choice at import time.
"""

from sofim._kernels import BACKEND as KERNEL_BACKEND
from sofim.core import (
    SofimConfig,
    SofimOptimizer,
    SofimState,
    bias_correct,
    first_moment_update,
    sherman_morrison_inverse_apply,
    sofim_direction,
    sofim_step,
)
from sofim.exceptions import (
    ConfigError,
    DimensionMismatchError,
    NonFiniteError,
    ScaleCapError,
    SingularUpdateError,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "SofimConfig",
    "SofimOptimizer",
    "SofimState",
    "bias_correct",
    "first_moment_update",
    "sherman_morrison_inverse_apply",
    "sofim_direction",
    "sofim_step",
    "ConfigError",
    "DimensionMismatchError",
    "NonFiniteError",
    "ScaleCapError",
    "SingularUpdateError",
    "__version__",
]
