"""q-ary channel polarization toolkit.

Exact finite-field arithmetic, channel metrics, kernel analysis
(partial distances, exponents, polarization checkers, Reed-Solomon
kernels), one-step channel transforms, polarization-tree simulation,
and a successive-cancellation codec, plus the ``polarq`` CLI.
"""

from . import budgets, channel, codec, errors, gfq, kernel, polarize, transform

__all__ = [
    "budgets",
    "channel",
    "codec",
    "errors",
    "gfq",
    "kernel",
    "polarize",
    "transform",
]

__version__ = "0.1.0"
