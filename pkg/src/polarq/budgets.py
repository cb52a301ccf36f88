"""Enumeration budgets.

Every exhaustive loop that can blow up (suffix pairs in distance
computations, raw transform alphabets, tree paths) is capped.  Callers
may pass an explicit budget; otherwise the POLARQ_BUDGET environment
variable, when set, overrides the per-loop default.
"""

import os

SUFFIX_PAIRS = 1 << 26
RAW_OUTPUTS = 1 << 22
TREE_PATHS = 1 << 16


def resolve(explicit, default):
    if explicit is not None:
        return int(explicit)
    env = os.environ.get("POLARQ_BUDGET")
    if env is not None:
        return int(env)
    return default
