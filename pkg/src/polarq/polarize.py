"""Depth-n polarization trees and their statistics.

A path is a digit sequence over the kernel positions, the first digit
applied to the root channel first.  Exhaustive enumeration walks the
whole depth-n tree in lexicographic path order; sampling draws paths
uniformly with a seeded generator and is bit-reproducible for a given
(seed, count, n).  Quantization runs between levels, never inside one,
so every step is a true degradation and mean capacity can only drift
down when the budget actually binds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import budgets
from .channel import (
    Channel,
    bhattacharyya,
    degrade,
    error_prob,
    merge_equivalent,
    symmetric_capacity,
    z_max,
    z_min,
)
from .errors import InvalidBudget, PathBudgetExceeded, RequiresExhaustive
from .kernel import Kernel
from .transform import subchannel


@dataclass(frozen=True)
class PathStats:
    """Scalar metrics of one leaf channel of the tree."""

    path: tuple[int, ...]
    i: float
    z: float
    z_max: float
    z_min: float
    p_e: float


@dataclass(frozen=True)
class PolarizationReport:
    """Per-path statistics over a depth-n transform tree."""

    n: int
    l: int
    paths: tuple[PathStats, ...]
    quantize_budget: int
    mode: str  # "exhaustive" | "sampled"
    seed: int | None


def _stats(path, w: Channel) -> PathStats:
    return PathStats(
        path=tuple(path),
        i=symmetric_capacity(w),
        z=bhattacharyya(w),
        z_max=z_max(w),
        z_min=z_min(w),
        p_e=error_prob(w),
    )


def _advance(w: Channel, kernel: Kernel, digit: int, quantize: int, budget) -> Channel:
    nxt = subchannel(w, kernel, digit, budget)
    if nxt.n_outputs > quantize:
        nxt = degrade(nxt, quantize)
    return nxt


def tree_channel(
    w: Channel, kernel: Kernel, path, quantize: int, budget: int | None = None
) -> Channel:
    """Channel at the end of one path, quantized between levels."""
    if quantize < w.q:
        raise InvalidBudget(f"quantize budget {quantize} below q={w.q}")
    path = tuple(int(b) for b in path)
    for b in path:
        if not 0 <= b < kernel.l:
            raise ValueError(f"path digit {b} outside [0, {kernel.l - 1}]")
    cur = merge_equivalent(w)
    for b in path:
        cur = _advance(cur, kernel, b, quantize, budget)
    return cur


def enumerate_tree(
    w: Channel,
    kernel: Kernel,
    n: int,
    quantize: int,
    budget: int | None = None,
    path_budget: int | None = None,
) -> PolarizationReport:
    """Statistics of every leaf of the depth-n tree, in path order."""
    if quantize < w.q:
        raise InvalidBudget(f"quantize budget {quantize} below q={w.q}")
    l = kernel.l
    total = l**n
    cap = budgets.resolve(path_budget, budgets.TREE_PATHS)
    if total > cap:
        raise PathBudgetExceeded(f"{total} paths exceed the budget {cap}")
    level = [merge_equivalent(w)]
    for _ in range(n):
        level = [
            _advance(chan, kernel, b, quantize, budget)
            for chan in level
            for b in range(l)
        ]
    stats = []
    for rank, chan in enumerate(level):
        digits = []
        r = rank
        for _ in range(n):
            digits.append(r % l)
            r //= l
        stats.append(_stats(tuple(reversed(digits)), chan))
    return PolarizationReport(
        n=n, l=l, paths=tuple(stats), quantize_budget=quantize, mode="exhaustive", seed=None
    )


def sample_trajectories(
    w: Channel,
    kernel: Kernel,
    n: int,
    count: int,
    quantize: int,
    seed: int,
    budget: int | None = None,
) -> PolarizationReport:
    """Monte-Carlo paths drawn uniformly; reproducible for a given seed.

    Intermediate channels are cached per path prefix, so repeated
    prefixes cost nothing extra.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if quantize < w.q:
        raise InvalidBudget(f"quantize budget {quantize} below q={w.q}")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, kernel.l, size=(count, n))
    cache: dict[tuple[int, ...], Channel] = {(): merge_equivalent(w)}
    stats = []
    for row in draws:
        path = tuple(int(b) for b in row)
        for depth in range(1, n + 1):
            prefix = path[:depth]
            if prefix not in cache:
                cache[prefix] = _advance(
                    cache[prefix[:-1]], kernel, prefix[-1], quantize, budget
                )
        stats.append(_stats(path, cache[path]))
    return PolarizationReport(
        n=n, l=kernel.l, paths=tuple(stats), quantize_budget=quantize, mode="sampled", seed=seed
    )


def polarization_fraction(report: PolarizationReport, delta: float) -> float:
    """Fraction of paths whose average coefficient left (delta, 1-delta)."""
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must be in (0, 1/2), got {delta}")
    hits = sum(1 for p in report.paths if p.z <= delta or p.z >= 1.0 - delta)
    return hits / len(report.paths)


def speed_fraction(report: PolarizationReport, beta: float) -> float:
    """Fraction of paths with Z below the doubly exponential threshold.

    Counts z < 2^(-l^(beta n)); evaluated on log2(z), with z = 0 always
    below, so the threshold never under- or overflows.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    log2_l = math.log2(report.l) if report.l > 1 else 0.0
    exp2 = beta * report.n * log2_l
    thr = math.inf if exp2 >= 1023 else float(report.l) ** (beta * report.n)
    hits = 0
    for p in report.paths:
        if p.z <= 0.0:
            hits += 1
        elif math.log2(p.z) < -thr:
            hits += 1
    return hits / len(report.paths)


def information_set(report: PolarizationReport, rate: float) -> tuple[int, ...]:
    """Indices of the floor(rate * l^n) most reliable paths.

    Reliability is smallest Z; ties break toward the smaller path
    index.  Requires an exhaustive report.
    """
    if report.mode != "exhaustive":
        raise RequiresExhaustive("information sets need an exhaustive report")
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be in [0, 1], got {rate}")
    k = int(rate * len(report.paths))
    z = np.array([p.z for p in report.paths])
    order = np.argsort(z, kind="stable")
    return tuple(sorted(int(idx) for idx in order[:k]))
