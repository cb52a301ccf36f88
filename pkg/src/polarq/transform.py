"""Exact one-step channel transforms induced by a kernel.

Given a q-ary channel W and a kernel on X^l, the transform synthesizes
one channel per input position: position i sees the l channel outputs
plus the i previous input symbols, with the later symbols averaged out
uniformly.  Tables are enumerated exactly (budget-guarded) and then
reduced by merging proportional output columns, so single-step metrics
carry no quantization error.

Output labels before merging are the mixed-radix rank
``y_rank * q^i + prefix_rank`` of the tuple (y_0..y_{l-1}, u_0..u_{i-1});
merging re-labels, so only the likelihood columns survive a merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import budgets
from .channel import (
    Channel,
    bhattacharyya_pair,
    check_permutation,
    merge_equivalent,
    merge_proportional_columns,
    symmetric_capacity,
    z_max,
    z_min,
)
from .errors import AlphabetBudgetExceeded, InvariantViolation
from .kernel import Kernel, partial_distance, tuple_rank

CHAIN_RULE_TOL = 1e-9
_BATCH_CELLS = 1 << 24  # max elements of the all-words product tensor


def _check_args(w: Channel, kernel: Kernel, i: int) -> None:
    if w.q != kernel.q:
        raise ValueError(f"channel q={w.q} does not match kernel q={kernel.q}")
    if not 0 <= i < kernel.l:
        raise ValueError(f"position {i} outside [0, {kernel.l - 1}]")


def _rescale_rows(table: np.ndarray) -> np.ndarray:
    """Divide by the mean row sum, stripping the common float drift.

    A single scalar keeps bit-exact cross-input ties intact (per-row
    normalization would perturb them), while the residual per-row
    spread stays orders of magnitude below the row-sum tolerance.
    """
    return table / table.sum(axis=1).mean()


def _word_products(probs: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Row r holds the product channel table line for input word r."""
    n, out = words.shape[0], None
    for j in range(words.shape[1]):
        rows = probs[words[:, j]]
        out = rows if out is None else (out[:, :, None] * rows[:, None, :]).reshape(n, -1)
    return out


def _word_products_merged(probs: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Like :func:`_word_products` but letter groups whose columns are
    proportional over all words are summed after every position.

    Proportional columns stay proportional when the next position is
    tensored on, so merging early is exact and keeps the width small
    for structured channels (erasure families stay near q letters
    instead of |Y|^l).
    """
    n, out = words.shape[0], None
    for j in range(words.shape[1]):
        rows = probs[words[:, j]]
        out = rows if out is None else (out[:, :, None] * rows[:, None, :]).reshape(n, -1)
        if out.shape[1] > 1:
            out = merge_proportional_columns(out)
    return out


def subchannel(
    w: Channel, kernel: Kernel, i: int, budget: int | None = None, merge: bool = True
) -> Channel:
    """Synthetic channel of input position i under one transform step."""
    _check_args(w, kernel, i)
    q, l = kernel.q, kernel.l
    n_y = w.n_outputs
    raw = n_y**l * q**i
    cap = budgets.resolve(budget, budgets.RAW_OUTPUTS)
    if raw > cap:
        raise AlphabetBudgetExceeded(f"{raw} raw outputs exceed the budget {cap}")
    table = kernel.table_array
    size = q**l
    stride = q**i
    n_y_l = n_y**l
    n_suffix = q ** (l - 1 - i)
    block = q ** (l - i)  # input words sharing one prefix are contiguous
    if merge:
        # never materialize the raw alphabet: merge letter groups while
        # building the product, reduce each prefix block, merge globally
        prods = _word_products_merged(w.probs, table)
        width = prods.shape[1]
        blocks = [
            prods[pr * block : (pr + 1) * block].reshape(q, n_suffix, width).sum(axis=1)
            for pr in range(stride)
        ]
        cols = merge_proportional_columns(np.concatenate(blocks, axis=1))
        return Channel(q, _rescale_rows(cols))
    out = np.zeros((q, raw))
    if block * n_y_l <= _BATCH_CELLS:
        for pr in range(stride):
            rows = _word_products(w.probs, table[pr * block : (pr + 1) * block])
            out[:, pr::stride] = rows.reshape(q, n_suffix, n_y_l).sum(axis=1)
    else:
        for r in range(size):
            vec = _word_products(w.probs, table[r : r + 1])[0]
            out[(r // n_suffix) % q, (r // block) :: stride] += vec
    return Channel(q, _rescale_rows(out))


@dataclass(frozen=True)
class SubchannelSet:
    """All l synthetic channels of one transform step, merge-reduced."""

    parent: Channel
    kernel: Kernel
    channels: tuple[Channel, ...]


def subchannels(w: Channel, kernel: Kernel, budget: int | None = None) -> SubchannelSet:
    """All positions at once; checks capacity conservation before returning."""
    chans = tuple(subchannel(w, kernel, i, budget) for i in range(kernel.l))
    total = math.fsum(symmetric_capacity(c) for c in chans)
    expect = kernel.l * symmetric_capacity(w)
    if abs(total - expect) > CHAIN_RULE_TOL:
        raise InvariantViolation(
            f"capacity not conserved: sum {total!r} vs {expect!r}"
        )
    return SubchannelSet(parent=w, kernel=kernel, channels=chans)


def conditional_subchannel(
    w: Channel, kernel: Kernel, i: int, prefix, budget: int | None = None
) -> Channel:
    """Channel of position i with the previous symbols pinned to ``prefix``.

    Exact table over the l-fold output alphabet; not merge-reduced.
    The position channel equals the uniform mixture of these over all
    prefixes, with the prefix appended to the output.
    """
    _check_args(w, kernel, i)
    q, l = kernel.q, kernel.l
    prefix = tuple(int(v) for v in prefix)
    if len(prefix) != i:
        raise ValueError(f"prefix length {len(prefix)} != position {i}")
    n_y = w.n_outputs
    raw = n_y**l
    cap = budgets.resolve(budget, budgets.RAW_OUTPUTS)
    if raw > cap:
        raise AlphabetBudgetExceeded(f"{raw} raw outputs exceed the budget {cap}")
    table = kernel.table_array
    n_suffix = q ** (l - 1 - i)
    base = tuple_rank(prefix, q) * q ** (l - i)
    out = np.zeros((q, raw))
    chunk = max(1, _BATCH_CELLS // raw)
    for d in range(q):
        start = base + d * n_suffix
        for lo in range(start, start + n_suffix, chunk):
            rows = table[lo : min(lo + chunk, start + n_suffix)]
            out[d] += _word_products(w.probs, rows).sum(axis=0)
    return Channel(q, _rescale_rows(out))


def pair_channel(w: Channel, sigma, tau) -> Channel:
    """Two independent looks at the input through relabelings sigma and tau."""
    sigma = check_permutation(w.q, sigma)
    tau = check_permutation(w.q, tau)
    n_y = w.n_outputs
    out = np.empty((w.q, n_y * n_y))
    for x in range(w.q):
        out[x] = np.outer(w.probs[sigma[x]], w.probs[tau[x]]).ravel()
    return Channel(w.q, _rescale_rows(out))


def cutoff_gap(w: Channel, sigma, tau) -> tuple[float, float]:
    """Capacity gained by the second look, and its cut-off-rate lower bound.

    The gap I(pair) - I(W) is never below
    -log_q[1 - (1/q^2) * sum_{z,x} Z_{z,x}^2 (1 - Z_{m(z),m(x)})]
    with m = tau o sigma^{-1}; both quantities are nonnegative.
    """
    sigma = check_permutation(w.q, sigma)
    tau = check_permutation(w.q, tau)
    gap = symmetric_capacity(pair_channel(w, sigma, tau)) - symmetric_capacity(w)
    q = w.q
    s = np.sqrt(w.probs)
    zm = s @ s.T
    sinv = [0] * q
    for x, im in enumerate(sigma):
        sinv[im] = x
    m = np.array([tau[sinv[z]] for z in range(q)])
    total = float((zm**2 * (1.0 - zm[np.ix_(m, m)])).sum()) / (q * q)
    bound = -math.log1p(-total) / math.log(q) if total < 1.0 else math.inf
    return gap, bound


@dataclass(frozen=True)
class SandwichBounds:
    """Pairwise coefficient of a pinned-prefix channel and its two bounds."""

    lower: float
    z: float
    upper: float


def sandwich_check(
    w: Channel,
    kernel: Kernel,
    i: int,
    x: int,
    x_prime: int,
    prefix=(),
    budget: int | None = None,
) -> SandwichBounds:
    """Partial-distance bounds around the pinned-prefix pairwise coefficient.

    With D the exact partial distance of the kernel at (i, x, x',
    prefix), the coefficient lies between z_min(W)^D / q^(2(l-1-i))
    and q^(l-1-i) * z_max(W)^D.
    """
    cond = conditional_subchannel(w, kernel, i, prefix, budget)
    z = bhattacharyya_pair(cond, x, x_prime)
    d = partial_distance(kernel, i, x, x_prime, prefix, budget)
    q, l = kernel.q, kernel.l
    lower = z_min(w) ** d / float(q) ** (2 * (l - 1 - i))
    upper = float(q) ** (l - 1 - i) * z_max(w) ** d
    return SandwichBounds(lower=lower, z=z, upper=upper)
