"""Finite q-ary discrete memoryless channels and their scalar metrics.

A channel is a q x |Y| transition-probability table with opaque output
labels.  Probabilities are kept linear in double precision; rows are
validated with compensated summation.  Channels are immutable values
and every operation here is a pure function, so sharing across threads
is safe.

Conventions that matter:

* all capacities use log base q, so I(W) is in [0, 1];
* maximum-likelihood decision regions use strict inequality, so an
  output tied for the maximum counts fully as an error;
* ``z_min``/``z_max``/``bhattacharyya`` range over ordered distinct
  input pairs (the diagonal coefficient is identically 1 and never
  changes a min or max).
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBudget, InvalidDistribution

ROW_SUM_TOL = 1e-12
MERGE_RTOL = 1e-10


class Channel:
    """Immutable q-ary DMC.

    Parameters
    ----------
    q : int
        Input alphabet size (>= 2).
    probs : array-like, shape (q, n_outputs)
        Transition probabilities W(y|x); each row must sum to 1.
    outputs : sequence, optional
        Output labels; defaults to 0..n_outputs-1.
    """

    __slots__ = ("q", "outputs", "probs")

    def __init__(self, q: int, probs, outputs=None):
        q = int(q)
        if q < 2:
            raise InvalidDistribution(f"input alphabet must have q >= 2, got {q}")
        table = np.array(probs, dtype=np.float64)
        if table.ndim != 2 or table.shape[0] != q or table.shape[1] < 1:
            raise InvalidDistribution(f"need a q x |Y| table, got shape {table.shape}")
        if np.any(table < 0.0):
            raise InvalidDistribution("negative transition probability")
        for x in range(q):
            s = math.fsum(table[x].tolist())
            if abs(s - 1.0) > ROW_SUM_TOL:
                raise InvalidDistribution(f"row {x} sums to {s!r}, not 1")
        if outputs is None:
            outputs = range(table.shape[1])
        elif len(outputs) != table.shape[1]:
            raise InvalidDistribution("outputs length does not match table width")
        table.setflags(write=False)
        self.q = q
        self.probs = table
        self.outputs = outputs if isinstance(outputs, range) else tuple(outputs)

    @property
    def n_outputs(self) -> int:
        return self.probs.shape[1]

    def __repr__(self) -> str:
        return f"Channel(q={self.q}, outputs={self.n_outputs})"


def from_table(q: int, probs, outputs=None) -> Channel:
    """Build a channel from an explicit transition table."""
    return Channel(q, probs, outputs)


def erasure_channel(q: int, eps: float) -> Channel:
    """q-ary erasure channel: outputs 0..q-1 plus the erasure label q."""
    if not 0.0 <= eps <= 1.0:
        raise InvalidDistribution(f"erasure probability {eps} outside [0, 1]")
    table = np.zeros((q, q + 1))
    for x in range(q):
        table[x, x] = 1.0 - eps
        table[x, q] = eps
    return Channel(q, table)


def symmetric_channel(q: int, p: float) -> Channel:
    """q-ary symmetric channel: stays put w.p. 1-p, else uniform over the rest."""
    if not 0.0 <= p <= 1.0:
        raise InvalidDistribution(f"crossover probability {p} outside [0, 1]")
    table = np.full((q, q), p / (q - 1))
    np.fill_diagonal(table, 1.0 - p)
    return Channel(q, table)


def symmetric_capacity(w: Channel) -> float:
    """Mutual information with uniform input, log base q, in [0, 1]."""
    p = w.probs
    py = p.mean(axis=0)
    with np.errstate(divide="ignore"):
        logs = np.log(p, where=p > 0, out=np.zeros_like(p)) - np.log(
            py, where=py > 0, out=np.zeros_like(py)
        )
    terms = np.where(p > 0, p * logs, 0.0)
    val = float(terms.sum()) / (w.q * math.log(w.q))
    return min(1.0, max(0.0, val))


def _z_matrix(w: Channel) -> np.ndarray:
    s = np.sqrt(w.probs)
    return s @ s.T


def bhattacharyya_pair(w: Channel, x: int, x_prime: int) -> float:
    """Fidelity between the output distributions of inputs x and x'."""
    return float(np.sqrt(w.probs[x] * w.probs[x_prime]).sum())


def bhattacharyya(w: Channel) -> float:
    """Average pairwise coefficient over ordered distinct input pairs."""
    zm = _z_matrix(w)
    q = w.q
    return float((zm.sum() - np.trace(zm)) / (q * (q - 1)))


def z_max(w: Channel) -> float:
    zm = _z_matrix(w)
    np.fill_diagonal(zm, -np.inf)
    return float(zm.max())


def z_min(w: Channel) -> float:
    zm = _z_matrix(w)
    np.fill_diagonal(zm, np.inf)
    return float(zm.min())


def check_permutation(q: int, sigma) -> tuple[int, ...]:
    """Validate a length-q bijection given as a sequence of images."""
    t = tuple(int(v) for v in sigma)
    if len(t) != q or sorted(t) != list(range(q)):
        raise InvalidDistribution(f"not a permutation of 0..{q - 1}: {sigma}")
    return t


def z_avg_sigma(w: Channel, sigma, x: int, x_prime: int) -> float:
    """Average of the pairwise coefficient along the sigma-orbit of (x, x').

    Averaging over all q! powers of sigma equals averaging over one
    period of the pair orbit, because the orbit length divides q!.
    """
    sigma = check_permutation(w.q, sigma)
    zm = _z_matrix(w)
    vals = []
    a, b = x, x_prime
    while True:
        vals.append(float(zm[a, b]))
        a, b = sigma[a], sigma[b]
        if (a, b) == (x, x_prime):
            break
    return math.fsum(vals) / len(vals)


def error_prob(w: Channel) -> float:
    """Uniform-prior ML error; outputs tied for the maximum count as errors."""
    p = w.probs
    colmax = p.max(axis=0)
    unique = (p == colmax).sum(axis=0) == 1
    correct = float(np.where(unique, colmax, 0.0).sum())
    return min(1.0, max(0.0, 1.0 - correct / w.q))


@dataclass(frozen=True)
class BoundReport:
    """ML error, its pairwise bound, capacity, and capacity bounds.

    ``p_e_bound`` dominates ``p_e``; ``capacity`` lies above
    ``capacity_lower`` and below both upper bounds.
    """

    p_e: float
    p_e_bound: float
    capacity: float
    capacity_lower: float
    capacity_upper_half: float
    capacity_upper_exp: float

    def as_dict(self) -> dict:
        return {
            "p_e": self.p_e,
            "p_e_bound": self.p_e_bound,
            "capacity": self.capacity,
            "capacity_lower": self.capacity_lower,
            "capacity_upper_half": self.capacity_upper_half,
            "capacity_upper_exp": self.capacity_upper_exp,
        }


def bound_report(w: Channel) -> BoundReport:
    q = w.q
    z = bhattacharyya(w)
    lnq = math.log(q)
    root = math.sqrt(max(0.0, 1.0 - z * z))
    return BoundReport(
        p_e=error_prob(w),
        p_e_bound=(q - 1) * z,
        capacity=symmetric_capacity(w),
        capacity_lower=(lnq - math.log1p((q - 1) * z)) / lnq,
        capacity_upper_half=math.log(q / 2) / lnq + (math.log(2) / lnq) * root,
        capacity_upper_exp=2 * (q - 1) / lnq * root,
    )


@functools.lru_cache(maxsize=None)
def _projection_rows(nrows: int) -> np.ndarray:
    rows = np.random.default_rng(0x5EED).standard_normal((3, nrows))
    rows.setflags(write=False)
    return rows


def merge_proportional_columns(cols: np.ndarray) -> np.ndarray:
    """Sum groups of proportional columns of a nonnegative matrix.

    Proportionality is judged on sum-normalized columns within relative
    tolerance.  Candidates are brought together by sorting on the
    normalized rows (on three fixed random projections when the matrix
    is tall), then a linear scan compares full columns against the
    group representative.  Noisy duplicates straddling a distinct
    column can occasionally stay unmerged; that costs alphabet size,
    never correctness.  All-zero columns are dropped.
    """
    colsum = cols.sum(axis=0)
    keep = colsum > 0.0
    cols = cols[:, keep]
    colsum = colsum[keep]
    if cols.shape[1] == 0:
        raise InvalidDistribution("no usable output columns")
    norm = cols / colsum
    keys = _projection_rows(norm.shape[0]) @ norm if norm.shape[0] > 8 else norm
    order = np.lexsort(keys[::-1])
    sorted_norm = norm[:, order]
    sorted_cols = cols[:, order]
    bounds = [0]
    rep = sorted_norm[:, 0]
    for idx in range(1, sorted_norm.shape[1]):
        col = sorted_norm[:, idx]
        scale = np.maximum(np.abs(col), np.abs(rep))
        if not np.all(np.abs(col - rep) <= MERGE_RTOL * scale):
            bounds.append(idx)
            rep = col
    return np.add.reduceat(sorted_cols, bounds, axis=1)


def merge_equivalent(w: Channel) -> Channel:
    """Merge outputs whose likelihood columns are proportional.

    Proportional columns carry the same posterior, so summing them is a
    sufficient-statistic reduction: I, every pairwise coefficient, and
    the ML error are preserved up to arithmetic tolerance.  All-zero
    columns are dropped.  Merged channels get fresh integer labels.
    """
    return Channel(w.q, merge_proportional_columns(w.probs))


def _column_capacity_terms(cols: np.ndarray, q: int) -> np.ndarray:
    """Per-output contribution to I(W); capacity is their sum."""
    py = cols.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(cols, where=cols > 0, out=np.zeros_like(cols)) - np.log(
            py, where=py > 0, out=np.zeros(py.shape)
        )
    terms = np.where(cols > 0, cols * logs, 0.0)
    return terms.sum(axis=0) / (q * math.log(q))


def degrade(w: Channel, budget: int) -> Channel:
    """Quantize the output alphabet down to at most ``budget`` letters.

    First merges proportional columns exactly, then greedily merges the
    output pair whose union loses the least capacity.  Every step is a
    genuine degradation: capacity never increases and no pairwise
    coefficient decreases.
    """
    if budget < w.q:
        raise InvalidBudget(f"budget {budget} below input alphabet size {w.q}")
    merged = merge_equivalent(w)
    cols = np.array(merged.probs)
    while cols.shape[1] > budget:
        n = cols.shape[1]
        f = _column_capacity_terms(cols, w.q)
        # capacity loss for merging every pair: f_i + f_j - f(c_i + c_j)
        pair = cols[:, :, None] + cols[:, None, :]
        pair_f = _column_capacity_terms(pair.reshape(w.q, n * n), w.q).reshape(n, n)
        loss = f[:, None] + f[None, :] - pair_f
        iu = np.triu_indices(n, k=1)
        flat = loss[iu]
        best = int(np.argmin(flat))
        i, j = int(iu[0][best]), int(iu[1][best])
        cols[:, i] = cols[:, i] + cols[:, j]
        cols = np.delete(cols, j, axis=1)
    return Channel(w.q, cols)


def to_json_dict(w: Channel) -> dict:
    return {
        "q": w.q,
        "outputs": [list(o) if isinstance(o, tuple) else o for o in w.outputs],
        "probs": [[float(v) for v in row] for row in w.probs],
    }


def load_channel(path: str) -> Channel:
    with open(path) as fh:
        data = json.load(fh)
    try:
        return Channel(int(data["q"]), data["probs"], data.get("outputs"))
    except KeyError as exc:
        raise InvalidDistribution(f"channel file missing key {exc}") from exc


def parse_channel_spec(spec: str) -> Channel:
    """Parse a CLI channel spec: qec:<q>:<eps>, qsc:<q>:<p> or file:<path>."""
    parts = spec.split(":", 1)
    kind = parts[0]
    if kind == "file":
        if len(parts) != 2:
            raise InvalidDistribution(f"bad channel spec {spec!r}")
        return load_channel(parts[1])
    try:
        if kind == "qec":
            _, qs, es = spec.split(":")
            return erasure_channel(int(qs), float(es))
        if kind == "qsc":
            _, qs, ps = spec.split(":")
            return symmetric_channel(int(qs), float(ps))
    except ValueError as exc:
        raise InvalidDistribution(f"bad channel spec {spec!r}: {exc}") from exc
    raise InvalidDistribution(f"unknown channel spec kind {kind!r}")
