"""Kernels g: X^l -> X^l and their polarization-relevant structure.

A kernel is a bijection on length-l words over a q-ary alphabet, stored
as a lookup table indexed by the mixed-radix rank of the input word
(first symbol most significant).  When the alphabet carries field
structure and the map is linear, the backing l x l matrix is attached
and unlocks fast paths: triangular normalization, sufficient-condition
checkers for polarization, and codeword-enumeration partial distances.

Matrix-backed kernels materialize their lookup table lazily; analyses
that only need the matrix (distances, exponents, checkers) never pay
for the q^l table.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import budgets, gfq
from .errors import (
    GammaZero,
    NoField,
    NotBijective,
    NotLinear,
    SingularMatrix,
    SuffixSpaceTooLarge,
)


def tuple_rank(word, q: int) -> int:
    """Mixed-radix rank of a word, first symbol most significant."""
    r = 0
    for v in word:
        r = r * q + int(v)
    return r


def tuple_unrank(rank: int, q: int, length: int) -> tuple[int, ...]:
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        out[pos] = rank % q
        rank //= q
    return tuple(out)


def _matrix_table_array(field, matrix, q: int, length: int) -> np.ndarray:
    """All q^l products word * matrix, as a (q^l, l) array."""
    ranks = np.arange(q**length)
    out = np.zeros((q**length, length), dtype=np.int16)
    add_t, mul_t = field.add_table, field.mul_table
    for j in range(length):
        digit = ((ranks // q ** (length - 1 - j)) % q).astype(np.int16)
        for c in range(length):
            if matrix[j][c]:
                out[:, c] = add_t[out[:, c], mul_t[digit, matrix[j][c]]]
    return out


def _is_invertible(field, matrix) -> bool:
    l = len(matrix)
    a = [list(row) for row in matrix]
    for col in range(l):
        piv = next((r for r in range(col, l) if a[r][col] != 0), None)
        if piv is None:
            return False
        a[col], a[piv] = a[piv], a[col]
        inv_p = gfq.inv(field, a[col][col])
        for r in range(col + 1, l):
            if a[r][col]:
                f = gfq.mul(field, a[r][col], inv_p)
                for c in range(col, l):
                    a[r][c] = gfq.sub(field, a[r][c], gfq.mul(field, f, a[col][c]))
    return True


class Kernel:
    """Bijection on X^l, optionally backed by a matrix over GF(q).

    Built through :func:`kernel_from_map`, :func:`kernel_from_matrix`
    or :func:`rs_kernel`; not directly.  Immutable after construction.
    """

    __slots__ = ("q", "l", "field", "matrix", "_table_array")

    def __init__(self, q, l, field, matrix, table_array):
        self.q = q
        self.l = l
        self.field = field
        self.matrix = matrix
        self._table_array = table_array

    @property
    def size(self) -> int:
        return self.q**self.l

    @property
    def table_array(self) -> np.ndarray:
        """(q^l, l) output words indexed by input rank; lazy for matrix kernels."""
        if self._table_array is None:
            arr = _matrix_table_array(self.field, self.matrix, self.q, self.l)
            arr.setflags(write=False)
            self._table_array = arr
        return self._table_array

    @property
    def table(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(v) for v in row) for row in self.table_array)

    def apply(self, word) -> tuple[int, ...]:
        return tuple(int(v) for v in self.table_array[tuple_rank(word, self.q)])

    def __repr__(self) -> str:
        kind = "linear" if self.matrix is not None else "map"
        return f"Kernel(q={self.q}, l={self.l}, {kind})"


def _detect_matrix(field, q, l, table_array):
    """Candidate matrix from unit-vector images; None when not linear."""
    if np.any(table_array[0] != 0):
        return None
    rows = []
    for j in range(l):
        rows.append([int(v) for v in table_array[q ** (l - 1 - j)]])
    predicted = _matrix_table_array(field, rows, q, l)
    if np.array_equal(predicted, table_array):
        return tuple(tuple(r) for r in rows)
    return None


def kernel_from_map(q: int, l: int, table) -> Kernel:
    """Kernel from an explicit lookup table of q^l output words.

    Bijectivity is verified exhaustively.  When q is a prime power the
    canonical field is attached and linearity is detected, so matrix
    fast paths apply automatically.
    """
    q, l = int(q), int(l)
    if len(table) != q**l:
        raise NotBijective(f"table needs {q**l} entries, got {len(table)}")
    arr = np.zeros((q**l, l), dtype=np.int16)
    for idx, word in enumerate(table):
        if len(word) != l:
            raise NotBijective(f"entry {idx} has length {len(word)}, want {l}")
        for pos, v in enumerate(word):
            v = int(v)
            if not 0 <= v < q:
                raise NotBijective(f"entry {idx} has symbol {v} outside [0, {q - 1}]")
            arr[idx, pos] = v
    ranks = arr.astype(np.int64) @ np.array([q ** (l - 1 - j) for j in range(l)])
    if len(np.unique(ranks)) != q**l:
        raise NotBijective("table has repeated output words")
    arr.setflags(write=False)
    try:
        field = gfq.make_field(q)
    except gfq.NotPrimePower:
        field = None
    matrix = _detect_matrix(field, q, l, arr) if field is not None else None
    return Kernel(q, l, field, matrix, arr)


def kernel_from_matrix(field, matrix) -> Kernel:
    """Linear kernel u -> u * matrix over the given field."""
    l = len(matrix)
    rows = []
    for row in matrix:
        if len(row) != l:
            raise SingularMatrix(f"matrix is not square: row of length {len(row)}")
        rows.append(tuple(gfq._check_element(field, v) for v in row))
    if not _is_invertible(field, rows):
        raise SingularMatrix("matrix is singular over the field")
    return Kernel(field.q, l, field, tuple(rows), None)


def arikan_kernel() -> Kernel:
    """The classic 2x2 binary kernel [[1,0],[1,1]]."""
    return kernel_from_matrix(gfq.make_field(2), [[1, 0], [1, 1]])


def rs_kernel(field, gamma: int | None = None) -> Kernel:
    """The q x q Reed-Solomon kernel over the field.

    Rows 0..q-1 without the last column evaluate the monomials
    alpha^((q-2-c)(q-1-r)) of the primitive element alpha; the last
    column is zero except for the corner entry gamma (default alpha).
    Every bottom-aligned row block generates a generalized
    Reed-Solomon code, which is what makes the partial distances
    maximum-distance separable.
    """
    q = field.q
    alpha = gfq.primitive_element(field)
    if gamma is None:
        gamma = alpha
    gamma = gfq._check_element(field, gamma)
    if gamma == 0:
        raise GammaZero("corner entry must be a nonzero element")
    mat = [[0] * q for _ in range(q)]
    for r in range(q):
        for c in range(q - 1):
            mat[r][c] = gfq.pow(field, alpha, (q - 2 - c) * (q - 1 - r))
    mat[q - 1][q - 1] = gamma
    return kernel_from_matrix(field, mat)


def is_linear(kernel: Kernel) -> bool:
    """True when the kernel is induced by a matrix over its field.

    Reconstructs the candidate matrix from unit-vector images and
    checks it reproduces the whole table; requires field structure.
    """
    if kernel.field is None:
        raise NoField(f"q={kernel.q} is not a prime power; no field attached")
    if kernel.matrix is not None:
        return True
    return _detect_matrix(kernel.field, kernel.q, kernel.l, kernel.table_array) is not None


def _check_square(field, matrix):
    l = len(matrix)
    rows = []
    for row in matrix:
        if len(row) != l:
            raise SingularMatrix("matrix is not square")
        rows.append([gfq._check_element(field, v) for v in row])
    return rows


def vlp_decompose(field, matrix):
    """Factor a full-rank matrix G as V * L * P.

    V is upper triangular, L lower triangular (both invertible), P a
    permutation matrix.  Rows are processed bottom-up with the pivot in
    the rightmost nonzero column, which leaves lower-triangular inputs
    and permutation matrices fixed: they come back as (I, G, I) and
    (I, I, G) respectively.
    """
    a = _check_square(field, matrix)
    l = len(a)
    v = [[1 if r == c else 0 for c in range(l)] for r in range(l)]
    pivot_col = [0] * l
    for i in range(l - 1, -1, -1):
        pc = next((c for c in range(l - 1, -1, -1) if a[i][c] != 0), None)
        if pc is None:
            raise SingularMatrix("matrix is singular over the field")
        pivot_col[i] = pc
        inv_p = gfq.inv(field, a[i][pc])
        for r in range(i):
            if a[r][pc]:
                f = gfq.mul(field, a[r][pc], inv_p)
                for c in range(l):
                    a[r][c] = gfq.sub(field, a[r][c], gfq.mul(field, f, a[i][c]))
                for rr in range(l):
                    v[rr][i] = gfq.add(field, v[rr][i], gfq.mul(field, f, v[rr][r]))
    lower = tuple(tuple(a[r][pivot_col[c]] for c in range(l)) for r in range(l))
    perm = tuple(
        tuple(1 if c == pivot_col[pos] else 0 for c in range(l)) for pos in range(l)
    )
    return tuple(tuple(row) for row in v), lower, perm


def normalized_form(field, matrix):
    """Lower-triangular representative of the kernel matrix.

    Returns (L, k) where k is the largest row index of L holding more
    than one nonzero entry, with that row scaled so L[k][k] = 1; k is
    -1 when L is diagonal.  The scaling is an upper-side operation, so
    L keeps the statistical behaviour of the original matrix.
    """
    _, lower, _ = vlp_decompose(field, matrix)
    l = len(lower)
    k = -1
    for r in range(l - 1, -1, -1):
        if sum(1 for v in lower[r] if v != 0) > 1:
            k = r
            break
    if k < 0:
        return lower, -1
    rows = [list(r) for r in lower]
    if rows[k][k] != 1:
        scale = gfq.inv(field, rows[k][k])
        rows[k] = [gfq.mul(field, scale, v) for v in rows[k]]
    return tuple(tuple(r) for r in rows), k


def polarizes_prime_field(field, matrix) -> bool:
    """Sufficient condition: prime field and non-diagonal normal form."""
    _, k = normalized_form(field, matrix)
    return field.m == 1 and k >= 0


def polarizes_primitive_entry(field, matrix) -> bool:
    """Sufficient condition: normal-form pivot row holds a primitive element."""
    lower, k = normalized_form(field, matrix)
    if k < 0:
        return False
    return any(gfq.is_primitive(field, lower[k][j]) for j in range(k))


@dataclass(frozen=True)
class Witness:
    """Structural certificate that one transform step separates a pair.

    For the prefix, coordinates i and j of the kernel output are the
    bijections sigma and tau of the last input symbol; every other
    prefix admits at least one such bijective coordinate.
    """

    prefix: tuple[int, ...]
    i: int
    j: int
    sigma: tuple[int, ...]
    tau: tuple[int, ...]


def polarization_witness(kernel: Kernel) -> Witness | None:
    """Search the kernel for a polarization witness.

    Scans prefixes in lexicographic order; for each, a coordinate
    qualifies when the map from the last input symbol to that output
    coordinate is a bijection.  A witness exists iff every prefix has a
    qualifying coordinate; (i, j) are the two smallest qualifying
    coordinates of the first prefix (doubled when only one qualifies).
    """
    q, l = kernel.q, kernel.l
    t = kernel.table_array
    first = None
    for pr in range(q ** (l - 1)):
        block = t[pr * q : (pr + 1) * q]
        bij = [c for c in range(l) if len(set(block[:, c].tolist())) == q]
        if not bij:
            return None
        if pr == 0:
            first = (block, bij)
    block, bij = first
    i = bij[0]
    j = bij[1] if len(bij) > 1 else bij[0]
    return Witness(
        prefix=(0,) * (l - 1),
        i=i,
        j=j,
        sigma=tuple(int(v) for v in block[:, i]),
        tau=tuple(int(v) for v in block[:, j]),
    )


def partial_distance(
    kernel: Kernel, i: int, x: int, x_prime: int, prefix=(), budget: int | None = None
) -> int:
    """Exact partial distance by brute force over all suffix pairs.

    Minimum Hamming distance between kernel images whose inputs share
    the given prefix and differ as x vs x' at position i, minimized
    over both free suffixes.
    """
    q, l = kernel.q, kernel.l
    if not 0 <= i < l:
        raise ValueError(f"position {i} outside [0, {l - 1}]")
    prefix = tuple(int(v) for v in prefix)
    if len(prefix) != i:
        raise ValueError(f"prefix length {len(prefix)} != position {i}")
    for v in prefix + (x, x_prime):
        if not 0 <= int(v) < q:
            raise ValueError(f"symbol {v} outside [0, {q - 1}]")
    if x == x_prime:
        return 0
    n_suffix = q ** (l - 1 - i)
    cap = budgets.resolve(budget, budgets.SUFFIX_PAIRS)
    if n_suffix * n_suffix > cap:
        raise SuffixSpaceTooLarge(
            f"{n_suffix}^2 suffix pairs exceed the budget {cap}"
        )
    t = kernel.table_array
    base = tuple_rank(prefix, q) * q
    rows_x = t[(base + x) * n_suffix : (base + x + 1) * n_suffix]
    rows_xp = t[(base + x_prime) * n_suffix : (base + x_prime + 1) * n_suffix]
    best = l
    chunk = max(1, (1 << 20) // max(1, n_suffix))
    for start in range(0, n_suffix, chunk):
        a = rows_x[start : start + chunk]
        d = int((a[:, None, :] != rows_xp[None, :, :]).sum(axis=2).min())
        best = min(best, d)
        if best <= 1:
            break
    return best


def partial_distance_linear(kernel: Kernel, i: int) -> int:
    """Partial distance of a linear kernel at position i.

    For matrix kernels the distance is prefix- and pair-independent:
    it is the minimum weight over combinations of the bottom rows with
    a nonzero coefficient on row i.  Enumerates (q-1) * q^(l-1-i)
    codewords, which keeps q = l = 8 tractable.
    """
    if kernel.matrix is None:
        raise NotLinear("kernel has no backing matrix")
    field = kernel.field
    q, l = kernel.q, kernel.l
    if not 0 <= i < l:
        raise ValueError(f"position {i} outside [0, {l - 1}]")
    m = np.array(kernel.matrix, dtype=np.int16)
    add_t, mul_t = field.add_table, field.mul_table
    span = np.zeros((1, l), dtype=np.int16)
    for r in range(i + 1, l):
        contrib = mul_t[np.arange(q, dtype=np.int16)[:, None], m[r][None, :]]
        span = add_t[span[None, :, :], contrib[:, None, :]].reshape(-1, l)
    best = l + 1
    for c in range(1, q):
        words = add_t[span, mul_t[c, m[i]][None, :]]
        best = min(best, int(np.count_nonzero(words, axis=1).min(initial=l + 1)))
    return best


@dataclass(frozen=True)
class DistanceProfile:
    """Per-position distance extremes and the derived exponents."""

    d_min: tuple[int, ...]
    d_max: tuple[int, ...]
    exponent_min: float
    exponent_max: float

    def __post_init__(self):
        for lo, hi in zip(self.d_min, self.d_max):
            if not 1 <= lo <= hi <= len(self.d_min):
                raise ValueError(f"inconsistent distance profile: {self}")


def _profile_from_distances(d_min, d_max, l) -> DistanceProfile:
    e_min = math.fsum(math.log(d, l) for d in d_min) / l
    e_max = math.fsum(math.log(d, l) for d in d_max) / l
    return DistanceProfile(tuple(d_min), tuple(d_max), e_min, e_max)


def distance_profile(
    kernel: Kernel, method: str = "auto", budget: int | None = None
) -> DistanceProfile:
    """Distance extremes for every position.

    method='linear' uses the codeword enumeration (matrix kernels
    only); 'brute' minimizes/maximizes exact pairwise distances over
    all prefixes and distinct symbol pairs; 'auto' picks 'linear'
    whenever a matrix is attached.
    """
    q, l = kernel.q, kernel.l
    if method == "auto":
        method = "linear" if kernel.matrix is not None else "brute"
    if method == "linear":
        ds = [partial_distance_linear(kernel, i) for i in range(l)]
        return _profile_from_distances(ds, ds, l)
    if method != "brute":
        raise ValueError(f"unknown method {method!r}")
    d_min, d_max = [], []
    for i in range(l):
        pair_dist = []
        for x in range(q):
            for xp in range(q):
                if x == xp:
                    continue
                best = min(
                    partial_distance(kernel, i, x, xp, prefix, budget=budget)
                    for prefix in itertools.product(range(q), repeat=i)
                )
                pair_dist.append(best)
        d_min.append(min(pair_dist))
        d_max.append(max(pair_dist))
    return _profile_from_distances(d_min, d_max, l)


def exponent(
    kernel: Kernel, method: str = "auto", budget: int | None = None
) -> tuple[float, float]:
    """(exponent_min, exponent_max); the two coincide for linear kernels."""
    prof = distance_profile(kernel, method=method, budget=budget)
    return prof.exponent_min, prof.exponent_max


def rs_exponent_formula(q: int) -> float:
    """Closed-form exponent of the q x q Reed-Solomon kernel."""
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    return math.lgamma(q + 1) / (q * math.log(q))


def exponent_lower_bound(l: int) -> float:
    """Integral lower bound on the Reed-Solomon exponent at size l."""
    if l < 2:
        raise ValueError(f"l must be at least 2, got {l}")
    return 1.0 - (l - 1) / (l * math.log(l))


def load_kernel_matrix(path: str) -> Kernel:
    with open(path) as fh:
        data = json.load(fh)
    field = gfq.make_field(int(data["q"]))
    return kernel_from_matrix(field, data["matrix"])


def load_kernel_map(path: str) -> Kernel:
    with open(path) as fh:
        data = json.load(fh)
    q = int(data["q"])
    table = data["table"]
    if not table:
        raise NotBijective("empty kernel table")
    l = len(table[0])
    return kernel_from_map(q, l, table)


def parse_kernel_spec(spec: str) -> Kernel:
    """Parse a CLI kernel spec: arikan, rs:<q>[:gamma=<int>],
    matrix:<path> or map:<path>."""
    if spec == "arikan":
        return arikan_kernel()
    parts = spec.split(":")
    if parts[0] == "rs":
        if len(parts) not in (2, 3):
            raise ValueError(f"bad kernel spec {spec!r}")
        field = gfq.make_field(int(parts[1]))
        gamma = None
        if len(parts) == 3:
            key, _, val = parts[2].partition("=")
            if key != "gamma" or not val:
                raise ValueError(f"bad kernel spec {spec!r}")
            gamma = int(val)
        return rs_kernel(field, gamma)
    if parts[0] == "matrix" and len(parts) >= 2:
        return load_kernel_matrix(spec.partition(":")[2])
    if parts[0] == "map" and len(parts) >= 2:
        return load_kernel_map(spec.partition(":")[2])
    raise ValueError(f"unknown kernel spec {spec!r}")
