"""Shared helpers for the test suite: seeded random instances and the
independent erasure-recursion oracle used to cross-check transforms."""

import numpy as np

from polarq import channel as ch
from polarq import gfq
from polarq import kernel as kn


def random_channel(rng, q, max_outputs=8, min_outputs=2):
    """Random DMC with Dirichlet(1) rows."""
    n = int(rng.integers(min_outputs, max_outputs + 1))
    rows = rng.dirichlet(np.ones(n), size=q)
    return ch.Channel(q, rows)


def random_permutation(rng, q):
    return tuple(int(v) for v in rng.permutation(q))


def random_linear_kernel(rng, field, size):
    """Random invertible size x size matrix kernel over the field."""
    while True:
        mat = [[int(v) for v in rng.integers(0, field.q, size=size)] for _ in range(size)]
        try:
            return kn.kernel_from_matrix(field, mat)
        except kn.SingularMatrix:
            continue


def random_nonlinear_kernel(rng, q, size):
    """Random bijection on X^size that fails the linearity check."""
    n = q**size
    while True:
        perm = rng.permutation(n)
        table = [kn.tuple_unrank(int(r), q, size) for r in perm]
        k = kn.kernel_from_map(q, size, table)
        if k.matrix is None:
            return k


def bec_oracle_z(eps, n):
    """Erasure probabilities of all 2^n leaf channels of the binary
    erasure recursion, in lexicographic path order (digit 0 first)."""
    zs = [eps]
    for _ in range(n):
        zs = [v for z in zs for v in (2 * z - z * z, z * z)]
    return zs


def arikan():
    return kn.rs_kernel(gfq.make_field(2), 1)
