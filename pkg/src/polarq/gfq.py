"""Exact arithmetic over GF(q) for prime and prime-power q.

Elements are plain integers in [0, q-1].  For q = p^m with m > 1 the
integer packs the polynomial coefficients over GF(p) in base p (the
constant term is the least significant digit); for m = 1 it is the
residue mod p.  The extension modulus is the lexicographically smallest
monic irreducible polynomial of degree m, comparing coefficient tuples
from the highest degree down, which is the same as taking the smallest
base-p integer encoding.  This pins x^2+x+1 for GF(4), x^3+x+1 for
GF(8), x^4+x+1 for GF(16), and so on, deterministically across runs.

All arithmetic is table-driven.  Fields stay small (the CLI caps q at
64), so full q x q tables are built eagerly at construction and the
field object is immutable afterwards; sharing one FieldSpec between
threads is safe.
"""

from __future__ import annotations

import numpy as np

from .errors import DivisionByZero, NotPrimePower

MAX_Q = 4096  # tables are q^2 ints; anything bigger is outside desk scale


class FieldSpec:
    """Arithmetic context for GF(q), q = p^m.

    Attributes
    ----------
    q : int
        Field cardinality.
    p : int
        Characteristic (prime).
    m : int
        Extension degree, q = p^m.
    modulus : tuple[int, ...]
        Coefficients of the degree-m irreducible modulus in ascending
        degree order (length m+1, monic); empty for prime fields.
    """

    def __init__(self, q: int, p: int, m: int, modulus: tuple[int, ...]):
        self.q = q
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self._build_tables()

    def _build_tables(self) -> None:
        q, p, m = self.q, self.p, self.m
        add = np.zeros((q, q), dtype=np.int16)
        mul = np.zeros((q, q), dtype=np.int16)
        for a in range(q):
            da = _digits(a, p, m)
            for b in range(q):
                db = _digits(b, p, m)
                add[a, b] = _pack([(x + y) % p for x, y in zip(da, db)], p)
                mul[a, b] = _pack(_poly_mul_mod(da, db, self.modulus, p), p)
        inv = np.zeros(q, dtype=np.int16)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        neg = np.zeros(q, dtype=np.int16)
        for a in range(q):
            neg[a] = int(np.nonzero(add[a] == 0)[0][0])
        for t in (add, mul, inv, neg):
            t.setflags(write=False)
        self.add_table = add
        self.mul_table = mul
        self.inv_table = inv
        self.neg_table = neg

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and self.q == other.q and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash((self.q, self.modulus))


def _digits(value: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        out.append(value % p)
        value //= p
    return out


def _pack(coeffs, p: int) -> int:
    value = 0
    for c in reversed(list(coeffs)):
        value = value * p + c
    return value


def _poly_mul_mod(a, b, modulus, p):
    """Multiply two coefficient lists and reduce by the monic modulus."""
    if not modulus:  # prime field, degree-0 elements
        return [(a[0] * b[0]) % p]
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    deg_m = len(modulus) - 1
    # long division by the monic modulus
    for top in range(len(prod) - 1, deg_m - 1, -1):
        c = prod[top]
        if c:
            prod[top] = 0
            for k in range(deg_m):
                prod[top - deg_m + k] = (prod[top - deg_m + k] - c * modulus[k]) % p
    return prod[:deg_m] + [0] * (deg_m - len(prod))


def _poly_divides(d, f, p):
    """True when monic polynomial d divides f over GF(p)."""
    rem = list(f)
    deg_d = len(d) - 1
    while len(rem) - 1 >= deg_d:
        c = rem[-1]
        if c:
            shift = len(rem) - 1 - deg_d
            for k in range(len(d)):
                rem[shift + k] = (rem[shift + k] - c * d[k]) % p
        rem.pop()
        while len(rem) > 1 and rem[-1] == 0:
            rem.pop()
        if all(c == 0 for c in rem):
            return True
    return all(c == 0 for c in rem)


def _is_irreducible(f, p):
    """Exhaustive trial division by every monic polynomial of degree <= deg(f)/2."""
    deg = len(f) - 1
    for d in range(1, deg // 2 + 1):
        for enc in range(p**d):
            cand = _digits(enc, p, d) + [1]
            if _poly_divides(cand, f, p):
                return False
    return True


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise NotPrimePower(f"q must be at least 2, got {q}")
    n, p = q, None
    for cand in range(2, q + 1):
        if n % cand == 0:
            p = cand
            break
    m = 0
    while n % p == 0:
        n //= p
        m += 1
    if n != 1:
        raise NotPrimePower(f"{q} has more than one prime factor")
    return p, m


def make_field(q: int) -> FieldSpec:
    """Build GF(q) with the canonical (smallest-encoding) modulus.

    Raises NotPrimePower when q is not a prime power.  Construction is
    deterministic: two calls with the same q yield identical fields.
    """
    if q > MAX_Q:
        raise NotPrimePower(f"q={q} exceeds the supported table size {MAX_Q}")
    p, m = _factor_prime_power(q)
    if m == 1:
        return FieldSpec(q, p, 1, ())
    for enc in range(p**m):
        cand = tuple(_digits(enc, p, m) + [1])
        if _is_irreducible(cand, p):
            return FieldSpec(q, p, m, cand)
    raise NotPrimePower(f"no irreducible modulus found for q={q}")  # unreachable


def _check_element(field: FieldSpec, a: int) -> int:
    a = int(a)
    if not 0 <= a < field.q:
        raise ValueError(f"element {a} outside [0, {field.q - 1}]")
    return a


def add(field: FieldSpec, a: int, b: int) -> int:
    return int(field.add_table[_check_element(field, a), _check_element(field, b)])


def mul(field: FieldSpec, a: int, b: int) -> int:
    return int(field.mul_table[_check_element(field, a), _check_element(field, b)])


def neg(field: FieldSpec, a: int) -> int:
    return int(field.neg_table[_check_element(field, a)])


def sub(field: FieldSpec, a: int, b: int) -> int:
    return add(field, a, neg(field, b))


def inv(field: FieldSpec, a: int) -> int:
    if _check_element(field, a) == 0:
        raise DivisionByZero("zero has no multiplicative inverse")
    return int(field.inv_table[a])


def pow(field: FieldSpec, a: int, k: int) -> int:
    """a**k with pow(F, a, 0) = 1; negative k inverts first."""
    a = _check_element(field, a)
    if k < 0:
        a = inv(field, a)
        k = -k
    result = 1
    base = a
    while k:
        if k & 1:
            result = int(field.mul_table[result, base])
        base = int(field.mul_table[base, base])
        k >>= 1
    return result


def order(field: FieldSpec, a: int) -> int:
    """Multiplicative order of a nonzero element."""
    if _check_element(field, a) == 0:
        raise DivisionByZero("zero has no multiplicative order")
    k, cur = 1, a
    while cur != 1:
        cur = int(field.mul_table[cur, a])
        k += 1
    return k


def is_primitive(field: FieldSpec, a: int) -> bool:
    if _check_element(field, a) == 0:
        return False
    return order(field, a) == field.q - 1


def primitive_element(field: FieldSpec) -> int:
    """Smallest-encoded generator of the multiplicative group."""
    for a in range(1, field.q):
        if is_primitive(field, a):
            return a
    raise NotPrimePower(f"no primitive element in {field!r}")  # unreachable
