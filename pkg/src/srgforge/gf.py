"""Explicit finite fields GF(p^d).

Elements are canonical integer indices: the coefficient vector over the
polynomial basis 1, x, ..., x^(d-1), read as a base-p number with the
constant coefficient least significant.  Multiplication goes through
discrete-log tables, addition is digit-wise mod p.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Sequence

import numpy as np

from .group import GroupSpec, Subset

FIELD_SIZE_LIMIT = 1 << 24


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = 3
    while r * r <= n:
        if n % r == 0:
            return False
        r += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n, ascending (trial division)."""
    out = []
    r = 2
    while r * r <= n:
        if n % r == 0:
            out.append(r)
            while n % r == 0:
                n //= r
        r += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, f) with q = p**f, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = prime_factors(q)[0]
    f = 0
    n = q
    while n % p == 0:
        n //= p
        f += 1
    if n != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, f


###############################################################################
#   polynomials over GF(p), coefficient lists with the constant term first
###############################################################################

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], mod: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], -1, p)
    while len(a) - 1 >= dm:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for k, mk in enumerate(mod):
            a[shift + k] = (a[shift + k] - c * mk) % p
        _trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_powmod(a: Sequence[int], e: int, mod: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(a, mod, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), mod, p)
        base = _poly_mod(_poly_mul(base, base, p), mod, p)
        e >>= 1
    return result


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    inv = pow(a[-1], -1, p)
    return [(c * inv) % p for c in a]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Ben-Or test: gcd(f, x^(p^i) - x) = 1 for every 1 <= i <= deg/2."""
    f = _trim([c % p for c in poly])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    xp = [0, 1]
    for _ in range(d // 2):
        xp = _poly_powmod(xp, p, f, p)
        if len(_poly_gcd(f, _poly_sub(xp, [0, 1], p), p)) != 1:
            return False
    return True


def smallest_irreducible(p: int, d: int) -> tuple[int, ...]:
    # lexicographic in (c_0, c_1, ..., c_{d-1}), constant term most significant
    for low in itertools.product(range(p), repeat=d):
        poly = list(low) + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError(f"no monic irreducible of degree {d} over GF({p})")


def _to_coeffs(index: int, p: int, d: int) -> list[int]:
    out = []
    for _ in range(d):
        index, c = divmod(index, p)
        out.append(c)
    return out


def _from_coeffs(coeffs: Sequence[int], p: int) -> int:
    return sum(int(c) * p**k for k, c in enumerate(coeffs))


def is_primitive(p: int, modulus: Sequence[int], candidate: int) -> bool:
    """True iff `candidate` (a canonical index) generates GF(p^d)^*."""
    d = len(modulus) - 1
    q = p**d
    if not 0 < candidate < q:
        return False
    a = _trim(_to_coeffs(candidate, p, d))
    for r in prime_factors(q - 1):
        if _poly_powmod(a, (q - 1) // r, modulus, p) == [1]:
            return False
    return q > 2 or candidate == 1


###############################################################################
#   FieldSpec
###############################################################################

class FieldSpec:
    """GF(p^d) with a fixed modulus, primitive element and log tables.

    Immutable after construction.  Equality and hashing use only the
    defining data (p, d, modulus, primitive).
    """

    def __init__(self, p: int, d: int, modulus: Sequence[int], primitive: int):
        self.p = int(p)
        self.d = int(d)
        self.modulus = tuple(int(c) for c in modulus)
        self.primitive = int(primitive)
        if len(self.modulus) != d + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree d")
        if not is_irreducible(self.modulus, p):
            raise FieldError(f"modulus {self.modulus} is reducible over GF({p})")
        if not is_primitive(p, self.modulus, self.primitive):
            raise FieldError(f"element {self.primitive} is not primitive")
        self.order = p**d
        self.antilog = _antilog_table(p, d, self.modulus, self.primitive)
        log = np.full(self.order, -1, dtype=np.int64)
        log[self.antilog] = np.arange(self.order - 1, dtype=np.int64)
        self.log = log
        self.antilog.flags.writeable = False
        self.log.flags.writeable = False

    @property
    def key(self) -> tuple:
        return (self.p, self.d, self.modulus, self.primitive)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"FieldSpec(p={self.p}, d={self.d}, modulus={self.modulus}, primitive={self.primitive})"

    def to_dict(self) -> dict:
        return {"p": self.p, "d": self.d, "modulus": list(self.modulus),
                "primitive": self.primitive}

    @property
    def unit_order(self) -> int:
        return self.order - 1

    @cached_property
    def group(self) -> GroupSpec:
        """The additive group of the field."""
        return GroupSpec((self,))

    @cached_property
    def digits(self) -> np.ndarray:
        idx = np.arange(self.order, dtype=np.int64)
        return np.stack([(idx // self.p**k) % self.p for k in range(self.d)], axis=1)

    def element(self, coeffs: Sequence[int]) -> int:
        return _from_coeffs([c % self.p for c in coeffs], self.p)

    def coeffs(self, x: int) -> list[int]:
        return _to_coeffs(int(x), self.p, self.d)

    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for k in range(self.d):
            s = self.p**k
            out += ((a // s + b // s) % self.p) * s
        return out

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        for k in range(self.d):
            s = self.p**k
            out += ((-(a // s)) % self.p) * s
        return out

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        la, lb = self.log[a], self.log[b]
        out = self.antilog[(la + lb) % self.unit_order]
        return np.where((a == 0) | (b == 0), 0, out)

    def power(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones(a.shape, dtype=np.int64)
        out = self.antilog[(self.log[a] * e) % self.unit_order]
        return np.where(a == 0, 0, out)

    def omega_power(self, e: int) -> int:
        return int(self.antilog[e % self.unit_order])

    def frobenius(self, a):
        return self.power(a, self.p)

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Tr(x) for every element, as residues mod p."""
        basis_tr = []
        for k in range(self.d):
            beta = self.p**k
            acc = 0
            for i in range(self.d):
                acc = int(self.add(acc, self.power(beta, self.p**i)))
            if acc >= self.p:
                raise RuntimeError("trace left the prime field")
            basis_tr.append(acc)
        t = (self.digits @ np.array(basis_tr, dtype=np.int64)) % self.p
        t.flags.writeable = False
        return t

    def is_primitive(self, candidate: int) -> bool:
        if candidate == 0:
            return False
        return math.gcd(int(self.log[candidate]), self.unit_order) == 1


def _antilog_table(p: int, d: int, modulus: tuple, primitive: int) -> np.ndarray:
    q = p**d
    n = q - 1
    # multiplication by w as a d x d matrix over GF(p), columns = w * x^k
    def mult_matrix(w_coeffs):
        cols = []
        for k in range(d):
            basis = [0] * k + [1]
            c = _poly_mod(_poly_mul(w_coeffs, basis, p), modulus, p)
            cols.append(c + [0] * (d - len(c)))
        return np.array(cols, dtype=np.int64).T

    omega = _to_coeffs(primitive, p, d)
    step = max(1, math.isqrt(n))
    # first block sequentially, later blocks by one vectorized multiply each
    block = np.zeros((step, d), dtype=np.int64)
    cur = np.zeros(d, dtype=np.int64)
    cur[0] = 1
    m_omega = mult_matrix(omega)
    for e in range(step):
        block[e] = cur
        cur = (m_omega @ cur) % p
    jump = mult_matrix(list(cur))
    weights = p ** np.arange(d, dtype=np.int64)
    out = np.empty(n, dtype=np.int64)
    start = 0
    while start < n:
        take = min(step, n - start)
        out[start:start + take] = block[:take] @ weights
        block = (block @ jump.T) % p
        start += take
    if len(np.unique(out)) != n:
        raise RuntimeError("antilog table is not a bijection")
    return out


def build_field(p: int, d: int, limit: int = FIELD_SIZE_LIMIT) -> FieldSpec:
    """Deterministic GF(p^d): smallest irreducible modulus, smallest primitive index."""
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if d < 1:
        raise FieldError("degree must be positive")
    if p**d > limit:
        raise FieldError(f"field size {p}^{d} exceeds the bound {limit}")
    modulus = smallest_irreducible(p, d)
    for cand in range(1, p**d):
        if is_primitive(p, modulus, cand):
            return FieldSpec(p, d, modulus, cand)
    raise RuntimeError("no primitive element found")


def trace(spec: FieldSpec, x):
    if np.any(np.asarray(x) >= spec.order) or np.any(np.asarray(x) < 0):
        raise FieldError("element index out of range")
    return spec.trace_table[x]


def dlog(spec: FieldSpec, x):
    x = np.asarray(x, dtype=np.int64)
    if np.any(x == 0):
        raise FieldError("discrete log of zero")
    out = spec.log[x]
    return int(out) if out.ndim == 0 else out


def cyclotomic_class(spec: FieldSpec, N: int, i: int) -> Subset:
    """C_i^(N) = w^i <w^N> as a subset of the additive group."""
    if N < 1 or spec.unit_order % N:
        raise FieldError(f"N={N} does not divide {spec.unit_order}")
    mask = (spec.log >= 0) & (spec.log % N == i % N)
    return Subset(spec.group, mask)


def mult_translate(spec: FieldSpec, S: Subset, e: int) -> Subset:
    """w^e * S."""
    idx = S.indices()
    return Subset.from_indices(S.group, spec.mul(idx, spec.omega_power(e)))
