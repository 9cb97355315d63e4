"""Exact elements of Z[zeta_p1, ..., zeta_ps] for distinct primes p1 < ... < ps.

A value is stored as an integer tensor of shape (p1-1, ..., ps-1): the
coordinates on the Z-basis prod_r zeta_pr^e_r with 0 <= e_r <= pr-2.
Working tensors of shape (p1, ..., ps) ("exponent counts") are reduced
with zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2)) along each axis.
"""
from __future__ import annotations

import cmath
import itertools
from typing import Iterable

import numpy as np

_INT64_MAX = (1 << 63) - 1


def _check_bound(bound: int, what: str):
    if bound > _INT64_MAX:
        raise OverflowError(f"cyclotomic {what} may exceed 64-bit coefficients")


def reduce_counts(counts: np.ndarray, nbatch: int = 0) -> np.ndarray:
    """Reduce exponent-count tensors to basis coordinates.

    The trailing axes (after `nbatch` leading batch axes) have lengths p_r.
    """
    out = np.asarray(counts, dtype=np.int64)
    for ax in range(nbatch, out.ndim):
        top = np.take(out, [out.shape[ax] - 1], axis=ax)
        out = np.delete(out, out.shape[ax] - 1, axis=ax) - top
    return out


def _lift(coeff: np.ndarray) -> np.ndarray:
    """Pad each axis with a zero slot for exponent p-1."""
    return np.pad(coeff, [(0, 1)] * coeff.ndim)


class CycloInt:
    __slots__ = ("primes", "coeff")

    def __init__(self, primes: Iterable[int], coeff):
        primes = tuple(int(p) for p in primes)
        if list(primes) != sorted(set(primes)):
            raise ValueError("primes must be distinct and ascending")
        coeff = np.array(coeff, dtype=np.int64)
        shape = tuple(p - 1 for p in primes)
        if coeff.shape != shape:
            raise ValueError(f"coefficient shape {coeff.shape} != {shape}")
        coeff.flags.writeable = False
        self.primes = primes
        self.coeff = coeff

    # constructors

    @classmethod
    def integer(cls, n: int, primes: Iterable[int] = ()) -> "CycloInt":
        primes = tuple(primes)
        c = np.zeros(tuple(p - 1 for p in primes), dtype=np.int64)
        c[(0,) * len(primes)] = n
        return cls(primes, c)

    @classmethod
    def zero(cls, primes: Iterable[int] = ()) -> "CycloInt":
        return cls.integer(0, primes)

    @classmethod
    def from_root(cls, p: int, j: int) -> "CycloInt":
        """zeta_p^j, 0 <= j < p."""
        if not 0 <= j < p:
            raise ValueError("exponent out of range")
        counts = np.zeros(p, dtype=np.int64)
        counts[j] = 1
        return cls((p,), reduce_counts(counts))

    @classmethod
    def from_counts(cls, primes: Iterable[int], counts) -> "CycloInt":
        return cls(primes, reduce_counts(counts))

    # structure

    def promote(self, primes: Iterable[int]) -> "CycloInt":
        primes = tuple(primes)
        if primes == self.primes:
            return self
        if not set(self.primes) <= set(primes):
            raise ValueError(f"cannot embed {self.primes} into {primes}")
        c = np.zeros(tuple(p - 1 for p in primes), dtype=np.int64)
        index = tuple(slice(None) if p in self.primes else 0 for p in primes)
        c[index] = self.coeff
        return CycloInt(primes, c)

    def _common(self, other: "CycloInt") -> tuple["CycloInt", "CycloInt"]:
        primes = tuple(sorted(set(self.primes) | set(other.primes)))
        return self.promote(primes), other.promote(primes)

    def _coerce(self, other) -> "CycloInt":
        if isinstance(other, CycloInt):
            return other
        if isinstance(other, (int, np.integer)):
            return CycloInt.integer(int(other), self.primes)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._common(other)
        _check_bound(a.max_abs() + b.max_abs(), "sum")
        return CycloInt(a.primes, a.coeff + b.coeff)

    __radd__ = __add__

    def __neg__(self):
        return CycloInt(self.primes, -self.coeff)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k: int) -> "CycloInt":
        _check_bound(abs(int(k)) * self.max_abs(), "scale")
        return CycloInt(self.primes, self.coeff * int(k))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        if not isinstance(other, CycloInt):
            return NotImplemented
        a, b = self._common(other)
        if not a.primes:
            return CycloInt.integer(int(a.coeff) * int(b.coeff))
        _check_bound(a.l1() * b.l1() * 2, "product")
        fa, fb = _lift(a.coeff), _lift(b.coeff)
        out = np.zeros_like(fa)
        axes = tuple(range(fa.ndim))
        for idx in zip(*np.nonzero(fa)):
            out += fa[idx] * np.roll(fb, tuple(int(i) for i in idx), axis=axes)
        return CycloInt.from_counts(a.primes, out)

    __rmul__ = __mul__

    def conjugate(self) -> "CycloInt":
        """zeta_p -> zeta_p^(p-1) on every axis."""
        if not self.primes:
            return self
        f = _lift(self.coeff)
        for ax in range(f.ndim):
            f = np.roll(np.flip(f, axis=ax), 1, axis=ax)
        return CycloInt.from_counts(self.primes, f)

    def abs_square(self) -> "CycloInt":
        return self * self.conjugate()

    def as_integer(self) -> int | None:
        flat = self.coeff.reshape(-1)
        if flat.size == 0 or np.any(flat[1:]):
            return None
        return int(flat[0])

    def is_zero(self) -> bool:
        return not np.any(self.coeff)

    def max_abs(self) -> int:
        return int(np.abs(self.coeff).max()) if self.coeff.size else 0

    def l1(self) -> int:
        return int(np.abs(self.coeff).sum())

    def to_complex(self) -> complex:
        total = 0j
        for idx in itertools.product(*(range(p - 1) for p in self.primes)):
            c = int(self.coeff[idx])
            if c:
                z = 1 + 0j
                for e, p in zip(idx, self.primes):
                    z *= cmath.exp(2j * cmath.pi * e / p)
                total += c * z
        return total

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        a, b = self._common(other)
        return bool(np.array_equal(a.coeff, b.coeff))

    def __hash__(self):
        n = self.as_integer()
        if n is not None:
            return hash(n)
        # independent of which extra primes the value was promoted over
        terms = []
        for idx in zip(*np.nonzero(self.coeff)):
            mono = tuple((p, int(e)) for p, e in zip(self.primes, idx) if e)
            terms.append((mono, int(self.coeff[idx])))
        return hash(tuple(sorted(terms)))

    def __repr__(self):
        n = self.as_integer()
        if n is not None:
            return f"CycloInt({n})"
        return f"CycloInt(primes={self.primes}, coeff={self.coeff.tolist()})"

    def to_dict(self) -> dict:
        return {"primes": list(self.primes), "coeff": self.coeff.reshape(-1).tolist()}


class CharTable:
    """Character values psi_a(S) for every a, stored as one coefficient array.

    `coeff[a]` holds the basis coordinates of psi_a(S).
    """

    def __init__(self, primes: tuple[int, ...], coeff: np.ndarray):
        self.primes = tuple(primes)
        self.coeff = coeff
        self.coeff.flags.writeable = False

    def __len__(self):
        return self.coeff.shape[0]

    def __getitem__(self, a: int) -> CycloInt:
        return CycloInt(self.primes, self.coeff[a])

    def __iter__(self):
        for a in range(len(self)):
            yield self[a]

    def __eq__(self, other):
        return (isinstance(other, CharTable) and self.primes == other.primes
                and np.array_equal(self.coeff, other.coeff))

    def integer_mask(self) -> np.ndarray:
        flat = self.coeff.reshape(len(self), -1)
        return ~np.any(flat[:, 1:], axis=1)

    def integer_part(self) -> np.ndarray:
        """Constant coordinate; the exact value wherever integer_mask holds."""
        return self.coeff.reshape(len(self), -1)[:, 0].copy()
