"""Abelian groups G = G_1 x ... x G_s of field-additive groups.

Element indices are mixed radix with the first factor least significant,
so (g_1, g_2) -> g_1 + |G_1| * g_2.  Since each factor index is itself a
base-p digit string, a group element is a vector of digits, one per
prime-field coordinate; this is what the character machinery works on.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Sequence, Union

import numpy as np

from .cyclo import CharTable, CycloInt, reduce_counts

if TYPE_CHECKING:
    from .gf import FieldSpec

_INT32 = np.iinfo(np.int32)
# elements x characters per block in the naive scan
_SCAN_CHUNK = 1 << 22


class GroupMismatch(ValueError):
    pass


class GroupSpec:
    def __init__(self, factors: Sequence["FieldSpec"]):
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("a group needs at least one factor")
        strides = []
        order = 1
        for f in self.factors:
            strides.append(order)
            order *= f.order
        self.order = order
        self.strides = tuple(strides)

    @property
    def key(self) -> tuple:
        return tuple(f.key for f in self.factors)

    def __eq__(self, other):
        return isinstance(other, GroupSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        desc = " x ".join(f"GF({f.p}^{f.d})" for f in self.factors)
        return f"GroupSpec({desc})"

    def __mul__(self, other: "GroupSpec") -> "GroupSpec":
        return GroupSpec(self.factors + other.factors)

    @cached_property
    def digit_primes(self) -> np.ndarray:
        return np.array([f.p for f in self.factors for _ in range(f.d)], dtype=np.int64)

    @cached_property
    def digit_strides(self) -> np.ndarray:
        out = []
        for f, s in zip(self.factors, self.strides):
            out.extend(s * f.p**k for k in range(f.d))
        return np.array(out, dtype=np.int64)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({f.p for f in self.factors}))

    def index(self, components: Sequence[int]) -> int:
        if len(components) != len(self.factors):
            raise ValueError("wrong number of components")
        total = 0
        for c, f, s in zip(components, self.factors, self.strides):
            if not 0 <= c < f.order:
                raise ValueError(f"component {c} out of range for GF({f.order})")
            total += int(c) * s
        return total

    def deindex(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.order:
            raise ValueError(f"element {i} out of range")
        return tuple((int(i) // s) % f.order for f, s in zip(self.factors, self.strides))

    def components(self, idx) -> list[np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        return [(idx // s) % f.order for f, s in zip(self.factors, self.strides)]

    def digits(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self.digit_strides) % self.digit_primes

    def from_digits(self, digits) -> np.ndarray:
        return np.asarray(digits, dtype=np.int64) @ self.digit_strides

    def _combine(self, a, b, sign: int):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for p, s in zip(self.digit_primes.tolist(), self.digit_strides.tolist()):
            out += (((a // s) % p + sign * ((b // s) % p)) % p) * s
        return out

    def add(self, a, b):
        return self._combine(a, b, 1)

    def sub(self, a, b):
        return self._combine(a, b, -1)

    def neg(self, a):
        return self._combine(0, a, -1)

    @cached_property
    def char_weights(self) -> np.ndarray:
        """Digit weight vector of psi_a for every a, shape (|G|, D).

        psi_a(x) = prod_r zeta_r^(sum of weight_j * x_j over digits j of prime r),
        with weight_j = Tr(a_i * x^k) for the digit j = (factor i, power k).
        """
        cols = []
        comps = self.components(np.arange(self.order))
        for f, comp in zip(self.factors, comps):
            for k in range(f.d):
                cols.append(f.trace_table[f.mul(comp, f.p**k)])
        w = np.stack(cols, axis=1).astype(np.int64)
        w.flags.writeable = False
        return w

    @cached_property
    def char_weight_index(self) -> np.ndarray:
        w = self.from_digits(self.char_weights)
        w.flags.writeable = False
        return w


###############################################################################
#   Subsets and multisets
###############################################################################

class Subset:
    """A subset of a GroupSpec, as a boolean membership vector."""

    __slots__ = ("group", "mask")

    def __init__(self, group: GroupSpec, mask):
        mask = np.array(mask, dtype=bool)
        if mask.shape != (group.order,):
            raise ValueError(f"membership length {mask.shape} != ({group.order},)")
        mask.flags.writeable = False
        self.group = group
        self.mask = mask

    @classmethod
    def from_indices(cls, group: GroupSpec, indices: Iterable[int]) -> "Subset":
        mask = np.zeros(group.order, dtype=bool)
        idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                         dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= group.order):
            raise ValueError("element index out of range")
        mask[idx] = True
        return cls(group, mask)

    @classmethod
    def empty(cls, group: GroupSpec) -> "Subset":
        return cls(group, np.zeros(group.order, dtype=bool))

    @classmethod
    def full(cls, group: GroupSpec) -> "Subset":
        return cls(group, np.ones(group.order, dtype=bool))

    @classmethod
    def zero(cls, group: GroupSpec) -> "Subset":
        return cls.from_indices(group, [0])

    def __len__(self):
        return int(np.count_nonzero(self.mask))

    def __contains__(self, g):
        return bool(self.mask[int(g)])

    def __iter__(self):
        return iter(self.indices().tolist())

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __repr__(self):
        return f"Subset({self.group!r}, size={len(self)})"

    def _check(self, other: "Subset"):
        if not isinstance(other, Subset):
            raise TypeError("expected a Subset")
        if other.group != self.group:
            raise GroupMismatch(f"{self.group!r} vs {other.group!r}")

    def __eq__(self, other):
        if not isinstance(other, Subset):
            return NotImplemented
        return self.group == other.group and bool(np.array_equal(self.mask, other.mask))

    __hash__ = None

    def union(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.mask | other.mask)

    def intersect(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.mask & other.mask)

    def minus(self, other: "Subset") -> "Subset":
        self._check(other)
        return Subset(self.group, self.mask & ~other.mask)

    def complement(self) -> "Subset":
        return Subset(self.group, ~self.mask)

    __or__ = union
    __and__ = intersect
    __sub__ = minus
    __invert__ = complement

    def isdisjoint(self, other: "Subset") -> bool:
        self._check(other)
        return not np.any(self.mask & other.mask)

    def negate(self) -> "Subset":
        return Subset.from_indices(self.group, self.group.neg(self.indices()))

    def is_symmetric(self) -> bool:
        return self.negate() == self


def negate_set(S: Subset) -> Subset:
    return S.negate()


def product(A: Subset, B: Subset) -> Subset:
    """A x B inside A.group x B.group."""
    group = A.group * B.group
    return Subset(group, np.outer(B.mask, A.mask).reshape(-1))


class MultiSet:
    """An element of Z[G]: integer coefficient per group element (int32, checked)."""

    __slots__ = ("group", "coeff")

    def __init__(self, group: GroupSpec, coeff):
        coeff = np.asarray(coeff)
        if coeff.shape != (group.order,):
            raise ValueError("coefficient vector has the wrong length")
        if coeff.size and (coeff.min() < _INT32.min or coeff.max() > _INT32.max):
            raise OverflowError("group-ring coefficient exceeds 32 bits")
        coeff = coeff.astype(np.int32)
        coeff.flags.writeable = False
        self.group = group
        self.coeff = coeff

    @classmethod
    def of(cls, S: Union[Subset, "MultiSet"]) -> "MultiSet":
        if isinstance(S, MultiSet):
            return S
        return cls(S.group, S.mask.astype(np.int32))

    @classmethod
    def full(cls, group: GroupSpec) -> "MultiSet":
        return cls(group, np.ones(group.order, dtype=np.int32))

    @classmethod
    def identity(cls, group: GroupSpec) -> "MultiSet":
        """[0_G]."""
        c = np.zeros(group.order, dtype=np.int32)
        c[0] = 1
        return cls(group, c)

    def __add__(self, other):
        return multiset_accumulate([self, other])

    def __sub__(self, other):
        return multiset_accumulate([self, (-1, other)])

    def __mul__(self, k: int):
        return multiset_accumulate([(int(k), self)])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, MultiSet):
            return NotImplemented
        return self.group == other.group and bool(np.array_equal(self.coeff, other.coeff))

    __hash__ = None

    def locus(self, value: int) -> Subset:
        return Subset(self.group, self.coeff == value)

    def values(self) -> set[int]:
        return set(np.unique(self.coeff).tolist())

    def __repr__(self):
        return f"MultiSet({self.group!r}, values={sorted(self.values())})"


Term = Union[Subset, MultiSet, tuple]


def multiset_accumulate(terms: Iterable[Term]) -> MultiSet:
    """Coefficient-wise sum; a term is a set or a (sign/multiplier, set) pair."""
    acc = None
    group = None
    for t in terms:
        k, s = (t if isinstance(t, tuple) else (1, t))
        if group is None:
            group = s.group
            acc = np.zeros(group.order, dtype=np.int64)
        elif s.group != group:
            raise GroupMismatch(f"{group!r} vs {s.group!r}")
        vec = s.mask if isinstance(s, Subset) else s.coeff
        acc += int(k) * vec.astype(np.int64)
    if group is None:
        raise ValueError("nothing to accumulate")
    return MultiSet(group, acc)


###############################################################################
#   Characters
###############################################################################

class Character:
    """psi_a : x -> prod_i zeta_{p_i}^Tr(a_i x_i)."""

    def __init__(self, group: GroupSpec, a: int):
        if not 0 <= a < group.order:
            raise ValueError("character index out of range")
        self.group = group
        self.a = int(a)

    @property
    def principal(self) -> bool:
        return self.a == 0

    def __repr__(self):
        return f"Character(a={self.a})"

    def __call__(self, S):
        return char_value(self, S)


def _support(S) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(S, Subset):
        idx = S.indices()
        return idx, np.ones(idx.size, dtype=np.int64)
    idx = np.flatnonzero(S.coeff)
    return idx, S.coeff[idx].astype(np.int64)


def _hist_strides(primes: tuple[int, ...]) -> np.ndarray:
    out = []
    s = 1
    for p in reversed(primes):
        out.append(s)
        s *= p
    return np.array(out[::-1], dtype=np.int64)


def char_value(psi: Character, S: Union[Subset, MultiSet]) -> CycloInt:
    """psi(S) by direct summation over S, using field multiplication and traces."""
    group = psi.group
    if S.group != group:
        raise GroupMismatch("character and set live on different groups")
    primes = group.primes
    idx, weight = _support(S)
    exps = {p: np.zeros(idx.size, dtype=np.int64) for p in primes}
    a_comp = group.deindex(psi.a)
    for f, a_i, x_i in zip(group.factors, a_comp, group.components(idx)):
        exps[f.p] = (exps[f.p] + f.trace_table[f.mul(a_i, x_i)]) % f.p
    flat = sum(exps[p] * s for p, s in zip(primes, _hist_strides(primes)))
    size = int(np.prod(primes))
    counts = np.zeros(size, dtype=np.int64)
    np.add.at(counts, flat, weight)
    return CycloInt.from_counts(primes, counts.reshape(primes))


def _scan_naive(group: GroupSpec, idx: np.ndarray, weight: np.ndarray) -> np.ndarray:
    primes = group.primes
    size = int(np.prod(primes))
    hstride = _hist_strides(primes)
    X = group.digits(idx)
    W = group.char_weights
    dprimes = group.digit_primes
    groups = [(dprimes == p, s) for p, s in zip(primes, hstride)]
    counts = np.zeros((group.order, size), dtype=np.int64)
    if idx.size == 0:
        return counts
    step = max(1, _SCAN_CHUNK // idx.size)
    for lo in range(0, group.order, step):
        hi = min(group.order, lo + step)
        flat = np.zeros((hi - lo, idx.size), dtype=np.int64)
        for (sel, s), p in zip(groups, primes):
            flat += ((W[lo:hi][:, sel] @ X[:, sel].T) % p) * s
        rows = np.arange(hi - lo, dtype=np.int64)[:, None] * size
        for w in np.unique(weight):
            cols = weight == w
            c = np.bincount((flat[:, cols] + rows).reshape(-1), minlength=(hi - lo) * size)
            counts[lo:hi] += int(w) * c.reshape(hi - lo, size)
    return counts


def _scan_fast(group: GroupSpec, idx: np.ndarray, weight: np.ndarray) -> np.ndarray:
    """Radix-p transform over the digit coordinates, in Z[t]/(t^p - 1) per prime."""
    primes = group.primes
    nh = len(primes)
    dprimes = group.digit_primes.tolist()
    ndig = len(dprimes)
    f = np.zeros(group.order, dtype=np.int64)
    f[idx] = weight
    T = np.zeros((group.order,) + primes, dtype=np.int64)
    T[(slice(None),) + (0,) * nh] = f
    # C order: most significant digit first
    T = T.reshape(tuple(reversed(dprimes)) + primes)
    for j, p in enumerate(dprimes):
        axis = ndig - 1 - j
        hax = ndig - 1 + primes.index(p)  # histogram axis once `axis` is taken out
        parts = [np.take(T, t, axis=axis) for t in range(p)]
        out = []
        for k in range(p):
            acc = parts[0].copy()
            for t in range(1, p):
                acc += np.roll(parts[t], (t * k) % p, axis=hax)
            out.append(acc)
        T = np.stack(out, axis=axis)
    by_weight = T.reshape(group.order, -1)
    return by_weight[group.char_weight_index]


SCAN_BACKENDS = ("naive", "fast")


def char_scan(S: Union[Subset, MultiSet], backend: str = "naive") -> CharTable:
    """psi_a(S) for every character a; both backends are exact."""
    group = S.group
    idx, weight = _support(S)
    if backend == "naive":
        counts = _scan_naive(group, idx, weight)
    elif backend == "fast":
        counts = _scan_fast(group, idx, weight)
    else:
        raise ValueError(f"unknown scan backend {backend!r}")
    counts = counts.reshape((group.order,) + group.primes)
    return CharTable(group.primes, reduce_counts(counts, nbatch=1))


def char_scan_many(sets: Sequence[Union[Subset, MultiSet]], backend: str = "naive",
                   threads: int = 1) -> list[CharTable]:
    if threads <= 1 or len(sets) <= 1:
        return [char_scan(S, backend) for S in sets]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda S: char_scan(S, backend), sets))
