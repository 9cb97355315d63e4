import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from srgforge.cyclo import CycloInt
from srgforge.gf import build_field, cyclotomic_class
from srgforge.group import (
    Character, GroupMismatch, MultiSet, Subset, char_scan, char_value,
    multiset_accumulate, negate_set, product,
)


def float_char(group, a, idx, weights=None):
    """Oracle: complex sum of prod_i exp(2 pi i Tr(a_i x_i) / p_i)."""
    a_comp = group.deindex(a)
    total = 0j
    for n, x in enumerate(idx):
        z = 1 + 0j
        for f, ai, xi in zip(group.factors, a_comp, group.deindex(int(x))):
            z *= cmath.exp(2j * cmath.pi * int(f.trace_table[f.mul(ai, xi)]) / f.p)
        total += z * (1 if weights is None else weights[n])
    return total


@pytest.fixture(scope="module")
def g81(gf81):
    return gf81.group


@pytest.fixture(scope="module")
def g81x81(gf81):
    return gf81.group * gf81.group


@pytest.fixture(scope="module")
def mixed():
    return build_field(3, 2).group * build_field(5, 1).group * build_field(3, 1).group


def test_index_examples(g81x81):
    assert g81x81.index((0, 0)) == 0
    assert g81x81.index((0, 1)) == 81
    assert g81x81.index((5, 2)) == 5 + 162
    for t in [(0, 0), (80, 80), (3, 77)]:
        assert g81x81.deindex(g81x81.index(t)) == t
    with pytest.raises(ValueError):
        g81x81.index((81, 0))


def test_index_bijection(mixed):
    seen = {mixed.index(mixed.deindex(i)) for i in range(mixed.order)}
    assert seen == set(range(mixed.order))
    d = mixed.digits(np.arange(mixed.order))
    assert np.array_equal(mixed.from_digits(d), np.arange(mixed.order))


def test_group_arithmetic_matches_fields(mixed):
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, mixed.order, size=(2, 300))
    s = mixed.add(a, b)
    for x, y, z in zip(a, b, s):
        comps = [int(f.add(u, v)) for f, u, v in zip(mixed.factors, mixed.deindex(x), mixed.deindex(y))]
        assert mixed.deindex(int(z)) == tuple(comps)
    assert np.array_equal(mixed.add(a, mixed.neg(a)), np.zeros_like(a))
    assert np.array_equal(mixed.sub(s, b), a)


def test_negate_set(gf81, g81):
    zero = Subset.zero(g81)
    assert negate_set(zero) == zero
    C0 = cyclotomic_class(gf81, 10, 0)
    assert negate_set(C0) == C0
    rng = np.random.default_rng(3)
    S = Subset(g81, rng.random(81) < 0.3)
    assert negate_set(negate_set(S)) == S


def test_subset_algebra(gf81, g81):
    A = cyclotomic_class(gf81, 4, 0)
    B = cyclotomic_class(gf81, 4, 1)
    assert A | Subset.empty(g81) == A
    assert (A & ~A) == Subset.empty(g81)
    assert len(A | B) == 40 and len(A - B) == 20 and A.isdisjoint(B)
    with pytest.raises(GroupMismatch):
        A | Subset.empty(g81 * g81)


def test_product_sizes(gf81, g81):
    rng = np.random.default_rng(5)
    A = Subset.from_indices(g81, rng.choice(81, 36, replace=False))
    B = Subset.from_indices(g81, rng.choice(81, 45, replace=False))
    P = product(A, B)
    assert len(P) == 1620
    G = P.group
    for g in P.indices()[:50]:
        a, b = G.deindex(int(g))
        assert a in A and b in B


def test_multiset_accumulate(g81):
    full = MultiSet.full(g81)
    assert full.values() == {1}
    e = MultiSet.identity(g81)
    assert e.coeff[0] == 1 and e.coeff[1:].sum() == 0
    A = Subset.from_indices(g81, [1, 2, 3])
    acc = multiset_accumulate([A, (2, e), (-1, full)])
    assert acc.coeff[0] == 1 and acc.coeff[1] == 0 and acc.coeff[4] == -1
    with pytest.raises(GroupMismatch):
        multiset_accumulate([A, Subset.empty(g81 * g81)])
    with pytest.raises(OverflowError):
        MultiSet(g81, np.full(81, 1 << 40))


def test_char_value_examples(gf81, g81):
    S = Subset.from_indices(g81, range(40))
    assert char_value(Character(g81, 0), S) == 40
    full = Subset.full(g81)
    for a in (1, 7, 80):
        assert char_value(Character(g81, a), full) == 0
    C5 = cyclotomic_class(gf81, 10, 5)
    C0 = cyclotomic_class(gf81, 10, 0)
    assert char_value(Character(g81, 1), C5).as_integer() == 8
    assert char_value(Character(g81, 1), C0).as_integer() == -1
    # the same values by float summation
    assert abs(float_char(g81, 1, C5.indices()) - 8) < 1e-9
    assert abs(float_char(g81, 1, C0.indices()) + 1) < 1e-9


def test_char_value_matches_float_oracle(mixed):
    rng = np.random.default_rng(11)
    S = Subset(mixed, rng.random(mixed.order) < 0.2)
    coeff = rng.integers(-3, 4, size=mixed.order)
    M = MultiSet(mixed, coeff)
    for a in rng.integers(0, mixed.order, size=25):
        psi = Character(mixed, int(a))
        assert abs(char_value(psi, S).to_complex() - float_char(mixed, a, S.indices())) < 1e-8
        idx = np.flatnonzero(coeff)
        assert abs(char_value(psi, M).to_complex() - float_char(mixed, a, idx, coeff[idx])) < 1e-8


def test_char_scan_examples(g81):
    empty = char_scan(Subset.empty(g81))
    assert np.all(empty.coeff == 0)
    zero = char_scan(Subset.zero(g81))
    assert all(v == 1 for v in zero)


@pytest.mark.parametrize("backend", ["naive", "fast"])
def test_parseval(gf81, g81, backend):
    S = cyclotomic_class(gf81, 4, 0)
    table = char_scan(S, backend)
    total = CycloInt.zero((3,))
    for v in table:
        total = total + v.abs_square()
    assert total == 81 * 20 == 1620


@pytest.mark.parametrize("backend", ["naive", "fast"])
def test_fourier_inversion(mixed, backend):
    rng = np.random.default_rng(2)
    for with_zero in (False, True):
        mask = rng.random(mixed.order) < 0.3
        mask[0] = with_zero
        table = char_scan(Subset(mixed, mask), backend)
        total = CycloInt.integer(int(table.coeff.reshape(len(table), -1)[:, 0].sum()), mixed.primes)
        rest = table.coeff.reshape(len(table), -1)[:, 1:].sum(axis=0)
        assert np.all(rest == 0)
        assert total == (mixed.order if with_zero else 0)


def test_scan_backends_exhaustive_mixed(mixed):
    rng = np.random.default_rng(7)
    S = Subset(mixed, rng.random(mixed.order) < 0.25)
    naive = char_scan(S, "naive")
    fast = char_scan(S, "fast")
    assert naive == fast
    for a in range(mixed.order):
        assert naive[a] == char_value(Character(mixed, a), S)


def test_scan_backends_exhaustive_6561(g81x81):
    rng = np.random.default_rng(8)
    S = Subset(g81x81, rng.random(g81x81.order) < 0.1)
    naive = char_scan(S, "naive")
    fast = char_scan(S, "fast")
    assert np.array_equal(naive.coeff, fast.coeff)
    for a in range(g81x81.order):
        assert naive[a] == char_value(Character(g81x81, a), S)


def test_scan_multiset(mixed):
    rng = np.random.default_rng(9)
    M = MultiSet(mixed, rng.integers(-2, 3, size=mixed.order))
    assert char_scan(M, "naive") == char_scan(M, "fast")


def test_product_compatibility(gf81, g81, g81x81):
    A = cyclotomic_class(gf81, 10, 3)
    B = cyclotomic_class(gf81, 4, 1)
    AB = product(A, B)
    tA, tB, tAB = char_scan(A), char_scan(B), char_scan(AB, "fast")
    rng = np.random.default_rng(4)
    for a1, a2 in rng.integers(0, 81, size=(60, 2)):
        assert tAB[g81x81.index((int(a1), int(a2)))] == tA[int(a1)] * tB[int(a2)]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 80), max_size=30))
def test_char_value_linear(idx):
    f = build_field(3, 4)
    g = f.group
    S = Subset.from_indices(g, idx)
    T = Subset.from_indices(g, [i for i in range(0, 81, 3)])
    psi = Character(g, 17)
    union = char_value(psi, S | T)
    assert union == char_value(psi, S) + char_value(psi, T) - char_value(psi, S & T)
