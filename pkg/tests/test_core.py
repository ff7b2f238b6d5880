from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fconv import (BilinearBase, DVector, OpCounter, PartialBaseFn, ProductConvSpec,
                   RankDecomposition, catalog_get, convolve_by_decomposition, convolve_naive,
                   convolve_rank1, index_of, kron_lift, tensor_from_partial_fn, tuple_of)
from fconv.errors import DomainError
from oracles import brute_convolve, tensor_of_rule

CATALOG = ["covering", "xor", "subset_trivial", "domset", "diagonal(3)"]

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def vectors(d, k):
    return st.lists(rationals, min_size=d ** k, max_size=d ** k).map(
        lambda xs: DVector.from_values(d, k, xs))


def naive(name, k, u, v, counter=None):
    return convolve_naive(ProductConvSpec(catalog_get(name).base, k), u, v, counter)


# index encoding

@pytest.mark.parametrize("tup,d,k,expected", [((0, 1), 2, 2, 1), ((1, 0, 1), 2, 3, 5), ((2, 1), 3, 2, 7)])
def test_index_of_examples(tup, d, k, expected):
    assert index_of(tup, d, k) == expected
    assert tuple_of(expected, d, k) == tup


@given(st.integers(1, 4), st.integers(0, 5), st.data())
def test_index_roundtrip(d, k, data):
    i = data.draw(st.integers(0, d ** k - 1))
    assert index_of(tuple_of(i, d, k), d, k) == i


def test_index_of_rejects_out_of_range_digit():
    with pytest.raises(DomainError):
        index_of((0, 2), 2, 2)


# rationals and vectors

def test_dvector_is_reduced():
    v = DVector(2, 1, [2, 4], 6)
    assert (v.num.tolist(), v.den) == ([1, 2], 3)
    assert DVector.zeros(2, 2).den == 1
    assert v.entries == [Fraction(1, 3), Fraction(2, 3)]


def test_dvector_length_invariant():
    with pytest.raises(DomainError):
        DVector(2, 2, [1, 2, 3])


def test_dvector_arithmetic_stays_exact():
    u = DVector.from_values(2, 1, [Fraction(1, 3), Fraction(-1, 2)])
    w = u + u.scale(2) - u
    assert w.entries == [Fraction(2, 3), Fraction(-1)]


def test_big_values_switch_to_python_ints():
    u = DVector(2, 1, [1 << 40, 3])
    w = naive("covering", 1, u, u)
    assert w[1] == (1 << 40) * 6 + 9
    assert w[0] == 1 << 80


# tensors

def test_tensor_from_partial_fn_examples():
    cov = tensor_from_partial_fn(PartialBaseFn.from_rule(2, lambda x, y: x | y))
    assert {s[:3] for s in cov.support()} == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)}
    sub = tensor_from_partial_fn(PartialBaseFn.from_rule(2, lambda x, y: None if x & y else x | y))
    assert {s[:3] for s in sub.support()} == {(0, 0, 0), (0, 1, 1), (1, 0, 1)}
    col = tensor_from_partial_fn(PartialBaseFn.from_rule(3, lambda x, y: x if x == y else None))
    assert {s[:3] for s in col.support()} == {(x, x, x) for x in range(3)}


def test_partial_fn_rejects_values_outside_domain():
    with pytest.raises(DomainError):
        PartialBaseFn.from_triples(2, [(0, 0, 2)])


# naive convolution

def test_naive_examples():
    e0, e1 = DVector.unit(2, 1, 0), DVector.unit(2, 1, 1)
    assert naive("covering", 1, e0, e1) == e1
    assert naive("subset_trivial", 1, e1, e1) == DVector.zeros(2, 1)
    ones = DVector.ones(2, 2)
    assert naive("covering", 2, ones, ones).entries == [1, 3, 3, 9]


def test_naive_rejects_wrong_shape():
    with pytest.raises(DomainError):
        naive("covering", 2, DVector.ones(2, 1), DVector.ones(2, 2))


@pytest.mark.parametrize("name,k", [("covering", 3), ("xor", 3), ("subset_trivial", 3),
                                    ("domset", 2), ("diagonal(3)", 2)])
def test_naive_matches_brute_force(name, k):
    rng = np.random.default_rng(7)
    d = catalog_get(name).d
    u = [Fraction(int(x), int(q)) for x, q in zip(rng.integers(-5, 6, d ** k), rng.integers(1, 4, d ** k))]
    v = [Fraction(int(x)) for x in rng.integers(-5, 6, d ** k)]
    tensor = catalog_get(name).base.tensor.tolist()
    got = naive(name, k, DVector.from_values(d, k, u), DVector.from_values(d, k, v))
    assert got.entries == brute_convolve(tensor, k, u, v)


def test_naive_with_non_zero_one_base_counts_coefficients():
    t = np.zeros((2, 2, 2), dtype=object)
    t[...] = Fraction(0)
    t[0, 1, 1] = Fraction(3, 2)
    t[1, 1, 0] = Fraction(-2)
    base = BilinearBase(2, t)
    u, v = DVector(2, 2, [1, 2, 3, 4]), DVector(2, 2, [5, 6, 7, 8])
    c = OpCounter()
    got = convolve_naive(ProductConvSpec(base, 2), u, v, c)
    assert got.entries == brute_convolve(t.tolist(), 2, u.entries, v.entries)
    assert c.multiplications == 2 * 4


def test_naive_multiplication_count_is_support_power():
    c = OpCounter()
    naive("domset", 4, DVector.ones(3, 4), DVector.ones(3, 4), c)
    assert c.multiplications == 5 ** 4


def test_unit_vector_law():
    f = catalog_get("domset").fn
    k = 2
    for x in range(9):
        for y in range(9):
            w = naive("domset", k, DVector.unit(3, k, x), DVector.unit(3, k, y))
            zs = [f(a, b) for a, b in zip(tuple_of(x, 3, k), tuple_of(y, 3, k))]
            want = DVector.zeros(3, k) if None in zs else DVector.unit(3, k, tuple(zs))
            assert w == want


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG), st.data())
def test_bilinearity(name, data):
    d = catalog_get(name).d
    u, u2, v = (data.draw(vectors(d, 2)) for _ in range(3))
    assert naive(name, 2, u + u2, v) == naive(name, 2, u, v) + naive(name, 2, u2, v)
    assert naive(name, 2, v, u + u2) == naive(name, 2, v, u) + naive(name, 2, v, u2)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CATALOG), st.data())
def test_symmetric_bases_commute(name, data):
    entry = catalog_get(name)
    assert entry.base.is_symmetric()
    u, v = data.draw(vectors(entry.d, 2)), data.draw(vectors(entry.d, 2))
    assert naive(name, 2, u, v) == naive(name, 2, v, u)


# rank-one and decomposition evaluation

def test_rank1_examples():
    u, v = DVector(2, 1, [2, 3]), DVector(2, 1, [5, 7])
    assert convolve_rank1([1, 1], [1, 1], [1, 0], u, v).entries == [5 * 12, 0]
    assert convolve_rank1([3, -2], [1, 1], [1, 1], u, v) == DVector.zeros(2, 1)
    assert convolve_rank1([0, 1], [1, 0], [1, -1], u, v).entries == [15, -15]


def test_decomposition_examples():
    cov = catalog_get("covering").decomposition
    e0, e1 = DVector.unit(2, 1, 0), DVector.unit(2, 1, 1)
    assert convolve_by_decomposition(cov, e0, e1) == e1
    assert convolve_by_decomposition(RankDecomposition(2, []), e0, e1) == DVector.zeros(2, 1)
    ones = DVector.ones(2, 1)
    assert convolve_by_decomposition(catalog_get("xor").decomposition, ones, ones).entries == [2, 2]


@pytest.mark.parametrize("name", CATALOG)
def test_decomposition_agrees_with_oracle(name):
    entry = catalog_get(name)
    rng = np.random.default_rng(11)
    k = 3 if entry.d == 2 else 2
    lifted = kron_lift(entry.decomposition, k)
    for _ in range(100):
        num = rng.integers(-9, 10, size=(2, entry.d ** k))
        dens = rng.integers(1, 5, size=2)
        u, v = DVector(entry.d, k, num[0], dens[0]), DVector(entry.d, k, num[1], dens[1])
        assert convolve_by_decomposition(lifted, u, v) == naive(name, k, u, v)


def test_counter_is_monotone_and_snapshots():
    c = OpCounter()
    naive("covering", 3, DVector.ones(2, 3), DVector.ones(2, 3), c)
    first = c.snapshot()
    naive("covering", 3, DVector.ones(2, 3), DVector.ones(2, 3), c)
    assert c.multiplications == 2 * first.multiplications
    assert (c - first).multiplications == first.multiplications
