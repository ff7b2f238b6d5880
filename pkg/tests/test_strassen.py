from itertools import product

import numpy as np
import pytest

from fconv import (NAIVE, DVector, EmbeddingPlan, MatrixQ, OpCounter, PartialBaseFn,
                   ProductConvSpec, apply_phi, build_U, build_V, catalog_get, convolve_naive,
                   matmul, strassen7, strassen_convolve, tensor_from_partial_fn)
from fconv.errors import DomainError

COV = catalog_get("covering").fn
SUB = catalog_get("subset_trivial").fn


def naive_fn(f, k, u, v):
    return convolve_naive(ProductConvSpec(tensor_from_partial_fn(f), k), u, v)


def random_partial_fn(rng, d, p=0.75):
    table = [[int(rng.integers(d)) if rng.random() < p else None for _ in range(d)] for _ in range(d)]
    return PartialBaseFn(d, table)


def cube_unit(m, at):
    u = np.zeros(m ** 3, dtype=np.int64)
    u[(at[0] * m + at[1]) * m + at[2]] = 1
    return u


def ones_at(M, cells):
    want = np.zeros_like(M)
    for (r0, r1), (c0, c1) in cells:
        want[r0 * 2 + r1, c0 * 2 + c1] = 1
    return np.array_equal(M, want)


# U, V and phi

def test_build_U_examples():
    U = build_U(COV, cube_unit(2, (0, 0, 1)))
    assert ones_at(U, [((0, 1), (0, 0)), ((0, 1), (0, 1))])
    assert not build_U(COV, np.zeros(8, dtype=np.int64)).any()
    nothing = PartialBaseFn(2, [[None, None], [None, None]])
    assert not build_U(nothing, np.arange(8)).any()


def test_build_V_examples():
    V = build_V(COV, cube_unit(2, (0, 0, 1)))
    # row (i, j) = (i, 1) meets column (c, d) = (0, f(i, 0)) = (0, i)
    assert ones_at(V, [((0, 1), (0, 0)), ((1, 1), (0, 1))])
    assert not build_V(COV, np.zeros(8, dtype=np.int64)).any()
    V = build_V(COV, np.ones(8, dtype=np.int64))
    for (i, j), (c, d) in product(product(range(2), repeat=2), repeat=2):
        assert V[i * 2 + j, c * 2 + d] == sum(1 for k in range(2) if COV(i, k) == d)


def test_apply_phi_examples():
    W = np.zeros((4, 4), dtype=np.int64)
    W[0 * 2 + 1, 1 * 2 + 0] = 1  # (a, b; c, d) = (0, 1; 1, 0)
    out = apply_phi(COV, W)
    assert out.tolist() == cube_unit(2, (1, 0, 1)).tolist()  # (f(a, c), d, b)
    assert not apply_phi(COV, np.zeros((4, 4), dtype=np.int64)).any()
    W = np.zeros((4, 4), dtype=np.int64)
    W[1 * 2 + 0, 1 * 2 + 1] = 1  # a = c = 1, f(1, 1) undefined for subset
    assert not apply_phi(SUB, W).any()


@pytest.mark.parametrize("d", [2, 3])
def test_lemma_identity_random(d):
    rng = np.random.default_rng(100 + d)
    for _ in range(60):
        f = random_partial_fn(rng, d)
        u = DVector(d, 3, rng.integers(-9, 10, d ** 3))
        v = DVector(d, 3, rng.integers(-9, 10, d ** 3))
        W = build_U(f, u) @ build_V(f, v)
        assert np.array_equal(apply_phi(f, W), naive_fn(f, 3, u, v).num)


def test_shapes_are_checked():
    with pytest.raises(DomainError):
        build_U(COV, np.zeros(7))
    with pytest.raises(DomainError):
        apply_phi(COV, np.zeros((4, 3)))


# matrix multiplication

def test_matmul_examples():
    A = MatrixQ.from_rows([[1, 2], [3, 4]])
    B = MatrixQ.from_rows([[5, 6], [7, 8]])
    I = MatrixQ.from_rows([[1, 0], [0, 1]])
    for backend in (NAIVE, strassen7(1), strassen7()):
        assert matmul(backend, A, B) == MatrixQ.from_rows([[19, 22], [43, 50]])
        assert matmul(backend, I, A) == A


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_strassen7_count_is_seven_to_the_m(m):
    rng = np.random.default_rng(m)
    n = 2 ** m
    A, B = rng.integers(-9, 10, (n, n)), rng.integers(-9, 10, (n, n))
    c = OpCounter()
    got = strassen7(1).multiply(A, B, c)
    assert c.multiplications == 7 ** m
    assert np.array_equal(got, A @ B)


def test_backends_agree_on_rectangular_rationals():
    rng = np.random.default_rng(9)
    A = MatrixQ(rng.integers(-50, 50, (5, 7)), 3)
    B = MatrixQ(rng.integers(-50, 50, (7, 6)), 4)
    assert matmul(NAIVE, A, B) == matmul(strassen7(1), A, B) == matmul(strassen7(2), A, B)


def test_matmul_rejects_bad_shapes():
    with pytest.raises(DomainError):
        matmul(NAIVE, MatrixQ.from_rows([[1, 2]]), MatrixQ.from_rows([[1, 2]]))
    with pytest.raises(DomainError):
        strassen7(0)


def test_reported_exponents():
    assert NAIVE.reported_exponent == 3.0
    assert abs(strassen7().reported_exponent - 2.807) < 1e-3


# full convolution

def test_strassen_convolve_examples():
    u = DVector.unit(2, 3, (0, 0, 1))
    v = DVector.unit(2, 3, (0, 1, 0))
    assert strassen_convolve(COV, 3, u, v) == DVector.unit(2, 3, (0, 1, 1))
    rng = np.random.default_rng(21)
    for f in (SUB, catalog_get("domset").fn):
        u = DVector(f.d, 3, rng.integers(-9, 10, f.d ** 3))
        v = DVector(f.d, 3, rng.integers(-9, 10, f.d ** 3))
        assert strassen_convolve(f, 3, u, v) == naive_fn(f, 3, u, v)


@pytest.mark.parametrize("name", ["covering", "xor", "subset_trivial", "domset", "diagonal(3)"])
@pytest.mark.parametrize("backend", [NAIVE, strassen7(1), strassen7(4)], ids=["naive", "s7c1", "s7c4"])
def test_every_k_and_backend(name, backend):
    f = catalog_get(name).fn
    rng = np.random.default_rng(4)
    for k in range(1, 7 if f.d == 2 else 5):
        u = DVector(f.d, k, rng.integers(-9, 10, f.d ** k), 2)
        v = DVector(f.d, k, rng.integers(-9, 10, f.d ** k))
        assert strassen_convolve(f, k, u, v, backend) == naive_fn(f, k, u, v), k


def test_padding_is_transparent():
    rng = np.random.default_rng(8)
    f = catalog_get("domset").fn  # every state is idempotent
    for k in (1, 2, 4, 5):
        u = DVector(3, k, rng.integers(-9, 10, 3 ** k))
        v = DVector(3, k, rng.integers(-9, 10, 3 ** k))
        want = strassen_convolve(f, k, u, v)
        for e in range(3):
            assert strassen_convolve(f, k, u, v, pad=e) == want


def test_padding_symbol_must_be_idempotent():
    with pytest.raises(DomainError):
        EmbeddingPlan(SUB, 2, pad=1)
    plan = EmbeddingPlan(SUB, 2)
    assert plan.n == 1 and plan.sizes == (2, 2, 1)


def test_embedding_overhead_is_fourth_power():
    for n in (1, 2, 3):
        k = 3 * n
        m = 2 ** n
        u = DVector(2, k, np.ones(m ** 3, dtype=np.int64))
        plan = EmbeddingPlan(COV, k)
        c = OpCounter()
        U = build_U(plan.blocks, plan.embed(u.num), c)
        V = build_V(plan.blocks, plan.embed(u.num), c)
        apply_phi(plan.blocks, U @ V, c)
        assert c.multiplications == 0
        assert c.additions <= 3 * m ** 4
