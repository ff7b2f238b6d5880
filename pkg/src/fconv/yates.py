"""Yates' algorithm: product-structured convolution in O(r^k k) operations.

Given an ``r``-term decomposition of the base map, the convolution on
``B^k`` is

    sum over kappa in [r]^k of <u, a_kappa> <v, b_kappa> c_kappa

with Kronecker-product factors.  Stage one computes all inner products by
contracting one coordinate per layer; stage two sums the ``c_kappa`` back up
the same tree, again one coordinate per layer.  Layer ``i`` holds ``r**i``
vectors of length ``d**(k-i)`` stored as one dense array.
"""
from dataclasses import dataclass

import numpy as np

from . import arith
from .core import DVector, RankDecomposition, trivial_decomposition
from .decomp import verify_decomposition
from .errors import DomainError, PreconditionError


@dataclass(frozen=True)
class YatesPlan:
    """A decomposition normalised so that ``d <= r <= d**2``, ready for a fixed power ``k``."""

    base_dec: RankDecomposition
    power: int

    def __post_init__(self):
        if self.power < 1:
            raise DomainError("power k must be at least 1")
        dec, d = self.base_dec, self.base_dec.d
        if dec.rank > d * d:
            dec = trivial_decomposition(dec.to_tensor())
        if dec.rank < d:
            dec = dec.padded(d)
        object.__setattr__(self, "base_dec", dec)

    @property
    def d(self):
        return self.base_dec.d

    @property
    def rank(self):
        return self.base_dec.rank

    @property
    def factors(self):
        return self.base_dec.factors


def forward_transform(M, X, d, k, counter=None):
    """Contract every row of ``X`` against all Kronecker products of rows of ``M``.

    ``X`` has shape ``(batch, d**k)`` and ``M`` shape ``(r, d)``; the result
    has shape ``(batch, r**k)`` with entry ``kappa`` equal to
    ``<X[b], M[kappa_1] (x) ... (x) M[kappa_k]>``.  Coordinates are consumed
    left to right, children in term order.
    """
    r = M.shape[0]
    batch = X.shape[0]
    cur = X
    for i in range(k):
        rest = d ** (k - i - 1)
        cur = arith.matmul(M, cur.reshape(batch * r ** i, d, rest), counter)
    return cur.reshape(batch, r ** k)


def backward_transform(C, F, d, k, counter=None):
    """Sum ``F[b, kappa] * C[kappa_1] (x) ... (x) C[kappa_k]`` over all ``kappa``.

    ``F`` has shape ``(batch, r**k)``; the result has shape ``(batch, d**k)``.
    Leaves are folded into their parents one layer at a time, the last
    coordinate first.
    """
    r = C.shape[0]
    batch = F.shape[0]
    Ct = np.ascontiguousarray(C.T)
    cur = F
    for i in range(k - 1, -1, -1):
        rest = d ** (k - i - 1)
        cur = arith.matmul(Ct, cur.reshape(batch * r ** i, r, rest), counter)
    return cur.reshape(batch, d ** k)


def _check(plan, *vectors):
    n = plan.d ** plan.power
    for w in vectors:
        if w.size != n or w.d != plan.d:
            raise DomainError(f"vector over d={w.d}, k={w.k} does not match plan d={plan.d}, k={plan.power}")


def yates_stage1(plan, u, v, counter=None):
    """All inner products ``<u, a_kappa>`` and ``<v, b_kappa>``, as vectors indexed by ``[r]^k``."""
    _check(plan, u, v)
    d, k, r = plan.d, plan.power, plan.rank
    (A, da), (B, db), _ = plan.factors
    su = forward_transform(A, u.num[None, :], d, k, counter)[0]
    sv = forward_transform(B, v.num[None, :], d, k, counter)[0]
    return DVector(r, k, su, u.den * da ** k), DVector(r, k, sv, v.den * db ** k)


def yates_stage2(plan, f, counter=None):
    """``sum_kappa f[kappa] c_kappa`` for scalars ``f`` indexed by ``[r]^k``."""
    d, k, r = plan.d, plan.power, plan.rank
    if f.size != r ** k:
        raise DomainError(f"expected {r ** k} scalars, got {f.size}")
    (C, dc) = plan.factors[2]
    w = backward_transform(C, f.num[None, :], d, k, counter)[0]
    return DVector(d, k, w, f.den * dc ** k)


def yates_convolve(base_dec, k, u, v, counter=None, base=None):
    """Convolve ``u`` and ``v`` under ``b^k`` using a decomposition of ``b``.

    If ``base`` is given, ``base_dec`` is first checked against it and a
    :class:`PreconditionError` is raised when the two disagree.
    """
    if base is not None and not verify_decomposition(base, base_dec):
        raise PreconditionError("decomposition does not sum to the base tensor")
    plan = base_dec if isinstance(base_dec, YatesPlan) else YatesPlan(base_dec, k)
    _check(plan, u, v)
    d = plan.d
    (A, da), (B, db), (C, dc) = plan.factors
    su = forward_transform(A, u.num[None, :], d, k, counter)
    sv = forward_transform(B, v.num[None, :], d, k, counter)
    f = arith.mul(su, sv, counter)
    w = backward_transform(C, f, d, k, counter)[0]
    return DVector(d, k, w, u.den * v.den * (da * db * dc) ** k)
