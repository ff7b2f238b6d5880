"""Exact integer kernel shared by every backend.

Rational vectors are held as an integer numerator array together with one
positive common denominator.  Numerator arrays are ``int64`` while all values
provably fit, and numpy ``object`` arrays of Python integers otherwise, so no
operation here ever rounds or wraps.  Every elementwise multiplication and
addition goes through the helpers below, which tally it on an optional
:class:`OpCounter`.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

# Headroom below 2**63 so a guarded int64 result can never wrap.
_INT64_SAFE = 1 << 62


@dataclass
class OpCounter:
    """Running tally of exact multiplications and additions.

    ``max_bit_length`` is the largest bit length of any numerator or
    denominator produced while the counter was attached.
    """

    multiplications: int = 0
    additions: int = 0
    max_bit_length: int = 0

    def mul(self, n):
        self.multiplications += int(n)

    def add(self, n):
        self.additions += int(n)

    def see(self, value):
        b = abs(int(value)).bit_length()
        if b > self.max_bit_length:
            self.max_bit_length = b

    def reset(self):
        self.multiplications = 0
        self.additions = 0
        self.max_bit_length = 0

    def snapshot(self):
        return OpCounter(self.multiplications, self.additions, self.max_bit_length)

    def __sub__(self, other):
        return OpCounter(self.multiplications - other.multiplications,
                         self.additions - other.additions,
                         self.max_bit_length)


def maxabs(a):
    """Largest absolute value in ``a`` as a Python int (0 for empty arrays)."""
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def widen(a):
    a = np.asarray(a)
    return a if a.dtype == object else a.astype(object)


def narrow(a, bound=None):
    """Return ``a`` as int64 if every entry fits comfortably, else as an object array."""
    a = np.asarray(a)
    if a.dtype == object:
        if bound is None:
            bound = maxabs(a)
        return a.astype(np.int64) if bound < _INT64_SAFE else a
    if a.dtype == np.int64:
        return a
    if a.dtype.kind in "iub":
        return a.astype(np.int64)
    raise TypeError(f"non-integer array of dtype {a.dtype}")


def _fits(*arrays):
    return all(x.dtype != object for x in arrays)


def _observe(out, counter):
    if counter is not None and out.size:
        counter.see(maxabs(out))


def mul(a, b, counter=None):
    """Elementwise (broadcasting) product; counts one multiplication per output entry."""
    a, b = np.asarray(a), np.asarray(b)
    if _fits(a, b) and maxabs(a) * maxabs(b) < _INT64_SAFE:
        out = a * b
    else:
        out = widen(a) * widen(b)
    if counter is not None:
        counter.mul(out.size)
        _observe(out, counter)
    return out


def add(a, b, counter=None):
    a, b = np.asarray(a), np.asarray(b)
    if _fits(a, b) and maxabs(a) + maxabs(b) < _INT64_SAFE:
        out = a + b
    else:
        out = widen(a) + widen(b)
    if counter is not None:
        counter.add(out.size)
        _observe(out, counter)
    return out


def sub(a, b, counter=None):
    a, b = np.asarray(a), np.asarray(b)
    if _fits(a, b) and maxabs(a) + maxabs(b) < _INT64_SAFE:
        out = a - b
    else:
        out = widen(a) - widen(b)
    if counter is not None:
        counter.add(out.size)
        _observe(out, counter)
    return out


def total(a, axis, counter=None):
    """Sum along ``axis``; an axis of length n costs n-1 additions per output entry."""
    a = np.asarray(a)
    n = a.shape[axis]
    if a.dtype != object and maxabs(a) * max(n, 1) >= _INT64_SAFE:
        a = widen(a)
    out = a.sum(axis=axis)
    if a.dtype == object:
        out = np.asarray(out, dtype=object)
    if counter is not None:
        counter.add(out.size * max(n - 1, 0))
        _observe(out, counter)
    return out


def matmul(a, b, counter=None):
    """Batched matrix product with exact entries.

    Counts ``p*q*s`` multiplications and ``p*(q-1)*s`` additions per
    ``(p, q) @ (q, s)`` product.
    """
    a, b = np.asarray(a), np.asarray(b)
    q = a.shape[-1]
    if q != (b.shape[-2] if b.ndim > 1 else b.shape[0]):
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if _fits(a, b) and maxabs(a) * maxabs(b) * max(q, 1) < _INT64_SAFE:
        out = a @ b
    else:
        out = np.matmul(widen(a), widen(b))
    if counter is not None:
        counter.mul(out.size * q)
        counter.add(out.size * max(q - 1, 0))
        _observe(out, counter)
    return out


def scatter_add(target, index, values, counter=None):
    """``target[index[i]] += values[i]`` for all i, in place on a possibly widened copy."""
    values = np.asarray(values)
    if _fits(target, values) and maxabs(target) + maxabs(values) * max(len(index), 1) < _INT64_SAFE:
        np.add.at(target, index, values)
        out = target
    else:
        out = widen(target)
        np.add.at(out, index, widen(values))
    if counter is not None:
        counter.add(len(index))
        _observe(out, counter)
    return out


def scale_to_integers(values):
    """Write rationals as ``(numerators, common denominator)`` with the smallest denominator.

    ``values`` may be any nested sequence or array of ints, Fractions or
    strings accepted by :class:`fractions.Fraction`; the numerator array
    keeps its shape.
    """
    arr = np.asarray(values, dtype=object)
    flat = [Fraction(x) for x in arr.flat]
    den = 1
    for q in flat:
        den = den * q.denominator // gcd(den, q.denominator)
    nums = np.empty(len(flat), dtype=object)
    for i, q in enumerate(flat):
        nums[i] = q.numerator * (den // q.denominator)
    return narrow(nums.reshape(arr.shape)), den


def to_fractions(num, den):
    """Inverse of :func:`scale_to_integers`: an object array of reduced Fractions."""
    num = np.asarray(num)
    out = np.empty(num.shape, dtype=object)
    for idx, x in np.ndenumerate(num):
        out[idx] = Fraction(int(x), den)
    return out


def reduce(num, den):
    """Divide numerators and denominator by their common gcd; sign lives in the numerators."""
    num = np.asarray(num)
    if num.dtype == object:
        g = den
        for x in num.flat:
            if g == 1:
                break
            g = gcd(g, int(x))
    else:
        g = gcd(den, int(np.gcd.reduce(num, axis=None))) if num.size else den
    if g > 1:
        num = narrow(widen(num) // g)
        den //= g
    return narrow(num), den
