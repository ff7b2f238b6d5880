"""Embedding third-power convolutions into matrix multiplication.

For a partial ``f`` on a block alphabet, an ``f^3`` convolution of ``u`` and
``v`` equals ``phi(U @ V)`` where ``U`` and ``V`` are built from ``u`` and ``v``
with ``O(m^4)`` additions and ``phi`` scatters the product back.  A
convolution on ``B^k`` is handled by grouping its coordinates into three
blocks of ``n = ceil(k/3)`` coordinates each.

Block layouts (``m1, m2, m3`` are the three block sizes)::

    u, v, result   shape (m1, m2, m3)
    U              rows (a, b) in m1 x m3, columns (i, j) in m2 x m3
    V              rows (i, j) in m2 x m3, columns (c, d) in m1 x m2

``U[a,b; i,j] = sum over l with f(l, j) = b of u[a, i, l]`` and
``V[i,j; c,d] = sum over k with f(i, k) = d of v[c, k, j]``, so
``(U @ V)[a,b; c,d]`` collects exactly the products whose second and third
coordinates map to ``d`` and ``b``; ``phi`` sends that entry to
``(f(a, c), d, b)``.
"""
from dataclasses import dataclass
from itertools import product
from math import ceil, log2

import numpy as np

from . import arith
from .core import DVector, PartialBaseFn
from .errors import DomainError


class MatrixQ:
    """Dense rational matrix: integer numerators over one positive denominator."""

    def __init__(self, num, den=1):
        num = np.asarray(num)
        if num.ndim != 2:
            raise DomainError("a matrix needs a 2-d numerator array")
        self.num, self.den = arith.reduce(num, int(den))

    @classmethod
    def from_rows(cls, rows):
        num, den = arith.scale_to_integers(rows)
        return cls(num, den)

    @property
    def rows(self):
        return self.num.shape[0]

    @property
    def cols(self):
        return self.num.shape[1]

    @property
    def entries(self):
        return arith.to_fractions(self.num, self.den)

    def __eq__(self, other):
        if not isinstance(other, MatrixQ):
            return NotImplemented
        return (self.num.shape == other.num.shape and self.den == other.den
                and bool(np.array_equal(arith.widen(self.num), arith.widen(other.num))))

    def __repr__(self):
        return f"MatrixQ({self.rows}x{self.cols}, den={self.den})"


def _next_pow2(n):
    p = 1
    while p < n:
        p *= 2
    return p


def _strassen(A, B, cutoff, counter):
    """Batched Strassen recursion on stacks of square power-of-two matrices."""
    n = A.shape[-1]
    if n <= cutoff:
        return arith.matmul(A, B, counter)
    h = n // 2
    A11, A12, A21, A22 = A[:, :h, :h], A[:, :h, h:], A[:, h:, :h], A[:, h:, h:]
    B11, B12, B21, B22 = B[:, :h, :h], B[:, :h, h:], B[:, h:, :h], B[:, h:, h:]
    c = counter
    left = [arith.add(A11, A22, c), arith.add(A21, A22, c), A11, A22,
            arith.add(A11, A12, c), arith.sub(A21, A11, c), arith.sub(A12, A22, c)]
    right = [arith.add(B11, B22, c), B11, arith.sub(B12, B22, c), arith.sub(B21, B11, c),
             B22, arith.add(B11, B12, c), arith.add(B21, B22, c)]
    batch = A.shape[0]
    M = _strassen(np.concatenate(left), np.concatenate(right), cutoff, counter)
    M1, M2, M3, M4, M5, M6, M7 = (M[i * batch:(i + 1) * batch] for i in range(7))
    C11 = arith.add(arith.sub(arith.add(M1, M4, c), M5, c), M7, c)
    C12 = arith.add(M3, M5, c)
    C21 = arith.add(M2, M4, c)
    C22 = arith.add(arith.add(arith.sub(M1, M2, c), M3, c), M6, c)
    top = np.concatenate([C11, C12], axis=2)
    bottom = np.concatenate([C21, C22], axis=2)
    return np.concatenate([top, bottom], axis=1)


@dataclass(frozen=True)
class MatmulBackend:
    """An exact matrix-multiplication routine.

    ``naive`` is the schoolbook product; ``strassen7`` pads to a square power
    of two and recurses with seven half-size products per level until the
    side drops to ``cutoff``.
    """

    name: str = "naive"
    cutoff: int = 64

    def __post_init__(self):
        if self.name not in ("naive", "strassen7"):
            raise DomainError(f"unknown matmul backend {self.name!r}")
        if self.cutoff < 1:
            raise DomainError("cutoff must be at least 1")

    @property
    def reported_exponent(self):
        return 3.0 if self.name == "naive" else log2(7)

    def multiply(self, A, B, counter=None):
        """Product of two integer arrays (the numerators; denominators are the caller's)."""
        p, q = A.shape
        q2, s = B.shape
        if q != q2:
            raise DomainError(f"cannot multiply {p}x{q} by {q2}x{s}")
        if self.name == "naive":
            return arith.matmul(A, B, counter)
        N = _next_pow2(max(p, q, s, 1))
        dtype = object if A.dtype == object or B.dtype == object else np.int64
        Ap = np.zeros((1, N, N), dtype=dtype)
        Bp = np.zeros((1, N, N), dtype=dtype)
        Ap[0, :p, :q] = A
        Bp[0, :q, :s] = B
        return arith.narrow(_strassen(Ap, Bp, self.cutoff, counter)[0, :p, :s])


NAIVE = MatmulBackend("naive")


def strassen7(cutoff=64):
    return MatmulBackend("strassen7", cutoff)


def matmul(backend, A, B, counter=None):
    """Exact product of two :class:`MatrixQ` with the given backend."""
    if A.cols != B.rows:
        raise DomainError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    return MatrixQ(backend.multiply(A.num, B.num, counter), A.den * B.den)


class BlockFn:
    """The coordinatewise power of partial functions over a block of coordinates.

    ``coords`` lists one :class:`PartialBaseFn` per coordinate (first
    coordinate most significant).  The power is never tabulated: :meth:`pairs`
    walks the product of the coordinate supports.
    """

    def __init__(self, coords):
        self.coords = tuple(coords)
        self.size = 1
        for f in self.coords:
            self.size *= f.d

    @classmethod
    def power(cls, f, n):
        return cls([f] * n)

    def __call__(self, x, y):
        z = 0
        digits_x, digits_y = [], []
        for f in reversed(self.coords):
            x, rx = divmod(x, f.d)
            y, ry = divmod(y, f.d)
            digits_x.append(rx)
            digits_y.append(ry)
        for f, rx, ry in zip(self.coords, reversed(digits_x), reversed(digits_y)):
            w = f(rx, ry)
            if w is None:
                return None
            z = z * f.d + w
        return z

    def pairs(self):
        """Yield every defined ``(x, y, f(x, y))`` of the block function."""
        supports = [f.support() for f in self.coords]
        for combo in product(*supports):
            x = y = z = 0
            for f, (a, b, c) in zip(self.coords, combo):
                x, y, z = x * f.d + a, y * f.d + b, z * f.d + c
            yield x, y, z


def _blocks(f):
    if isinstance(f, BlockFn):
        return f, f, f
    if isinstance(f, PartialBaseFn):
        g = BlockFn([f])
        return g, g, g
    f1, f2, f3 = f
    return f1, f2, f3


def _as_cube(x, sizes):
    if isinstance(x, DVector):
        x = x.num
    x = np.asarray(x)
    if x.size != sizes[0] * sizes[1] * sizes[2]:
        raise DomainError(f"expected {sizes[0] * sizes[1] * sizes[2]} entries, got {x.size}")
    return x.reshape(sizes)


def _accumulator(shape, src, terms):
    # object dtype once sums of `terms` entries of `src` could leave int64
    wide = src.dtype == object or arith.maxabs(src) * max(terms, 1) >= 1 << 62
    return np.zeros(shape, dtype=object if wide else np.int64)


def build_U(f, u, counter=None):
    """``U[a,b; i,j] = sum over l with f(l, j) = b of u[a, i, l]`` as a ``(m1*m3, m2*m3)`` array.

    ``f`` is a single block function (or PartialBaseFn) used for all three
    blocks, or a triple of them.
    """
    f1, f2, f3 = _blocks(f)
    m1, m2, m3 = f1.size, f2.size, f3.size
    u = _as_cube(u, (m1, m2, m3))
    U = _accumulator((m1, m3, m2, m3), u, m3)
    for l, j, b in f3.pairs():
        U[:, b, :, j] = arith.add(U[:, b, :, j], u[:, :, l], counter)
    return U.reshape(m1 * m3, m2 * m3)


def build_V(f, v, counter=None):
    """``V[i,j; c,d] = sum over k with f(i, k) = d of v[c, k, j]`` as a ``(m2*m3, m1*m2)`` array."""
    f1, f2, f3 = _blocks(f)
    m1, m2, m3 = f1.size, f2.size, f3.size
    v = _as_cube(v, (m1, m2, m3))
    V = _accumulator((m2, m3, m1, m2), v, m2)
    for i, k, d in f2.pairs():
        V[i, :, :, d] = arith.add(V[i, :, :, d], v[:, k, :].T, counter)
    return V.reshape(m2 * m3, m1 * m2)


def apply_phi(f, W, counter=None):
    """Scatter ``W[a,b; c,d]`` to block position ``(f(a, c), d, b)``; undefined ``f(a, c)`` drops it.

    Returns the flat vector over ``m1 * m2 * m3`` block positions.
    """
    f1, f2, f3 = _blocks(f)
    m1, m2, m3 = f1.size, f2.size, f3.size
    W = np.asarray(W.num if isinstance(W, MatrixQ) else W)
    if W.shape != (m1 * m3, m1 * m2):
        raise DomainError(f"expected a {(m1 * m3, m1 * m2)} matrix, got {W.shape}")
    W4 = W.reshape(m1, m3, m1, m2)
    out = _accumulator((m1, m2, m3), W, m1 * m1)
    for a, c, z in f1.pairs():
        out[z] = arith.add(out[z], W4[a, :, c, :].T, counter)
    return out.reshape(-1)


class EmbeddingPlan:
    """How ``B^k`` is cut into three blocks of ``n = ceil(k/3)`` coordinates.

    The ``3n - k`` padding coordinates are appended at the end.  By default
    each one carries a fresh one-symbol alphabet ``{*}`` with ``f(*, *) = *``,
    which is correct for every partial ``f``.  Passing ``pad=e`` instead pads
    with an existing symbol; this is only sound when ``f(e, e) = e``.
    """

    def __init__(self, f, k, pad=None):
        if k < 1:
            raise DomainError("power k must be at least 1")
        if pad is not None and f(pad, pad) != pad:
            raise DomainError(f"padding symbol {pad} is not idempotent under f")
        self.f, self.k, self.pad = f, k, pad
        self.n = ceil(k / 3)
        star = PartialBaseFn(1, [[0]])
        coords = [f] * k + [f if pad is not None else star] * (3 * self.n - k)
        self.blocks = tuple(BlockFn(coords[t * self.n:(t + 1) * self.n]) for t in range(3))
        self.sizes = tuple(b.size for b in self.blocks)
        d = f.d
        extra = 3 * self.n - k
        if pad is None or extra == 0:
            self._positions = None
        else:
            # original index x sits at x * d**extra + (pad, ..., pad)
            tail = 0
            for _ in range(extra):
                tail = tail * d + pad
            self._positions = np.arange(d ** k, dtype=np.int64) * d ** extra + tail

    @property
    def block_domain_size(self):
        return self.sizes

    def embed(self, x):
        total = self.sizes[0] * self.sizes[1] * self.sizes[2]
        if self._positions is None:
            return x.reshape(self.sizes)
        out = np.zeros(total, dtype=x.dtype)
        out[self._positions] = x
        return out.reshape(self.sizes)

    def project(self, y):
        return y if self._positions is None else y[self._positions]


def strassen_convolve(f, k, u, v, backend=NAIVE, counter=None, pad=None):
    """Convolve ``u`` and ``v`` under ``f^k`` via one matrix product.

    The coordinates are padded to ``3n`` and grouped into three blocks;
    ``U`` and ``V`` are built, multiplied with ``backend`` and mapped back with
    ``phi``.  Equal to :func:`fconv.core.convolve_naive` on the same input.
    """
    n = f.d ** k
    for name, w in (("u", u), ("v", v)):
        if w.size != n or w.d != f.d:
            raise DomainError(f"{name} lives on d={w.d}, k={w.k}; expected d={f.d}, k={k}")
    plan = EmbeddingPlan(f, k, pad)
    U = build_U(plan.blocks, plan.embed(u.num), counter)
    V = build_V(plan.blocks, plan.embed(v.num), counter)
    W = backend.multiply(arith.narrow(U), arith.narrow(V), counter)
    out = plan.project(apply_phi(plan.blocks, W, counter))
    return DVector(f.d, k, out, u.den * v.den)
