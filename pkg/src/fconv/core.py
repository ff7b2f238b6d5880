"""Domain types, the brute-force convolution oracle and rank-one evaluation.

Indexing convention: a tuple ``(x_1, ..., x_k)`` over a base domain of size
``d`` sits at position ``sum_j x_j * d**(k-1-j)`` (first coordinate most
significant).  Every backend uses this layout so outputs compare directly.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from . import arith
from .errors import DomainError


def index_of(tup, d, k=None):
    """Position of ``tup`` in the row-major layout of ``B^k`` with ``|B| = d``."""
    if k is None:
        k = len(tup)
    if len(tup) != k:
        raise DomainError(f"expected a {k}-tuple, got {len(tup)} entries")
    idx = 0
    for x in tup:
        if not 0 <= x < d:
            raise DomainError(f"element {x} outside base domain of size {d}")
        idx = idx * d + x
    return idx


def tuple_of(index, d, k):
    if not 0 <= index < d ** k:
        raise DomainError(f"index {index} outside 0..{d ** k - 1}")
    out = []
    for _ in range(k):
        index, x = divmod(index, d)
        out.append(x)
    return tuple(reversed(out))


class PartialBaseFn:
    """A partial function ``h: B x B -> B`` stored as a ``d x d`` table.

    Undefined entries are ``None``.
    """

    def __init__(self, d, table):
        if d < 1:
            raise DomainError("base domain must be non-empty")
        rows = [list(r) for r in table]
        if len(rows) != d or any(len(r) != d for r in rows):
            raise DomainError(f"table must be {d}x{d}")
        for r in rows:
            for z in r:
                if z is not None and not 0 <= z < d:
                    raise DomainError(f"value {z} outside base domain of size {d}")
        self.d = d
        self.table = tuple(tuple(r) for r in rows)

    @classmethod
    def from_rule(cls, d, rule):
        """Tabulate ``rule(x, y)``; a ``None`` return marks the pair undefined."""
        return cls(d, [[rule(x, y) for y in range(d)] for x in range(d)])

    @classmethod
    def from_triples(cls, d, triples):
        table = [[None] * d for _ in range(d)]
        for x, y, z in triples:
            if not (0 <= x < d and 0 <= y < d):
                raise DomainError(f"pair ({x}, {y}) outside base domain of size {d}")
            table[x][y] = z
        return cls(d, table)

    def __call__(self, x, y):
        return self.table[x][y]

    def support(self):
        """Defined entries as ``(x, y, h(x, y))`` triples in row-major order."""
        return [(x, y, z) for x, row in enumerate(self.table)
                for y, z in enumerate(row) if z is not None]

    def __eq__(self, other):
        return isinstance(other, PartialBaseFn) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"PartialBaseFn(d={self.d}, support={self.support()})"


class BilinearBase:
    """The base map ``b: B x B -> Q^B`` as a dense ``d x d x d`` tensor.

    Entry ``(x, y, z)`` is the ``z``-th coordinate of ``b(x, y)``.
    """

    def __init__(self, d, tensor):
        t = np.empty((d, d, d), dtype=object)
        src = np.asarray(tensor, dtype=object)
        if src.shape != (d, d, d):
            raise DomainError(f"tensor must have shape {(d, d, d)}, got {src.shape}")
        for idx, v in np.ndenumerate(src):
            t[idx] = Fraction(v)
        self.d = d
        self.tensor = t

    @classmethod
    def zeros(cls, d):
        return cls(d, np.zeros((d, d, d), dtype=int))

    @cached_property
    def scaled(self):
        """``(numerators, denominator)`` with ``tensor == numerators / denominator``."""
        return arith.scale_to_integers(self.tensor)

    def support(self):
        """Non-zero entries as ``(x, y, z, value)`` in row-major order."""
        return [(x, y, z, v) for (x, y, z), v in np.ndenumerate(self.tensor) if v != 0]

    @property
    def is_zero_one(self):
        return all(v in (0, 1) for v in self.tensor.flat)

    def is_symmetric(self):
        return all(self.tensor[x, y, z] == self.tensor[y, x, z]
                   for x, y, z in product(range(self.d), repeat=3))

    def power_tensor(self, k):
        """Dense tensor of ``b^k`` over ``D = B^k``, as ``(numerators, denominator)``.

        Shape is ``(d**k, d**k, d**k)``; only sensible for small ``d**k``.
        """
        num, den = self.scaled
        d = self.d
        out = np.ones((1, 1, 1), dtype=np.int64)
        for _ in range(k):
            out = np.einsum("abc,xyz->axbycz", arith.widen(out), arith.widen(num))
            n = out.shape[0] * d
            out = out.reshape(n, n, n)
        return arith.narrow(out), den ** k

    def __eq__(self, other):
        return (isinstance(other, BilinearBase) and self.d == other.d
                and bool(np.all(self.tensor == other.tensor)))

    def __repr__(self):
        return f"BilinearBase(d={self.d}, nnz={len(self.support())})"


def tensor_from_partial_fn(f):
    """Embed ``f`` as the 0/1 tensor with ``t(x, y) = e_{f(x, y)}`` where defined, 0 elsewhere."""
    t = np.zeros((f.d, f.d, f.d), dtype=int)
    for x, y, z in f.support():
        t[x, y, z] = 1
    return BilinearBase(f.d, t)


@dataclass(frozen=True)
class ProductConvSpec:
    """The product-structured map ``t = b^k`` on ``D = B^k``."""

    base: BilinearBase
    power: int

    def __post_init__(self):
        if self.power < 1:
            raise DomainError("power k must be at least 1")

    @property
    def d(self):
        return self.base.d

    @property
    def size(self):
        return self.base.d ** self.power


class DVector:
    """A vector of exact rationals indexed by ``B^k``.

    Stored as integer numerators ``num`` over a single positive denominator
    ``den`` in lowest terms (``gcd(num..., den) == 1``), so two equal vectors
    always have identical representations.
    """

    __slots__ = ("d", "k", "num", "den")

    def __init__(self, d, k, num, den=1):
        num = np.asarray(num)
        if num.ndim != 1 or num.shape[0] != d ** k:
            raise DomainError(f"expected {d ** k} entries for d={d}, k={k}, got shape {num.shape}")
        if den <= 0:
            raise DomainError("denominator must be positive")
        self.d, self.k = d, k
        self.num, self.den = arith.reduce(num, int(den))

    @classmethod
    def from_values(cls, d, k, values):
        num, den = arith.scale_to_integers(list(values))
        return cls(d, k, num.reshape(-1), den)

    @classmethod
    def zeros(cls, d, k):
        return cls(d, k, np.zeros(d ** k, dtype=np.int64))

    @classmethod
    def ones(cls, d, k):
        return cls(d, k, np.ones(d ** k, dtype=np.int64))

    @classmethod
    def unit(cls, d, k, at):
        """Canonical basis vector at an integer index or a k-tuple."""
        if not isinstance(at, (int, np.integer)):
            at = index_of(at, d, k)
        v = np.zeros(d ** k, dtype=np.int64)
        v[at] = 1
        return cls(d, k, v)

    @property
    def size(self):
        return self.d ** self.k

    @property
    def entries(self):
        return [Fraction(int(x), self.den) for x in self.num]

    def __getitem__(self, i):
        if not isinstance(i, (int, np.integer)):
            i = index_of(i, self.d, self.k)
        return Fraction(int(self.num[i]), self.den)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        if not isinstance(other, DVector):
            return NotImplemented
        return (self.d == other.d and self.k == other.k and self.den == other.den
                and bool(np.array_equal(arith.widen(self.num), arith.widen(other.num))))

    def __add__(self, other):
        self._check_same_shape(other)
        a = arith.mul(self.num, other.den)
        b = arith.mul(other.num, self.den)
        return DVector(self.d, self.k, arith.add(a, b), self.den * other.den)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, q):
        q = Fraction(q)
        return DVector(self.d, self.k, arith.mul(self.num, q.numerator), self.den * q.denominator)

    def __repr__(self):
        vals = ", ".join(str(x) for x in self.entries[:8])
        more = ", ..." if self.size > 8 else ""
        return f"DVector(d={self.d}, k={self.k}, [{vals}{more}])"

    def bit_length(self):
        """Largest bit length among numerators and the denominator."""
        return max(arith.maxabs(self.num).bit_length(), self.den.bit_length())

    def _check_same_shape(self, other):
        if (self.d, self.k) != (other.d, other.k):
            raise DomainError(f"vector shapes differ: d={self.d},k={self.k} vs d={other.d},k={other.k}")


def _as_rational_array(values, n, what):
    if isinstance(values, DVector):
        if values.size != n:
            raise DomainError(f"{what} has {values.size} entries, expected {n}")
        return values.num, values.den
    values = list(values)
    if len(values) != n:
        raise DomainError(f"{what} has {len(values)} entries, expected {n}")
    return arith.scale_to_integers(values)


@dataclass(frozen=True)
class RankOneTerm:
    """The rank-one map ``(x, y) -> a(x) b(y) c``."""

    a: tuple
    b: tuple
    c: tuple

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, tuple(Fraction(x) for x in getattr(self, name)))
        if not len(self.a) == len(self.b) == len(self.c):
            raise DomainError("rank-one factors must share one length")

    @property
    def dim(self):
        return len(self.a)

    def __str__(self):
        return "a={} b={} c={}".format(*(" ".join(str(x) for x in v) for v in (self.a, self.b, self.c)))


@dataclass(frozen=True)
class RankDecomposition:
    """A list of rank-one terms whose sum is a bilinear map on a domain of size ``d``."""

    d: int
    terms: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.dim != self.d:
                raise DomainError(f"term of length {t.dim} in a decomposition of dimension {self.d}")

    @property
    def rank(self):
        return len(self.terms)

    @cached_property
    def factors(self):
        """Scaled factor matrices ``((A, da), (B, db), (C, dc))``, each of shape ``(r, d)``."""
        out = []
        for name in "abc":
            rows = [getattr(t, name) for t in self.terms]
            if not rows:
                out.append((np.zeros((0, self.d), dtype=np.int64), 1))
            else:
                out.append(arith.scale_to_integers(rows))
        return tuple(out)

    def to_tensor(self):
        """Sum of the terms as a :class:`BilinearBase`."""
        t = np.zeros((self.d,) * 3, dtype=object)
        t[...] = Fraction(0)
        for term in self.terms:
            t += np.einsum("x,y,z->xyz", np.array(term.a, dtype=object),
                           np.array(term.b, dtype=object), np.array(term.c, dtype=object))
        return BilinearBase(self.d, t)

    def padded(self, r):
        """Append zero terms until the rank is at least ``r``."""
        zero = RankOneTerm((0,) * self.d, (0,) * self.d, (0,) * self.d)
        return RankDecomposition(self.d, self.terms + (zero,) * max(0, r - self.rank))


def trivial_decomposition(base):
    """One term ``e_x (x) e_y (x) b(x, y)`` per pair ``(x, y)`` with ``b(x, y) != 0``."""
    d = base.d
    terms = []
    for x, y in product(range(d), repeat=2):
        c = tuple(base.tensor[x, y, :])
        if any(v != 0 for v in c):
            ex = tuple(int(i == x) for i in range(d))
            ey = tuple(int(i == y) for i in range(d))
            terms.append(RankOneTerm(ex, ey, c))
    return RankDecomposition(d, terms)


def _check_vectors(spec, u, v):
    for name, w in (("u", u), ("v", v)):
        if not isinstance(w, DVector):
            raise DomainError(f"{name} must be a DVector")
        if (w.d, w.k) != (spec.d, spec.power):
            raise DomainError(f"{name} lives on d={w.d}, k={w.k}; spec needs d={spec.d}, k={spec.power}")


# Pairs enumerated per vectorised block in the oracle.
_ORACLE_BLOCK = 1 << 20


def _support_tables(support, d, t):
    """Flat x, y, z indices and coefficient numerators over the t-fold support product."""
    xs = np.zeros(1, dtype=np.int64)
    ys = np.zeros(1, dtype=np.int64)
    zs = np.zeros(1, dtype=np.int64)
    cs = np.ones(1, dtype=np.int64)
    sx = np.array([s[0] for s in support], dtype=np.int64)
    sy = np.array([s[1] for s in support], dtype=np.int64)
    sz = np.array([s[2] for s in support], dtype=np.int64)
    sc = arith.narrow(np.array([s[3] for s in support], dtype=object))
    for _ in range(t):
        xs = (xs[:, None] * d + sx[None, :]).ravel()
        ys = (ys[:, None] * d + sy[None, :]).ravel()
        zs = (zs[:, None] * d + sz[None, :]).ravel()
        if cs.dtype != object and sc.dtype != object and arith.maxabs(cs) * arith.maxabs(sc) < 1 << 62:
            cs = np.multiply.outer(cs, sc).ravel()
        else:
            cs = np.multiply.outer(arith.widen(cs), arith.widen(sc)).ravel()
    return xs, ys, zs, arith.narrow(cs)


def convolve_naive(spec, u, v, counter=None):
    """Ground-truth ``u * v`` by enumerating every pair in the support of ``b^k``.

    Only coordinate combinations with a non-zero base entry are visited, so
    the cost is ``s**k`` pairs for a base with ``s`` non-zero entries.  Each
    visited pair costs one multiplication ``u(x) v(y)``, plus one more for
    the coefficient when the base is not a 0/1 tensor.
    """
    _check_vectors(spec, u, v)
    d, k = spec.d, spec.power
    bnum, bden = spec.base.scaled
    support = [(x, y, z, int(bnum[x, y, z])) for x, y, z, _ in spec.base.support()]
    zero_one = bden == 1 and all(c == 1 for *_, c in support)
    w = np.zeros(d ** k, dtype=np.int64)
    den = u.den * v.den * bden ** k
    s = len(support)
    if s == 0:
        return DVector(d, k, w, den)
    t = k
    while t > 0 and s ** t > _ORACLE_BLOCK:
        t -= 1
    xs, ys, zs, cs = _support_tables(support, d, t)
    stride = d ** t
    for prefix in product(support, repeat=k - t):
        x0 = y0 = z0 = 0
        c0 = 1
        for x, y, z, c in prefix:
            x0, y0, z0, c0 = x0 * d + x, y0 * d + y, z0 * d + z, c0 * c
        contrib = arith.mul(u.num[xs + x0 * stride], v.num[ys + y0 * stride], counter)
        if not zero_one:
            contrib = arith.mul(contrib, arith.mul(cs, c0), counter)
        w = arith.scatter_add(w, zs + z0 * stride, contrib, counter)
    return DVector(d, k, w, den)


def convolve_rank1(a, b, c, u, v, counter=None):
    """Evaluate a single rank-one map: ``<u, a> <v, b> c`` in O(|D|) operations."""
    n = u.size
    if v.size != n:
        raise DomainError(f"u has {n} entries but v has {v.size}")
    an, ad = _as_rational_array(a, n, "a")
    bn, bd = _as_rational_array(b, n, "b")
    cn, cd = _as_rational_array(c, n, "c")
    su = arith.total(arith.mul(u.num, an, counter), 0, counter)
    sv = arith.total(arith.mul(v.num, bn, counter), 0, counter)
    w = arith.mul(cn, arith.mul(su, sv, counter), counter)
    return DVector(u.d, u.k, w, u.den * v.den * ad * bd * cd)


def convolve_by_decomposition(dec, u, v, counter=None):
    """Sum of :func:`convolve_rank1` over all terms, ``O(rank * |D|)`` operations.

    ``dec`` is either a :class:`RankDecomposition` whose vectors already have
    length ``|D|``, or a lifted decomposition (see :func:`fconv.decomp.kron_lift`)
    whose terms are generated block by block and never all held at once.
    """
    n = u.size
    if v.size != n:
        raise DomainError(f"u has {n} entries but v has {v.size}")
    if isinstance(dec, RankDecomposition):
        if dec.d != n:
            raise DomainError(f"decomposition has dimension {dec.d}, vectors have {n}")
        (A, da), (B, db), (C, dc) = dec.factors
        blocks = [(A, B, C)] if dec.rank else []
        scale = da * db * dc
    else:
        if dec.size != n:
            raise DomainError(f"lifted decomposition has dimension {dec.size}, vectors have {n}")
        blocks = dec.blocks()
        scale = dec.denominator
    w = np.zeros(n, dtype=np.int64)
    for A, B, C in blocks:
        su = arith.matmul(A, u.num, counter)
        sv = arith.matmul(B, v.num, counter)
        f = arith.mul(su, sv, counter)
        w = arith.add(w, arith.matmul(f, C, counter), counter)
    return DVector(u.d, u.k, w, u.den * v.den * scale)
