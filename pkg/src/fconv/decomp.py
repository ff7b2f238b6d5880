"""Low-rank decompositions of base maps: catalog, verification, lifting and search."""
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import lcm

import numpy as np

from . import arith
from .core import (BilinearBase, PartialBaseFn, RankDecomposition, RankOneTerm,
                   tensor_from_partial_fn, trivial_decomposition)
from .errors import DomainError, SearchBudgetExceeded

# Largest power for which LiftedDecomposition.materialize builds all r**k terms.
MATERIALIZE_CAP = 6

# domset vertex states
IN, FUTURE, PAST = 0, 1, 2


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    base: BilinearBase
    decomposition: RankDecomposition
    fn: PartialBaseFn = None

    @property
    def d(self):
        return self.base.d

    @property
    def rank(self):
        return self.decomposition.rank


def verify_decomposition(base, dec):
    """True iff the terms of ``dec`` sum to ``base`` entrywise, exactly."""
    if base.d != dec.d:
        raise DomainError(f"base has dimension {base.d}, decomposition {dec.d}")
    return dec.to_tensor() == base


def _dec(d, rows):
    return RankDecomposition(d, [RankOneTerm(a, b, c) for a, b, c in rows])


def _covering():
    fn = PartialBaseFn.from_rule(2, lambda x, y: x | y)
    dec = _dec(2, [((1, 1), (1, 1), (0, 1)),
                   ((1, 0), (1, 0), (1, -1))])
    return fn, dec


def _xor():
    fn = PartialBaseFn.from_rule(2, lambda x, y: x ^ y)
    half = Fraction(1, 2)
    dec = _dec(2, [((1, -1), (1, -1), (half, -half)),
                   ((1, 1), (1, 1), (half, half))])
    return fn, dec


def _subset():
    fn = PartialBaseFn.from_rule(2, lambda x, y: None if x & y else x | y)
    return fn, trivial_decomposition(tensor_from_partial_fn(fn))


def _domset():
    table = {(IN, IN): IN, (FUTURE, FUTURE): FUTURE,
             (PAST, FUTURE): PAST, (FUTURE, PAST): PAST, (PAST, PAST): PAST}
    fn = PartialBaseFn.from_triples(3, [(x, y, z) for (x, y), z in table.items()])
    # in on its own, plus the covering product on {future, past}
    dec = _dec(3, [((1, 0, 0), (1, 0, 0), (1, 0, 0)),
                   ((0, 1, 1), (0, 1, 1), (0, 0, 1)),
                   ((0, 1, 0), (0, 1, 0), (0, 1, -1))])
    return fn, dec


def _diagonal(d):
    fn = PartialBaseFn.from_rule(d, lambda x, y: x if x == y else None)
    rows = []
    for i in range(d):
        e = tuple(int(j == i) for j in range(d))
        rows.append((e, e, e))
    return fn, _dec(d, rows)


_BUILDERS = {
    "covering": _covering,
    "xor": _xor,
    "subset_trivial": _subset,
    "subset": _subset,
    "domset": _domset,
}

CATALOG_NAMES = ("covering", "xor", "subset_trivial", "domset", "diagonal(d)")


def catalog_get(name, d=None):
    """Look up a catalog entry by name.

    Known names are ``covering``, ``xor``, ``subset_trivial`` (alias
    ``subset``), ``domset`` and ``diagonal(d)``; the diagonal entry can also
    be requested as ``diagonal:3`` or ``catalog_get("diagonal", d=3)``.
    """
    m = re.fullmatch(r"diagonal(?:\((\d+)\)|:(\d+))?", name)
    if m:
        size = m.group(1) or m.group(2) or d
        if size is None or int(size) < 1:
            raise KeyError(f"diagonal needs a positive size, got {name!r}")
        size = int(size)
        fn, dec = _diagonal(size)
        label = f"diagonal({size})"
    elif name in _BUILDERS:
        fn, dec = _BUILDERS[name]()
        label = "subset_trivial" if name == "subset" else name
    else:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG_NAMES)}")
    base = tensor_from_partial_fn(fn)
    assert verify_decomposition(base, dec), label
    return CatalogEntry(label, base, dec, fn)


def _kron_rows(M, t):
    """Row-wise Kronecker power: row ``kappa`` is ``M[kappa_1] (x) ... (x) M[kappa_t]``."""
    r, d = M.shape
    out = np.ones((1, 1), dtype=np.int64)
    wide = arith.maxabs(M) ** t >= 1 << 62
    for _ in range(t):
        if wide:
            out = np.multiply.outer(arith.widen(out), arith.widen(M))
        else:
            out = np.multiply.outer(out, M)
        out = out.transpose(0, 2, 1, 3).reshape(out.shape[0] * r, out.shape[1] * d)
    return out if wide else arith.narrow(out)


class LiftedDecomposition:
    """The ``r**k``-term decomposition of ``b^k`` induced by an ``r``-term decomposition of ``b``.

    Terms are indexed by ``iota`` in ``[r]^k`` (lexicographic, first
    coordinate most significant) and produced on demand; nothing of size
    ``r**k * d**k`` is ever built unless :meth:`materialize` is asked to.
    """

    def __init__(self, base_dec, k):
        if k < 1:
            raise DomainError("power k must be at least 1")
        self.base_dec = base_dec
        self.power = k

    @property
    def rank(self):
        return self.base_dec.rank

    @property
    def n_terms(self):
        return self.base_dec.rank ** self.power

    @property
    def size(self):
        return self.base_dec.d ** self.power

    @property
    def denominator(self):
        (_, da), (_, db), (_, dc) = self.base_dec.factors
        return (da * db * dc) ** self.power

    def term(self, iota):
        """Materialise ``(A_iota, B_iota, C_iota)`` for one index function as a RankOneTerm."""
        if len(iota) != self.power or not all(0 <= i < self.rank for i in iota):
            raise DomainError(f"iota must be a {self.power}-tuple over 0..{self.rank - 1}")
        vecs = []
        for name in "abc":
            v = np.array([Fraction(1)], dtype=object)
            for i in iota:
                v = np.multiply.outer(v, np.array(getattr(self.base_dec.terms[i], name), dtype=object)).ravel()
            vecs.append(tuple(v))
        return RankOneTerm(*vecs)

    def terms(self):
        for iota in product(range(self.rank), repeat=self.power):
            yield self.term(iota)

    def materialize(self, cap=MATERIALIZE_CAP):
        if self.power > cap:
            raise DomainError(f"refusing to materialise {self.rank}**{self.power} terms (cap k <= {cap})")
        return RankDecomposition(self.size, list(self.terms()))

    def blocks(self, max_entries=1 << 22):
        """Yield scaled factor blocks ``(A, B, C)``, each of shape ``(terms_in_block, d**k)``.

        Rows follow the lexicographic order of ``iota``; the common
        denominator of every block is :attr:`denominator`.
        """
        r, k, n = self.rank, self.power, self.size
        if r == 0:
            return
        t = k
        while t > 0 and r ** t * n > max_entries:
            t -= 1
        mats = [m for m, _ in self.base_dec.factors]
        suffix = [_kron_rows(M, t) for M in mats]
        for prefix in product(range(r), repeat=k - t):
            block = []
            for M, S in zip(mats, suffix):
                row = _prefix_row(M, prefix)
                if S.dtype == object or row.dtype == object:
                    row, S = arith.widen(row), arith.widen(S)
                # (d^(k-t), r^t, d^t) -> (r^t, d^k)
                outer = np.multiply.outer(row, S).transpose(1, 0, 2)
                block.append(arith.narrow(outer.reshape(S.shape[0], n)))
            yield tuple(block)


def _prefix_row(M, prefix):
    row = np.ones(1, dtype=object)
    for i in prefix:
        row = np.multiply.outer(row, arith.widen(M[i])).ravel()
    return arith.narrow(row)


def kron_lift(dec, k):
    """Lift a decomposition of ``b`` to the implicit ``rank**k``-term decomposition of ``b^k``."""
    return LiftedDecomposition(dec, k)


def _rank_one_table(d, coeffs, scale):
    """Distinct non-zero rank-one tensors with factors drawn from ``coeffs``.

    Returns ``(keys, tensors, triples)`` in lexicographic order of the first
    ``(a, b, c)`` triple producing each tensor.
    """
    scaled = [int(c * scale) for c in coeffs]
    vecs = [np.array(v, dtype=np.int64) for v in product(scaled, repeat=d)]
    raw = [v for v in product(coeffs, repeat=d)]
    seen = {}
    tensors, triples = [], []
    for ia, ib, ic in product(range(len(vecs)), repeat=3):
        t = np.einsum("x,y,z->xyz", vecs[ia], vecs[ib], vecs[ic]).ravel()
        if not t.any():
            continue
        key = t.tobytes()
        if key in seen:
            continue
        seen[key] = len(tensors)
        tensors.append(t)
        triples.append((raw[ia], raw[ib], raw[ic]))
    return seen, np.array(tensors, dtype=np.int64).reshape(len(tensors), d ** 3), triples


def search_rank(base, max_rank, coeff_set, budget=10 ** 7):
    """Exhaustively look for a decomposition of ``base`` with at most ``max_rank`` terms.

    Every term ``a (x) b (x) c`` with entries of ``a``, ``b``, ``c`` drawn from
    ``coeff_set`` is considered.  Ranks are tried in increasing order and,
    within a rank, multisets of distinct rank-one tensors in lexicographic
    order (coefficients ordered by magnitude, positive first); the last term of each candidate is found by a hash lookup of the
    residual, so the search covers the same space as enumerating every
    coefficient assignment.

    Returns the first decomposition found, or ``None``.  ``None`` only means
    nothing exists over this coefficient set within the rank budget; it is
    not a lower bound on the rank over Q.

    Raises :class:`SearchBudgetExceeded` once more than ``budget`` candidate
    residuals have been examined.
    """
    if max_rank < 0:
        raise DomainError("max_rank must be non-negative")
    d = base.d
    # small magnitudes first, positive before negative, so results read naturally
    coeffs = sorted({Fraction(c) for c in coeff_set}, key=lambda c: (abs(c), c < 0))
    scale = lcm(*(c.denominator for c in coeffs)) if coeffs else 1
    target_q = base.tensor * scale ** 3
    if any(Fraction(x).denominator != 1 for x in target_q.flat):
        # unreachable target: still report an exhausted search
        return None
    target = np.array([int(x) for x in target_q.flat], dtype=np.int64)
    if not target.any():
        return RankDecomposition(d, [])
    if max_rank == 0 or not coeffs:
        return None
    keys, tensors, triples = _rank_one_table(d, coeffs, scale)
    n = len(tensors)
    examined = 0
    for r in range(1, max_rank + 1):
        for prefix in combinations_with_replacement(range(n), r - 1):
            residual = target - tensors[list(prefix)].sum(axis=0) if prefix else target
            lo = prefix[-1] if prefix else 0
            examined += 1
            if examined > budget:
                raise SearchBudgetExceeded(
                    f"search_rank examined more than {budget} candidates",
                    {"rank": r, "prefix": prefix, "examined": examined - 1,
                     "rank_one_tensors": n})
            j = keys.get(residual.tobytes())
            if j is not None and j >= lo:
                chosen = list(prefix) + [j]
                return RankDecomposition(d, [RankOneTerm(*triples[i]) for i in chosen])
    return None
