"""Counting dynamic programs over nice tree decompositions.

Tables are numpy object arrays of Python ints with one axis per bag vertex
(bag vertices in sorted order).  Join nodes hand their tables to the
convolution engine.
"""
import numpy as np

from . import arith
from .arith import OpCounter
from .core import DVector
from .decomp import FUTURE, IN, PAST, catalog_get
from .engine import convolve
from .errors import DomainError
from .yates import YatesPlan, backward_transform, forward_transform


def subset_convolution_ranked(u, v, k, counter=None):
    """Subset convolution on ``{0,1}^k`` through covering products of weight slices.

    Splits ``u`` and ``v`` by Hamming weight, transforms every slice once with
    the covering decomposition, multiplies slices whose weights add up to
    ``l`` in the transformed domain, transforms back, and keeps the weight-``l``
    entries of the ``l``-th result.  About ``2^k k^2`` operations.
    """
    n = 1 << k
    if u.size != n or v.size != n or u.d != 2 or v.d != 2:
        raise DomainError(f"subset convolution needs two vectors of length 2^{k}")
    pc = np.array([bin(z).count("1") for z in range(n)])
    plan = YatesPlan(catalog_get("covering").decomposition, k)
    (A, da), (B, db), (C, dc) = plan.factors
    weights = np.arange(k + 1)[:, None] == pc[None, :]
    us = np.where(weights, arith.widen(u.num)[None, :], 0)
    vs = np.where(weights, arith.widen(v.num)[None, :], 0)
    uh = forward_transform(A, arith.narrow(us), 2, k, counter)
    vh = forward_transform(B, arith.narrow(vs), 2, k, counter)
    layers = []
    for l in range(k + 1):
        acc = arith.mul(uh[0], vh[l], counter)
        for i in range(1, l + 1):
            acc = arith.add(acc, arith.mul(uh[i], vh[l - i], counter), counter)
        layers.append(acc)
    back = backward_transform(C, np.stack(layers), 2, k, counter)
    w = back[pc, np.arange(n)]
    return DVector(2, k, w, u.den * v.den * (da * db * dc) ** k)


def _axis_index(ndim, fixed):
    idx = [slice(None)] * ndim
    for ax, val in fixed.items():
        idx[ax] = val
    return tuple(idx)


def _take(T, s, axis):
    return np.array(np.take(T, s, axis=axis), dtype=object)


def _check(g, ntd):
    ntd.validate(g)


class _Joiner:
    """Runs join-node convolutions on one backend and logs their cost."""

    def __init__(self, entry, backend, counter, join_log, matmul=None):
        self.entry = entry
        self.backend = backend
        self.counter = counter
        self.join_log = join_log
        self.kw = {} if matmul is None else {"matmul": matmul}

    def convolve(self, x, y, w, counter):
        d = self.entry.d
        u = DVector(d, w, x.reshape(-1))
        v = DVector(d, w, y.reshape(-1))
        if self.backend == "ranked":
            if w == 0:
                out = convolve(self.entry, 0, u, v, "naive", counter)
            else:
                out = subset_convolution_ranked(u, v, w, counter)
        else:
            out = convolve(self.entry, w, u, v, self.backend, counter, **self.kw)
        assert out.den == 1
        return arith.widen(out.num).reshape((d,) * w)

    def log(self, node, w, count, local):
        if self.counter is not None:
            self.counter.multiplications += local.multiplications
            self.counter.additions += local.additions
            self.counter.max_bit_length = max(self.counter.max_bit_length, local.max_bit_length)
        if self.join_log is not None:
            self.join_log.append({"node": node, "bag_size": w, "convolutions": count,
                                  "multiplications": local.multiplications,
                                  "additions": local.additions})


def dp_count_3colorings(g, ntd, backend="yates", counter=None, join_log=None, matmul=None):
    """Number of proper 3-colourings of ``g``; joins convolve with the diagonal(3) base."""
    _check(g, ntd)
    joiner = _Joiner(catalog_get("diagonal(3)"), backend, counter, join_log, matmul)
    tables = {}
    for i, nd in enumerate(ntd.nodes):
        if nd.kind == "leaf":
            T = np.array(1, dtype=object)
        elif nd.kind == "introduce":
            T0 = tables.pop(nd.children[0])
            pos = nd.bag.index(nd.vertex)
            T = np.stack([T0] * 3, axis=pos).copy()
            for u in g.adj[nd.vertex]:
                if u in nd.bag:
                    pu = nd.bag.index(u)
                    for c in range(3):
                        T[_axis_index(T.ndim, {pos: c, pu: c})] = 0
        elif nd.kind == "forget":
            T0 = tables.pop(nd.children[0])
            pos = ntd.nodes[nd.children[0]].bag.index(nd.vertex)
            T = np.asarray(T0.sum(axis=pos), dtype=object)
        else:
            x, y = (tables.pop(c) for c in nd.children)
            local = OpCounter()
            T = joiner.convolve(x, y, len(nd.bag), local)
            joiner.log(i, len(nd.bag), 1, local)
        tables[i] = T
    return int(tables[ntd.root])


def dp_count_perfect_matchings(g, ntd, backend="ranked", counter=None, join_log=None, matmul=None):
    """Number of perfect matchings of ``g``.

    Vertex states are 0 (unmatched) and 1 (matched).  Each edge is decided
    at the forget node of whichever endpoint is forgotten first, where the
    other endpoint is still in the bag, so no matching is counted twice.
    Joins use ranked subset convolution unless another backend is named.
    """
    _check(g, ntd)
    joiner = _Joiner(catalog_get("subset_trivial"), backend, counter, join_log, matmul)
    tables = {}
    for i, nd in enumerate(ntd.nodes):
        if nd.kind == "leaf":
            T = np.array(1, dtype=object)
        elif nd.kind == "introduce":
            T0 = tables.pop(nd.children[0])
            pos = nd.bag.index(nd.vertex)
            T = np.stack([T0, np.zeros_like(T0)], axis=pos)
        elif nd.kind == "forget":
            T0 = tables.pop(nd.children[0])
            child_bag = ntd.nodes[nd.children[0]].bag
            pos = child_bag.index(nd.vertex)
            T = _take(T0, 1, pos)
            free = _take(T0, 0, pos)
            for u in g.adj[nd.vertex]:
                if u in nd.bag:
                    pu = nd.bag.index(u)
                    T[_axis_index(T.ndim, {pu: 1})] += free[_axis_index(T.ndim, {pu: 0})]
            T = np.asarray(T, dtype=object)
        else:
            x, y = (tables.pop(c) for c in nd.children)
            local = OpCounter()
            T = joiner.convolve(x, y, len(nd.bag), local)
            joiner.log(i, len(nd.bag), 1, local)
        tables[i] = T
    return int(tables[ntd.root])


def _in_count(w):
    """Number of coordinates in state ``in`` for every bag state, as a flat array."""
    if w == 0:
        return np.zeros(1, dtype=np.int64)
    grids = np.indices((3,) * w).reshape(w, -1)
    return (grids == IN).sum(axis=0)


def dp_count_dominating_sets(g, ntd, backend="yates", counter=None, join_log=None, matmul=None):
    """Number of dominating sets of each size ``0..n``, as a list of ints.

    States are ``in``, ``future`` (not in the set, not yet dominated) and
    ``past`` (not in the set, already dominated).  Tables carry a leading
    size axis; a bag vertex in state ``in`` is counted at its introduce node,
    so a join adds the two sizes and subtracts the number of ``in``
    coordinates it shares.  Joins convolve with the rank-3 domset base.
    """
    _check(g, ntd)
    n = g.n
    joiner = _Joiner(catalog_get("domset"), backend, counter, join_log, matmul)
    tables = {}
    for idx, nd in enumerate(ntd.nodes):
        if nd.kind == "leaf":
            T = np.zeros(n + 1, dtype=object)
            T[0] = 1
        elif nd.kind == "introduce":
            T0 = tables.pop(nd.children[0])
            w0 = T0.ndim - 1
            pos = nd.bag.index(nd.vertex)
            old_bag = ntd.nodes[nd.children[0]].bag
            nbr_axes = [1 + old_bag.index(u) for u in g.adj[nd.vertex] if u in old_bag]
            # v not in the set: past if some neighbour is in, else future
            has_in = np.zeros((3,) * w0, dtype=bool)
            for ax in nbr_axes:
                shape = [1] * w0
                shape[ax - 1] = 3
                has_in = has_in | (np.arange(3) == IN).reshape(shape)
            T_past = np.where(has_in[None], T0, 0)
            T_future = np.where(has_in[None], 0, T0)
            # v in the set: neighbours in future become past, one more set member
            T_in = T0
            for ax in nbr_axes:
                parts = [_take(T_in, s, ax) for s in range(3)]
                moved = [None] * 3
                moved[IN] = parts[IN]
                moved[FUTURE] = np.zeros_like(parts[FUTURE])
                moved[PAST] = parts[FUTURE] + parts[PAST]
                T_in = np.stack(moved, axis=ax)
            T_in = np.concatenate([np.zeros_like(T_in[:1]), T_in[:-1]], axis=0)
            states = [None] * 3
            states[IN], states[FUTURE], states[PAST] = T_in, T_future, T_past
            T = np.stack(states, axis=1 + pos)
        elif nd.kind == "forget":
            T0 = tables.pop(nd.children[0])
            pos = ntd.nodes[nd.children[0]].bag.index(nd.vertex)
            T = _take(T0, IN, 1 + pos) + _take(T0, PAST, 1 + pos)
        else:
            x, y = (tables.pop(c) for c in nd.children)
            w = len(nd.bag)
            ins = _in_count(w)
            flat = np.zeros((n + 1, 3 ** w), dtype=object)
            live_x = [i for i in range(n + 1) if np.any(x[i] != 0)]
            live_y = [j for j in range(n + 1) if np.any(y[j] != 0)]
            local = OpCounter()
            count = 0
            for i in live_x:
                for j in live_y:
                    tau = joiner.convolve(x[i], y[j], w, local).reshape(-1)
                    count += 1
                    size = i + j - ins
                    keep = (size >= 0) & (size <= n) & (tau != 0)
                    np.add.at(flat, (size[keep], np.nonzero(keep)[0]), tau[keep])
            joiner.log(idx, w, count, local)
            T = flat.reshape((n + 1,) + (3,) * w)
        tables[idx] = np.asarray(T, dtype=object)
    return [int(x) for x in tables[ntd.root]]
