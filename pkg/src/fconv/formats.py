"""Text formats: vectors, base functions, decompositions, graphs and tree decompositions.

Every parser rejects malformed input with a :class:`ParseError` naming the
line (and column, where one token is at fault); nothing is returned on
failure.
"""
import re
from fractions import Fraction

import numpy as np

from .core import BilinearBase, DVector, PartialBaseFn, RankDecomposition, RankOneTerm
from .errors import ParseError
from .treedec import Graph, TreeDecomposition

_TOKEN = re.compile(r"\S+")


def _lines(text, comment_prefixes=("#",)):
    """Yield ``(line_number, [(column, token), ...])`` for non-blank, non-comment lines."""
    for no, line in enumerate(text.splitlines(), 1):
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(line)]
        if not toks or any(toks[0][1].startswith(p) for p in comment_prefixes):
            continue
        yield no, toks


def _int(tok, no, source, lo=None, hi=None):
    col, s = tok
    try:
        x = int(s)
    except ValueError:
        raise ParseError(f"expected an integer, got {s!r}", no, col, source) from None
    if (lo is not None and x < lo) or (hi is not None and x > hi):
        bounds = f"{lo if lo is not None else '-inf'}..{hi if hi is not None else 'inf'}"
        raise ParseError(f"{x} outside {bounds}", no, col, source)
    return x


def _rational(tok, no, source):
    col, s = tok
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise ParseError(f"expected a rational p/q or an integer, got {s!r}", no, col, source)
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ParseError("zero denominator", no, col, source) from None


def _arity(toks, n, no, source, what):
    if len(toks) != n:
        # first surplus field, or the last one present when fields are missing
        col = toks[n][0] if len(toks) > n else (toks[-1][0] if toks else 1)
        raise ParseError(f"{what}: expected {n} fields, got {len(toks)}", no, col, source)


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# vectors

def parse_vector(text, d=None, k=None, source=None):
    """Parse ``vec d <d> k <k>`` (optional header) followed by sparse ``index value`` lines.

    A header overrides ``d`` and ``k``; without one they must be supplied.
    Absent indices are 0.
    """
    values = {}
    seen_header = False
    for no, toks in _lines(text):
        if toks[0][1] == "vec":
            if seen_header or values:
                raise ParseError("header must come first and only once", no, 1, source)
            _arity(toks, 5, no, source, "header")
            if toks[1][1] != "d" or toks[3][1] != "k":
                raise ParseError("header must read 'vec d <d> k <k>'", no, toks[1][0], source)
            d = _int(toks[2], no, source, lo=1)
            k = _int(toks[4], no, source, lo=0)
            seen_header = True
            continue
        if d is None or k is None:
            raise ParseError("vector without 'vec d <d> k <k>' header and no size given", no, 1, source)
        _arity(toks, 2, no, source, "entry")
        i = _int(toks[0], no, source, lo=0, hi=d ** k - 1)
        if i in values:
            raise ParseError(f"index {i} given twice", no, toks[0][0], source)
        values[i] = _rational(toks[1], no, source)
    if d is None or k is None:
        raise ParseError("empty vector file and no size given", None, None, source)
    dense = [Fraction(0)] * (d ** k)
    for i, q in values.items():
        dense[i] = q
    return DVector.from_values(d, k, dense)


def format_vector(vec, header=True):
    """Canonical text: header, then non-zero entries in index order."""
    out = [f"vec d {vec.d} k {vec.k}"] if header else []
    for i, q in enumerate(vec.entries):
        if q != 0:
            out.append(f"{i} {format_rational(q)}")
    return "\n".join(out) + "\n"


# base functions

def parse_base_file(text, source=None):
    """Parse a base function file.

    ``fn d <d>`` followed by ``x y z`` triples gives a :class:`PartialBaseFn`;
    ``tensor d <d>`` followed by ``x y z q`` quadruples gives a
    :class:`BilinearBase` (unlisted entries are 0).
    """
    kind = d = None
    entries = {}
    for no, toks in _lines(text):
        if kind is None:
            _arity(toks, 3, no, source, "header")
            if toks[0][1] not in ("fn", "tensor") or toks[1][1] != "d":
                raise ParseError("header must read 'fn d <d>' or 'tensor d <d>'", no, 1, source)
            kind = toks[0][1]
            d = _int(toks[2], no, source, lo=1)
            continue
        n = 3 if kind == "fn" else 4
        _arity(toks, n, no, source, "entry")
        x, y, z = (_int(t, no, source, lo=0, hi=d - 1) for t in toks[:3])
        if (x, y) in entries and kind == "fn":
            raise ParseError(f"f({x}, {y}) defined twice", no, 1, source)
        if (x, y, z) in entries:
            raise ParseError(f"entry ({x}, {y}, {z}) given twice", no, 1, source)
        if kind == "fn":
            entries[(x, y)] = z
        else:
            entries[(x, y, z)] = _rational(toks[3], no, source)
    if kind is None:
        raise ParseError("missing 'fn d <d>' or 'tensor d <d>' header", None, None, source)
    if kind == "fn":
        return PartialBaseFn.from_triples(d, [(x, y, z) for (x, y), z in entries.items()])
    t = np.zeros((d, d, d), dtype=object)
    t[...] = Fraction(0)
    for idx, q in entries.items():
        t[idx] = q
    return BilinearBase(d, t)


def format_fn(f):
    return "\n".join([f"fn d {f.d}"] + [f"{x} {y} {z}" for x, y, z in f.support()]) + "\n"


def format_tensor(base):
    lines = [f"tensor d {base.d}"]
    lines += [f"{x} {y} {z} {format_rational(q)}" for x, y, z, q in base.support()]
    return "\n".join(lines) + "\n"


# decompositions

def parse_decomposition(text, source=None):
    """Parse ``rank <r> dim <d>`` followed by ``r`` blocks of ``a:``, ``b:``, ``c:`` lines."""
    it = iter(_lines(text))
    try:
        no, toks = next(it)
    except StopIteration:
        raise ParseError("empty decomposition file", None, None, source) from None
    _arity(toks, 4, no, source, "header")
    if toks[0][1] != "rank" or toks[2][1] != "dim":
        raise ParseError("header must read 'rank <r> dim <d>'", no, 1, source)
    r = _int(toks[1], no, source, lo=0)
    d = _int(toks[3], no, source, lo=1)
    terms = []
    last = no
    for t in range(r):
        vecs = []
        for name in "abc":
            try:
                no, toks = next(it)
            except StopIteration:
                raise ParseError(f"term {t + 1}: missing '{name}:' line", last + 1, 1, source) from None
            last = no
            if toks[0][1] != f"{name}:":
                raise ParseError(f"term {t + 1}: expected '{name}:'", no, toks[0][0], source)
            _arity(toks, d + 1, no, source, f"'{name}:' line")
            vecs.append([_rational(tok, no, source) for tok in toks[1:]])
        terms.append(RankOneTerm(*vecs))
    for no, toks in it:
        raise ParseError("trailing content after the last term", no, toks[0][0], source)
    return RankDecomposition(d, terms)


def format_decomposition(dec):
    lines = [f"rank {dec.rank} dim {dec.d}"]
    for t in dec.terms:
        for name in "abc":
            lines.append(f"{name}: " + " ".join(format_rational(q) for q in getattr(t, name)))
    return "\n".join(lines) + "\n"


# graphs and tree decompositions (1-indexed on disk, 0-indexed in memory)

def parse_graph(text, source=None):
    """DIMACS/PACE-style graph: ``p tw <n> <m>`` then one ``u v`` line per edge."""
    n = m = None
    edges = []
    for no, toks in _lines(text, ("c", "#")):
        if toks[0][1] == "p":
            if n is not None:
                raise ParseError("second 'p' line", no, 1, source)
            _arity(toks, 4, no, source, "header")
            n = _int(toks[2], no, source, lo=0)
            m = _int(toks[3], no, source, lo=0)
            continue
        if n is None:
            raise ParseError("edge before the 'p tw <n> <m>' header", no, 1, source)
        _arity(toks, 2, no, source, "edge")
        u = _int(toks[0], no, source, lo=1, hi=n)
        v = _int(toks[1], no, source, lo=1, hi=n)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", no, toks[1][0], source)
        edges.append((u - 1, v - 1))
    if n is None:
        raise ParseError("missing 'p tw <n> <m>' header", None, None, source)
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, found {len(edges)}", None, None, source)
    return Graph(n, edges)


def format_graph(g):
    lines = [f"p tw {g.n} {len(g.edges)}"] + [f"{u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_td(text, source=None):
    """PACE ``.td`` file: ``s td <bags> <max bag> <n>``, ``b <id> <vertices...>`` lines, tree edges."""
    header = None
    bags = {}
    edges = []
    for no, toks in _lines(text, ("c", "#")):
        if toks[0][1] == "s":
            if header is not None:
                raise ParseError("second 's' line", no, 1, source)
            _arity(toks, 5, no, source, "header")
            if toks[1][1] != "td":
                raise ParseError("header must read 's td <bags> <max bag> <n>'", no, toks[1][0], source)
            header = tuple(_int(t, no, source, lo=0) for t in toks[2:])
            continue
        if header is None:
            raise ParseError("content before the 's td' header", no, 1, source)
        nb, maxbag, n = header
        if toks[0][1] == "b":
            if len(toks) < 2:
                raise ParseError("bag line needs an id", no, 1, source)
            i = _int(toks[1], no, source, lo=1, hi=nb)
            if i in bags:
                raise ParseError(f"bag {i} given twice", no, toks[1][0], source)
            vs = [_int(t, no, source, lo=1, hi=n) - 1 for t in toks[2:]]
            if len(vs) > maxbag:
                raise ParseError(f"bag {i} has {len(vs)} vertices, header allows {maxbag}", no, 1, source)
            bags[i] = set(vs)
        else:
            _arity(toks, 2, no, source, "tree edge")
            i = _int(toks[0], no, source, lo=1, hi=nb)
            j = _int(toks[1], no, source, lo=1, hi=nb)
            edges.append((i - 1, j - 1))
    if header is None:
        raise ParseError("missing 's td' header", None, None, source)
    missing = [i for i in range(1, header[0] + 1) if i not in bags]
    if missing:
        raise ParseError(f"bag {missing[0]} is never listed", None, None, source)
    return TreeDecomposition([bags[i] for i in range(1, header[0] + 1)], edges)


def format_td(td, n):
    maxbag = max((len(b) for b in td.bags), default=0)
    lines = [f"s td {len(td.bags)} {maxbag} {n}"]
    for i, b in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(b)]))
    lines += [f"{i + 1} {j + 1}" for i, j in td.edges]
    return "\n".join(lines) + "\n"
