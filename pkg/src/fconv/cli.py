"""Command-line front end: ``fconv {convolve,verify,bench,decompose,dp}``.

Exit codes: 0 ok, 1 verification failure, 2 parse or usage error,
3 dimension or validation error.
"""
import argparse
import csv
import hashlib
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import OpCounter
from .core import PartialBaseFn, tensor_from_partial_fn, trivial_decomposition
from .decomp import CatalogEntry, catalog_get, search_rank, verify_decomposition
from .engine import BACKENDS, convolve, random_vector
from .errors import (DomainError, ParseError, PreconditionError, SearchBudgetExceeded,
                     ValidationError)
from .formats import (format_decomposition, format_rational, format_vector, parse_base_file,
                      parse_decomposition, parse_graph, parse_td, parse_vector)
from .strassen import NAIVE, strassen7
from .treedec import make_nice
from .twdp import dp_count_3colorings, dp_count_dominating_sets, dp_count_perfect_matchings


THREADS_ENV = "FCONV_THREADS"


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    backend: str
    digest: str
    multiplications: int
    additions: int
    max_bit_length: int
    wall_ms: float


def digest(vec):
    return hashlib.sha256(format_vector(vec).encode()).hexdigest()


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def resolve_base(spec):
    """Catalog entry for ``covering|xor|subset|domset|diagonal:<d>|file:<path>``."""
    if spec.startswith("file:"):
        path = spec[5:]
        parsed = parse_base_file(_read(path), source=path)
        if isinstance(parsed, PartialBaseFn):
            base = tensor_from_partial_fn(parsed)
            return CatalogEntry(path, base, trivial_decomposition(base), parsed)
        return CatalogEntry(path, parsed, trivial_decomposition(parsed), None)
    try:
        return catalog_get(spec)
    except KeyError as e:
        raise UsageError(e.args[0]) from None


def _matmul(args):
    if args.matmul == "strassen7":
        return strassen7(args.cutoff)
    return NAIVE


def _threads(args):
    if args.threads is not None:
        n = args.threads
    else:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(raw)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _load_dec(path, entry):
    dec = parse_decomposition(_read(path), source=path)
    if dec.d != entry.d:
        raise DomainError(f"{path}: decomposition has dimension {dec.d}, base has {entry.d}")
    return dec


def _check_vec(vec, entry, k, what):
    if vec.d != entry.d or vec.k != k:
        raise DomainError(f"{what} has d={vec.d}, k={vec.k}; expected d={entry.d}, k={k}")


# convolve

def _input_vectors(args, entry):
    texts = {}
    if args.u is None or args.v is None:
        stdin = sys.stdin.read()
        parts = stdin.split("\n---\n") if "\n---\n" in stdin else stdin.split("---\n", 1)
        missing = [n for n in ("u", "v") if getattr(args, n) is None]
        if len(parts) != len(missing):
            raise ParseError(f"standard input must hold {len(missing)} vector(s) separated by a '---' line",
                             None, None, "<stdin>")
        texts.update(zip(missing, parts))
    for n in ("u", "v"):
        path = getattr(args, n)
        if path is not None:
            texts[n] = _read(path)
    out = []
    for n in ("u", "v"):
        src = getattr(args, n) or "<stdin>"
        vec = parse_vector(texts[n], entry.d, args.k, source=src)
        _check_vec(vec, entry, args.k, n)
        out.append(vec)
    return out


def cmd_convolve(args, out):
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    entry = resolve_base(args.base)
    dec = None
    if args.dec:
        dec = _load_dec(args.dec, entry)
        if not verify_decomposition(entry.base, dec):
            raise ValidationError(f"{args.dec}: decomposition does not sum to the base tensor")
    u, v = _input_vectors(args, entry)
    counter = OpCounter()
    w = convolve(entry, args.k, u, v, args.backend, counter, matmul=_matmul(args), decomposition=dec)
    out.write(format_vector(w, header=args.header))
    if args.counter:
        print(f"# multiplications={counter.multiplications} additions={counter.additions} "
              f"max_bit_length={counter.max_bit_length}", file=sys.stderr)
    return 0


# verify

def _applicable(entry):
    return [b for b in BACKENDS if b != "strassen" or entry.fn is not None]


def _run(entry, k, u, v, backend, args, dec):
    counter = OpCounter()
    t0 = time.perf_counter()
    w = convolve(entry, k, u, v, backend, counter, matmul=_matmul(args), decomposition=dec)
    return w, counter, (time.perf_counter() - t0) * 1000


def cmd_verify(args, out):
    if args.k < 1:
        raise UsageError("verify needs --k >= 1")
    if args.trials < 1:
        raise UsageError("verify needs --trials >= 1")
    entry = resolve_base(args.base)
    dec = _load_dec(args.dec, entry) if args.dec else None
    backends = _applicable(entry)
    rng = np.random.default_rng(args.seed)
    instances = [(random_vector(rng, entry.d, args.k), random_vector(rng, entry.d, args.k))
                 for _ in range(args.trials)]

    def trial(uv):
        return [_run(entry, args.k, uv[0], uv[1], b, args, dec) for b in backends]

    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        results = list(pool.map(trial, instances))

    reports = []
    for j, b in enumerate(backends):
        h = hashlib.sha256()
        mults = adds = bits = 0
        ms = 0.0
        for res in results:
            w, c, t = res[j]
            h.update(digest(w).encode())
            mults += c.multiplications
            adds += c.additions
            bits = max(bits, c.max_bit_length)
            ms += t
        reports.append(RunReport(b, h.hexdigest()[:16], mults, adds, bits,
                                 0.0 if args.no_timing else ms))
    out.write(f"{'backend':<10} {'digest':<16} {'multiplications':>15} {'additions':>12} "
              f"{'max_bits':>8} {'wall_ms':>10}\n")
    for r in reports:
        out.write(f"{r.backend:<10} {r.digest:<16} {r.multiplications:>15} {r.additions:>12} "
                  f"{r.max_bit_length:>8} {r.wall_ms:>10.1f}\n")

    for t, res in enumerate(results):
        ref = res[0][0]
        for j, b in enumerate(backends[1:], 1):
            w = res[j][0]
            if w != ref:
                i = next(i for i in range(ref.size) if ref[i] != w[i])
                out.write(f"MISMATCH trial {t}: {b} differs from {backends[0]} at index {i}: "
                          f"{backends[0]}={format_rational(ref[i])} {b}={format_rational(w[i])}\n")
                return 1
    out.write(f"OK {args.trials} trials, {len(backends)} backends agree\n")
    return 0


# bench

def _k_range(text):
    try:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    except ValueError:
        raise UsageError(f"--k-range must look like a..b, got {text!r}") from None


def cmd_bench(args, out):
    entry = resolve_base(args.base)
    ks = _k_range(args.k_range)
    backends = args.backend.split(",")
    for b in backends:
        if b not in BACKENDS:
            raise UsageError(f"unknown backend {b!r}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["k", "backend", "multiplications", "additions", "wall_ms"])
    for k in ks:
        if k < 1:
            raise UsageError("--k-range must start at 1 or above")
        rng = np.random.default_rng([args.seed, k])
        u = random_vector(rng, entry.d, k)
        v = random_vector(rng, entry.d, k)
        for b in backends:
            _, c, ms = _run(entry, k, u, v, b, args, None)
            writer.writerow([k, b, c.multiplications, c.additions,
                             "0" if args.no_timing else f"{ms:.3f}"])
    return 0


# decompose

def cmd_decompose(args, out):
    spec = args.fn
    entry = resolve_base(spec)
    try:
        coeffs = [Fraction(c) for c in args.coeffs.split(",") if c.strip()]
    except ValueError:
        raise UsageError(f"--coeffs must be comma-separated rationals, got {args.coeffs!r}") from None
    if args.max_rank < 0:
        raise UsageError("--max-rank must be non-negative")
    dec = search_rank(entry.base, args.max_rank, coeffs, budget=args.budget)
    out.write("none\n" if dec is None else format_decomposition(dec))
    return 0


# dp

_DP = {"3col": (dp_count_3colorings, "yates"),
       "pm": (dp_count_perfect_matchings, "ranked"),
       "domset": (dp_count_dominating_sets, "yates")}


def cmd_dp(args, out):
    fn, default = _DP[args.problem]
    backend = args.backend or default
    if backend == "ranked" and args.problem != "pm":
        raise UsageError("the ranked backend only applies to pm")
    g = parse_graph(_read(args.graph), source=args.graph)
    td = parse_td(_read(args.td), source=args.td)
    ntd = make_nice(td, g)
    counter = OpCounter()
    res = fn(g, ntd, backend=backend, counter=counter, matmul=_matmul(args))
    if args.problem == "domset":
        out.write("".join(f"{i} {c}\n" for i, c in enumerate(res)))
    else:
        out.write(f"{res}\n")
    if args.counter:
        print(f"# multiplications={counter.multiplications} additions={counter.additions}",
              file=sys.stderr)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="fconv", description="Exact convolutions over product domains.")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default: ${THREADS_ENV} or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    def matmul_flags(sp):
        sp.add_argument("--matmul", choices=["naive", "strassen7"], default="naive")
        sp.add_argument("--cutoff", type=int, default=64)

    c = sub.add_parser("convolve", help="convolve two vectors")
    c.add_argument("--base", required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--backend", choices=BACKENDS, default="yates")
    matmul_flags(c)
    c.add_argument("--counter", action="store_true", help="report operation counts on stderr")
    c.add_argument("--u", help="vector file for u ('-' for stdin)")
    c.add_argument("--v", help="vector file for v ('-' for stdin)")
    c.add_argument("--dec", help="decomposition file to use instead of the catalog one")
    c.add_argument("--header", action="store_true", help="start the output with a 'vec d k' line")
    c.set_defaults(run=cmd_convolve)

    v = sub.add_parser("verify", help="cross-check all backends on random instances")
    v.add_argument("--base", required=True)
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dec", help="decomposition file for the rank and yates backends")
    v.add_argument("--no-timing", action="store_true", help="report wall_ms as 0")
    matmul_flags(v)
    v.set_defaults(run=cmd_verify)

    b = sub.add_parser("bench", help="operation counts per k, as CSV")
    b.add_argument("--base", required=True)
    b.add_argument("--k-range", required=True)
    b.add_argument("--backend", default="yates", help="backend or comma-separated list")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-timing", action="store_true", help="report wall_ms as 0")
    matmul_flags(b)
    b.set_defaults(run=cmd_bench)

    d = sub.add_parser("decompose", help="search for a low-rank decomposition")
    d.add_argument("--fn", required=True, help="file:<path> or a catalog name")
    d.add_argument("--max-rank", type=int, required=True)
    d.add_argument("--coeffs", default="-1,0,1")
    d.add_argument("--budget", type=int, default=10 ** 7)
    d.set_defaults(run=cmd_decompose)

    g = sub.add_parser("dp", help="count 3-colourings, perfect matchings or dominating sets")
    g.add_argument("problem", choices=sorted(_DP))
    g.add_argument("--graph", required=True)
    g.add_argument("--td", required=True)
    g.add_argument("--backend", choices=list(BACKENDS) + ["ranked"], default=None)
    g.add_argument("--counter", action="store_true")
    matmul_flags(g)
    g.set_defaults(run=cmd_dp)
    return p


def _glue_negative_values(argv):
    # let "--coeffs -1,0,1" through: argparse would read "-1,0,1" as a flag
    out = []
    it = iter(argv)
    for a in it:
        if a == "--coeffs":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--coeffs={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        return args.run(args, out)
    except (ParseError, UsageError) as e:
        print(f"fconv: error: {e}", file=sys.stderr)
        return 2
    except SearchBudgetExceeded as e:
        print(f"fconv: error: {e} (progress: {e.progress})", file=sys.stderr)
        return 3
    except (DomainError, ValidationError, PreconditionError) as e:
        print(f"fconv: error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
