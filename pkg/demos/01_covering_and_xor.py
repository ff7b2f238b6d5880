# Covering (OR) and XOR products on {0,1}^k, three ways.
import numpy as np

from fconv import DVector, OpCounter, catalog_get, convolve

cov = catalog_get("covering")
print(cov.name, "rank", cov.rank)
for t in cov.decomposition.terms:
    print("  ", t)

# small case first: all-ones vectors, every z counts its (x, y) with x | y = z
ones = DVector.ones(2, 2)
print("all-ones, k=2:", *convolve(cov, 2, ones, ones, "naive").entries)  # 1 3 3 9

# same answer from every backend, very different cost
rng = np.random.default_rng(0)
k = 10
u = DVector(2, k, rng.integers(-9, 10, 2 ** k))
v = DVector(2, k, rng.integers(-9, 10, 2 ** k))
results = {}
for backend in ("naive", "rank", "yates", "strassen"):
    c = OpCounter()
    results[backend] = convolve(cov, k, u, v, backend, c)
    print(f"{backend:9s} mults={c.multiplications:>9} adds={c.additions:>9} max bits={c.max_bit_length}")
print("all equal:", len({r.num.tobytes() for r in results.values()}) == 1)

# XOR: the Hadamard terms carry a factor 1/2 in c so the sum is exact
xor = catalog_get("xor")
for t in xor.decomposition.terms:
    print("  ", t)
ones = DVector.ones(2, 3)
print("xor all-ones, k=3:", *convolve(xor, 3, ones, ones).entries)  # eight 8s

# rational inputs stay exact
q = DVector.from_values(2, 1, ["1/3", "-2/5"])
print(*convolve(xor, 1, q, q).entries)
