# Third-power convolutions as one matrix product.
import math

import numpy as np

from fconv import (DVector, OpCounter, ProductConvSpec, apply_phi, build_U, build_V,
                   catalog_get, convolve_naive, strassen7, strassen_convolve)

f = catalog_get("subset_trivial").fn  # x | y, undefined on (1, 1)
rng = np.random.default_rng(1)
u = DVector(2, 3, rng.integers(-3, 4, 8))
v = DVector(2, 3, rng.integers(-3, 4, 8))

U = build_U(f, u.num)
V = build_V(f, v.num)
print("U =\n", U)
print("V =\n", V)
w = apply_phi(f, U @ V)
print("phi(UV)  ", w)
print("oracle   ", convolve_naive(ProductConvSpec(catalog_get("subset_trivial").base, 3), u, v).num)

# bigger k: coordinates go into three blocks; any leftover ones are padded
# with a one-symbol alphabet, so partial f still works
for k in (6, 7, 9):
    u = DVector(2, k, rng.integers(-9, 10, 2 ** k))
    v = DVector(2, k, rng.integers(-9, 10, 2 ** k))
    c = OpCounter()
    got = strassen_convolve(f, k, u, v, strassen7(cutoff=1), c)
    ok = got == convolve_naive(ProductConvSpec(catalog_get("subset_trivial").base, k), u, v)
    print(f"k={k}: {c.multiplications} mults, matches oracle: {ok}")

# seven products per halving: going from k=6 to k=9 squares the side by 8
a = OpCounter()
strassen_convolve(f, 6, DVector.ones(2, 6), DVector.ones(2, 6), strassen7(1), a)
b = OpCounter()
strassen_convolve(f, 9, DVector.ones(2, 9), DVector.ones(2, 9), strassen7(1), b)
print("log2 ratio", math.log2(b.multiplications / a.multiplications), "vs 2 log2 7 =", 2 * math.log2(7))
