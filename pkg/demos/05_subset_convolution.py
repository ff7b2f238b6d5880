# Subset convolution via ranked covering products.
import numpy as np

from fconv import (DVector, OpCounter, ProductConvSpec, catalog_get, convolve_naive,
                   subset_convolution_ranked)

ones = DVector.ones(2, 3)
print(*subset_convolution_ranked(ones, ones, 3).entries)  # 2^|z|

base = catalog_get("subset_trivial").base
rng = np.random.default_rng(2)
for k in (4, 8, 12, 14):
    u = DVector(2, k, rng.integers(-9, 10, 2 ** k))
    v = DVector(2, k, rng.integers(-9, 10, 2 ** k))
    fast, slow = OpCounter(), OpCounter()
    a = subset_convolution_ranked(u, v, k, fast)
    b = convolve_naive(ProductConvSpec(base, k), u, v, slow)
    print(f"k={k:2d} equal={a == b}  ranked mults={fast.multiplications:>9}  "
          f"3^k pairs={slow.multiplications:>8}  2^k k^2={2 ** k * k * k}")
# ranked cost tracks 2^k k^2; enumeration tracks 3^k, so the lines cross near k=20
