"""One entry point over the interchangeable convolution backends."""
import numpy as np

from . import arith
from .core import DVector, ProductConvSpec, convolve_by_decomposition, convolve_naive
from .decomp import kron_lift
from .errors import DomainError
from .strassen import NAIVE, strassen_convolve
from .yates import yates_convolve

BACKENDS = ("naive", "rank", "yates", "strassen")


def convolve(entry, k, u, v, backend="yates", counter=None, matmul=NAIVE, decomposition=None):
    """Convolve ``u`` and ``v`` under the ``k``-th power of a catalog entry's base.

    ``decomposition`` overrides the entry's own decomposition for the
    ``rank`` and ``yates`` backends.  ``k = 0`` is the one-point domain,
    where the convolution is the product of the two scalars.
    """
    if k == 0:
        if u.size != 1 or v.size != 1:
            raise DomainError("k = 0 needs one-entry vectors")
        return DVector(entry.d, 0, arith.mul(u.num, v.num, counter), u.den * v.den)
    dec = decomposition if decomposition is not None else entry.decomposition
    if backend == "naive":
        return convolve_naive(ProductConvSpec(entry.base, k), u, v, counter)
    if backend == "rank":
        return convolve_by_decomposition(kron_lift(dec, k), u, v, counter)
    if backend == "yates":
        return yates_convolve(dec, k, u, v, counter)
    if backend == "strassen":
        if entry.fn is None:
            raise DomainError(f"{entry.name}: the strassen backend needs a partial-function base")
        return strassen_convolve(entry.fn, k, u, v, matmul, counter)
    raise DomainError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")


def random_vector(rng, d, k, low=-9, high=9):
    """Integer-valued test vector with entries drawn uniformly from ``[low, high]``."""
    return DVector(d, k, rng.integers(low, high + 1, size=d ** k, dtype=np.int64))
