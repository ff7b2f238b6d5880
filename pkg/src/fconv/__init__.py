"""Exact f-convolutions over product domains B^k.

Backends: support enumeration (``naive``), a lifted low-rank decomposition
(``rank``), Yates-style layered transforms (``yates``) and an embedding into
matrix multiplication (``strassen``).  All arithmetic is exact over Q.
"""
from .arith import OpCounter
from .core import (BilinearBase, DVector, PartialBaseFn, ProductConvSpec, RankDecomposition,
                   RankOneTerm, convolve_by_decomposition, convolve_naive, convolve_rank1,
                   index_of, tensor_from_partial_fn, trivial_decomposition, tuple_of)
from .decomp import (CatalogEntry, LiftedDecomposition, catalog_get, kron_lift, search_rank,
                     verify_decomposition)
from .engine import BACKENDS, convolve, random_vector
from .errors import (DomainError, FconvError, ParseError, PreconditionError,
                     SearchBudgetExceeded, ValidationError)
from .strassen import (NAIVE, EmbeddingPlan, MatmulBackend, MatrixQ, apply_phi, build_U,
                       build_V, matmul, strassen7, strassen_convolve)
from .treedec import Graph, NiceTreeDecomposition, TreeDecomposition, make_nice, validate_nice
from .twdp import (dp_count_3colorings, dp_count_dominating_sets, dp_count_perfect_matchings,
                   subset_convolution_ranked)
from .yates import YatesPlan, yates_convolve, yates_stage1, yates_stage2

__version__ = "0.1.0"
