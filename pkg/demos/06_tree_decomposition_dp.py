# Counting problems on a tree decomposition; join nodes are convolutions.
from itertools import combinations

from fconv import (Graph, TreeDecomposition, dp_count_3colorings, dp_count_dominating_sets,
                   dp_count_perfect_matchings, make_nice)

# a 3x3 grid, decomposed along its columns
cells = {(r, c): 3 * r + c for r in range(3) for c in range(3)}
edges = [(cells[r, c], cells[r, c + 1]) for r in range(3) for c in range(2)]
edges += [(cells[r, c], cells[r + 1, c]) for r in range(2) for c in range(3)]
g = Graph(9, edges)
bags = [{0, 3, 6, 1}, {1, 3, 6, 4}, {1, 4, 6, 7}, {1, 4, 7, 2}, {2, 4, 7, 5}, {2, 5, 7, 8}]
td = TreeDecomposition(bags, [(i, i + 1) for i in range(5)])
ntd = make_nice(td, g)
print("width", ntd.width, "nodes", len(ntd.nodes))
print("3-colourings:", dp_count_3colorings(g, ntd))
print("perfect matchings:", dp_count_perfect_matchings(g, ntd))  # 9 vertices: 0

# a star of K5s gives join nodes with 5-vertex bags
centre = {0, 1, 2, 3, 4}
leaves = [{0, 1, 2, 3, 5}, {1, 2, 3, 4, 6}, {0, 2, 3, 4, 7}]
h = Graph(8, sorted({e for b in [centre] + leaves for e in combinations(sorted(b), 2)}))
ntd = make_nice(TreeDecomposition([centre] + leaves, [(0, 1), (0, 2), (0, 3)]), h)
for backend in ("naive", "yates"):
    log = []
    counts = dp_count_dominating_sets(h, ntd, backend=backend, join_log=log)
    per = [round(e["multiplications"] / e["convolutions"]) for e in log]
    print(f"{backend:6s} dominating sets by size {counts}; mults per join convolution {per}")
# naive pays 5^w = 3125 pairs per convolution here; yates pays about 9 w 3^w,
# which is larger at w = 5 and only drops below 5^w from w = 9 on
