# Looking for small decompositions by brute force.
from fractions import Fraction

from fconv import catalog_get, search_rank, verify_decomposition
from fconv.formats import format_decomposition

cov = catalog_get("covering").base
print("covering, rank <= 1:", search_rank(cov, 1, [-1, 0, 1]))
dec = search_rank(cov, 2, [-1, 0, 1])
print(format_decomposition(dec))
print("verifies:", verify_decomposition(cov, dec))

# the 3-colouring join base needs all 3 terms
diag = catalog_get("diagonal(3)").base
print("diagonal(3), rank <= 2:", search_rank(diag, 2, [-1, 0, 1]))
print(format_decomposition(search_rank(diag, 3, [0, 1])))

# xor needs halves somewhere
xor = catalog_get("xor").base
print("xor over {-1,0,1}:", search_rank(xor, 2, [-1, 0, 1]))
print(format_decomposition(search_rank(xor, 2, [Fraction(-1, 2), Fraction(1, 2), -1, 0, 1])))
