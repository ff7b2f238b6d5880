# How the Yates backend's cost grows with k, next to support enumeration.
from fconv import DVector, OpCounter, catalog_get, convolve

for name in ("covering", "domset"):
    entry = catalog_get(name)
    print(f"{name}: d={entry.d}, rank={entry.rank}, support={len(entry.base.support())}")
    prev = {}
    for k in range(2, 9 if entry.d == 2 else 7):
        u = v = DVector.ones(entry.d, k)
        row = [f"k={k:2d}"]
        for backend in ("yates", "naive"):
            c = OpCounter()
            convolve(entry, k, u, v, backend, c)
            ratio = c.multiplications / prev[backend] if backend in prev else float("nan")
            prev[backend] = c.multiplications
            row.append(f"{backend} {c.multiplications:>8} (x{ratio:.2f})")
        print("  ", "   ".join(row))

# yates grows by about r per step (times a slowly rising factor k),
# naive by the support size: 4 for covering, 5 for domset
