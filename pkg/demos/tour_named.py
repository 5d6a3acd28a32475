"""Walk through the named automorphisms: trees, closures, products."""
from cuntzperm import convolve, convolve_power, format_cycles, is_automorphism
from cuntzperm.named import A, B, F, G, J
from cuntzperm.trees import extract_maps, shape_of

for name, p in [("F", F), ("A", A), ("B", B), ("J", J), ("G", G)]:
    shapes = [str(shape_of(f)) for f in extract_maps(p)] if p.k > 1 else []
    print(f"{name}: level {p.k}  {format_cycles(p)}")
    print("   automorphism:", is_automorphism(p), " tree shapes:", shapes)

# J is an involution, G has order six; each power lives two levels higher
print("J*J identity:", convolve(J, J).is_identity(), "at level", convolve(J, J).k)
for e in range(1, 7):
    g = convolve_power(G, e)
    print(f"G^{e}: level {g.k}, identity {g.is_identity()}")
