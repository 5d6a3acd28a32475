"""Invert localized automorphisms by stabilization and look at inverse levels."""
import numpy as np

from cuntzperm import format_cycles
from cuntzperm.inverse import invert_endo, stabilization_levels, verify_coupled
from cuntzperm.named import A, B, G, J
from cuntzperm.search import SearchConfig, enumerate_automorphisms

for name, p in [("A", A), ("B", B), ("J", J), ("G", G)]:
    res = invert_endo(p)
    print(f"{name}^-1: level {res.level}, coupled equations {verify_coupled(p, res.inverse)}")
    print("    ", format_cycles(res.inverse)[:100])

# distribution of inverse levels over all of P_3^2's automorphisms
T = enumerate_automorphisms(SearchConfig(3, 2)).tables
h = stabilization_levels(T, 3, 2)
print("P_3^2 inverse levels:", dict(zip(*(a.tolist() for a in np.unique(h, return_counts=True)))))
