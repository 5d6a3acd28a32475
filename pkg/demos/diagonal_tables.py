"""Images of cylinder projections under A, G and J."""
import itertools

from cuntzperm import Word
from cuntzperm.diagonal import act_on_projection, diag_table, format_diag_table, partition_of_unity
from cuntzperm.named import A, G, J

print(format_diag_table({"A": diag_table(A, 3), "G": diag_table(G, 3), "J": diag_table(J, 3)}))

# every level of cylinders is sent to another partition of the Cantor set
for name, p in [("A", A), ("G", G), ("J", J)]:
    imgs = [act_on_projection(p, Word(2, t)) for t in itertools.product((1, 2), repeat=4)]
    print(name, "level-4 images partition unity:", partition_of_unity(imgs))
