"""Count the automorphisms coming from P_2^4 and split them into relabeling classes."""
import time

from cuntzperm.named import B
from cuntzperm.search import SearchConfig, enumerate_automorphisms, match_named

t0 = time.time()
res = enumerate_automorphisms(SearchConfig(2, 4, mode="square-free"))
rep = res.report
print(f"N = {rep.total}, classes = {rep.classes}, square-free = {rep.square_free}  ({time.time() - t0:.1f}s)")
print("surviving shape pairs:", rep.shape_stats)

names = match_named(rep.orbits, {"B": B})
for i, orb in enumerate(rep.orbits):
    tag = [k for k, v in names.items() if v == i]
    print(f"{i:2d}  size {orb.size}  sf {orb.square_free:4d}  {orb.representative}  {' '.join(tag)}")
