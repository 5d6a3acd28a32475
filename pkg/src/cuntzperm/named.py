"""The explicit permutations of W_2^k used throughout the O_2 analysis."""

from .algebra import Perm, parse_cycles

__all__ = ["F", "A", "B", "J", "G", "Y", "Z", "NAMED"]

#: flip-flop S_1 <-> S_2 at level 1
F: Perm = parse_cycles("(1,2)", 2, 1)

A: Perm = parse_cycles("(1,9)(2,4,10,12,14,16)(6,8)", 2, 4)
B: Perm = parse_cycles("(1,9)(2,4,6,10,16,12,14)", 2, 4)

#: transposition 2112 <-> 2212
J: Perm = parse_cycles("(10,12)", 2, 4)

#: 3-cycle 1112 -> 1122 -> 1222
G: Perm = parse_cycles("(9,13,15)", 2, 4)

#: Ad(Y) lambda_F lambda_A = lambda_B lambda_F
Y: Perm = parse_cycles("(1,3,5,7)(2,4,8)", 2, 3)

#: Ad(Z) lambda_A lambda_B = id
Z: Perm = parse_cycles(
    "(2,4,8)(3,7,15)(5,13,29)(9,25)(10,12)(18,20,24)(19,23)(26,28)"
    "(34,36,40)(35,39,47)(37,45)(42,44)(50,52,56)(51,55)(58,60)",
    2,
    6,
)

NAMED = {"F": F, "A": A, "B": B, "J": J, "G": G, "Y": Y, "Z": Z}
