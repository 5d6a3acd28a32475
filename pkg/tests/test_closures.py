import itertools

import numpy as np
import pytest

from cuntzperm.algebra import Perm, _trusted, identity, parse_cycles
from cuntzperm.closures import (
    ResourceCapExceeded,
    boolean_nilpotency_index,
    diagnose,
    is_automorphism,
    is_diag_automorphism,
    pair_maps,
    psi_closure,
    ring_nilpotent_oracle,
    ring_nilpotent_oracle_batch,
    sigma_closure,
)
from cuntzperm.named import A, B, G, J
from cuntzperm.trees import extract_maps


def _all(n, k):
    return [Perm(n, k, np.array(t)) for t in itertools.permutations(range(n**k))]


@pytest.mark.parametrize("n,k,diag,full", [(2, 1, 2, 2), (3, 1, 6, 6), (2, 2, 8, 4), (2, 3, 384, 48)])
def test_brute_counts(n, k, diag, full):
    ps = _all(n, k)
    assert sum(is_diag_automorphism(p) for p in ps) == diag
    assert sum(is_automorphism(p) for p in ps) == full


def test_named_are_automorphisms():
    for p in (A, B, G, J):
        assert is_automorphism(p)


def test_closure_state_unpacks():
    ok, depth = sigma_closure(extract_maps(A))
    assert ok and depth >= 1
    st = psi_closure(A)
    assert st.ok and st.members.shape == (8, 8)
    assert not st.members.diagonal().any()


def test_pair_maps_annihilate_mismatched_last_letters():
    pm = pair_maps(identity(2, 3))
    # ranks 0, 1, 2 are the words 11, 21, 12; 1 alpha keeps alpha's last letter
    assert pm(1, 1, 0, 2) is None  # 111 vs 112
    assert pm(1, 1, 0, 1) == (0, 2)  # 111, 121 -> 11, 12


def test_oracle_agrees_exhaustively_level2():
    for p in _all(2, 2):
        assert ring_nilpotent_oracle(p) == (is_diag_automorphism(p), is_automorphism(p))


def test_batch_oracle_matches_single():
    rng = np.random.default_rng(3)
    T = np.array([rng.permutation(16) for _ in range(200)] + [A.table, B.table, J.table])
    b, d = ring_nilpotent_oracle_batch(T, 2, 4)
    for row, bb, dd in zip(T, b, d):
        assert ring_nilpotent_oracle(_trusted(2, 4, row)) == (bb, bb and dd)


def test_nilpotency_index():
    assert boolean_nilpotency_index(np.array([[0, 1], [0, 0]])) == 2
    assert boolean_nilpotency_index(np.array([[1]])) is None
    assert boolean_nilpotency_index(np.zeros((0, 0))) == 0


def test_oracle_cap():
    with pytest.raises(ResourceCapExceeded):
        ring_nilpotent_oracle(A, max_dim=10)


def test_diagnose_report():
    d = diagnose(parse_cycles("(1,2)", 2, 2))
    assert d["automorphism"] is False and d["oracle"]["agrees"]
    d = diagnose(G)
    assert d["automorphism"] and all(t["rooted_tree"] for t in d["trees"])


def test_level_one_always_automorphism():
    for p in _all(3, 1):
        assert sigma_closure(extract_maps(p)).ok and psi_closure(p).ok
