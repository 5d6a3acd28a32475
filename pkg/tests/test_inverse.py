import itertools

import numpy as np
import pytest

from cuntzperm.algebra import Perm, compose, convolve, identity, invert_perm, pad_to, parse_cycles, shift
from cuntzperm.closures import is_automorphism
from cuntzperm.inverse import (
    MAX_TABLE_ENV,
    NotStabilized,
    invert_endo,
    is_square_free,
    square_free_mask,
    stabilization_levels,
    stabilize,
    u_product,
    verify_coupled,
    verify_necU,
)
from cuntzperm.named import A, B, F, G, J


def test_u_product_basics():
    assert u_product(A, 1) == invert_perm(A)
    assert u_product(identity(2, 3), 4).is_identity()
    assert u_product(A, 3).k == 6
    with pytest.raises(Exception):
        u_product(A, 0)


def test_u_product_cocycle_small():
    for a, b in [(1, 1), (1, 2), (2, 3)]:
        lhs = u_product(J, a + b)
        rhs = compose(pad_to(u_product(J, a), lhs.k), shift(u_product(J, b), a))
        assert lhs == rhs


def test_invert_flip():
    res = invert_endo(F)
    assert res.inverse == F and res.level == 1


@pytest.mark.parametrize("p", [A, B], ids=["A", "B"])
def test_invert_named_level_seven(p):
    res = invert_endo(p)
    assert res.found and res.level <= 7
    assert convolve(p, res.inverse).is_identity()
    assert verify_coupled(p, res.inverse)


def test_invert_involutions():
    assert invert_endo(J).inverse == J
    assert convolve(G, invert_endo(G).inverse).is_identity()


def test_non_automorphism_hits_bound():
    p = parse_cycles("(1,2)", 2, 2)
    with pytest.raises(NotStabilized) as exc:
        invert_endo(p)
    assert exc.value.cutoff == 4 and not exc.value.capped
    assert stabilize(p).outcome == "not stabilized by cutoff"


def test_cutoff_validation():
    with pytest.raises(Exception):
        invert_endo(A, cutoff=2)


def test_memory_cap_reported(monkeypatch):
    monkeypatch.setenv(MAX_TABLE_ENV, str(2**9))
    with pytest.raises(NotStabilized) as exc:
        invert_endo(A)
    assert exc.value.capped and str(2**9) in str(exc.value)
    monkeypatch.setenv(MAX_TABLE_ENV, "junk")
    with pytest.raises(Exception):
        invert_endo(A)


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3)])
def test_success_iff_automorphism(n, k):
    T = np.array(list(itertools.permutations(range(n**k))))
    h = stabilization_levels(T, n, k)
    for row, lv in zip(T, h):
        assert (lv >= 0) == is_automorphism(Perm(n, k, row))


@pytest.mark.parametrize("n,k,count", [(2, 1, 2), (2, 2, 4), (2, 3, 20), (3, 1, 4), (4, 1, 10)])
def test_square_free_counts_over_all(n, k, count):
    ps = [Perm(n, k, np.array(t)) for t in itertools.permutations(range(n**k))]
    autos = [p for p in ps if is_automorphism(p)]
    assert sum(is_square_free(p) for p in autos) == count
    mask = square_free_mask(np.array([p.table for p in autos]), n, k)
    assert int(mask.sum()) == count


def test_square_free_named():
    assert not is_square_free(A)
    assert is_square_free(J) and is_square_free(F)


def test_coupled_trivial_and_negative():
    assert verify_coupled(F, F)
    assert not verify_coupled(A, A)


def test_necU_level2():
    for t in itertools.permutations(range(4)):
        p = Perm(2, 2, np.array(t))
        ok, V = verify_necU(p, 2)
        assert ok == is_automorphism(p)
        if ok:
            assert convolve(p, V).is_identity() or verify_coupled(p, V)
