"""Acceptance suite: one recorded PASS/FAIL line per criterion, printed after the run."""

import itertools
import json
from math import factorial
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuntzperm.algebra import (
    Perm,
    Word,
    _trusted,
    compose,
    conjugate_inner,
    convolve,
    convolve_power,
    embed,
    inner_image,
    invert_perm,
    pad_to,
    phi_r,
    rank_word,
    shift,
    unrank_word,
)
from cuntzperm.closures import (
    is_automorphism,
    is_diag_automorphism,
    psi_closure,
    ring_nilpotent_oracle,
    ring_nilpotent_oracle_batch,
    sigma_closure,
)
from cuntzperm.diagonal import act_on_projection, act_on_sum, diag_table, lap_property_check, partition_of_unity
from cuntzperm.diagonal import ProjectionSum, projection
from cuntzperm.inverse import invert_endo, stabilization_levels, stabilize, u_product, verify_coupled
from cuntzperm.named import A, B, F, G, J, Y, Z
from cuntzperm.search import (
    SearchConfig,
    _tree_rows,
    _tuple_from_rows,
    enumerate_automorphisms,
    fiber_tables,
    is_inner,
    match_named,
)
from cuntzperm.trees import enumerate_shapes, extract_maps, relabel_tuple, shape_layout, shape_of, stabilizer_order
from cuntzperm.trees import TreeMap, aut_order, is_rooted_tree

LAWS = settings(max_examples=1000, deadline=None)
DATA = Path(__file__).parent / "data"


def _cell(n, k, mode="square-free"):
    return enumerate_automorphisms(SearchConfig(n, k, mode=mode)).report


@pytest.fixture(scope="module")
def small_cells():
    return {(n, k): _cell(n, k) for n, k in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1)]}


# ------------------------------------------------------------ 1 and 2


def test_criterion_1_tables(record, small_cells, level4):
    cells = dict(small_cells)
    cells[(2, 4)] = level4.report
    want_N = {(2, 1): 2, (2, 2): 4, (2, 3): 48, (2, 4): 564480, (3, 1): 6, (3, 2): 576, (4, 1): 24}
    want_C = {(2, 1): 2, (2, 2): 2, (2, 3): 2, (2, 4): 14, (3, 2): 96}
    got_N = {c: cells[c].total for c in want_N}
    got_C = {c: cells[c].classes for c in want_C}
    identity_ok = all(r.total == factorial(r.n ** (r.k - 1)) * r.classes for r in cells.values())
    ok = got_N == want_N and got_C == want_C and identity_ok
    record("criterion 1 (N and C tables)", ok, f"N={got_N} C={got_C} N=(n^(k-1))!*C: {identity_ok}")
    assert ok


def test_criterion_2_square_free(record, small_cells, level4):
    cells = dict(small_cells)
    cells[(2, 4)] = level4.report
    want = {(2, 1): 2, (2, 2): 4, (2, 3): 20, (2, 4): 1548, (3, 1): 4, (3, 2): 52, (4, 1): 10}
    got = {c: cells[c].square_free for c in want}
    ok = got == want
    record("criterion 2 (square-free table)", ok, f"sf={got}")
    assert ok


# ------------------------------------------------------------------ 3


def test_criterion_3_diag_only(record):
    rep = _cell(2, 4, mode="diag-only")
    ta, tj = "(((()())(()())))", "((((()())())()))"
    want_stats = {f"{ta}|{ta}": 40, f"{ta}|{tj}": 12, f"{tj}|{ta}": 12}
    checks = {
        "count": rep.total == 175472640,
        "shapes": rep.shape_count == 23 == len(enumerate_shapes(8, 2)),
        "pairs": rep.shape_stats == want_stats,
        "aut": rep.aut_orders == {ta: 8, tj: 2},
        "formula": rep.total == 2**8 * factorial(8) // 8 * 40 + 2 * 2**8 * factorial(8) // 2 * 12,
    }
    ok = all(checks.values())
    record("criterion 3 (diagonal-only count)", ok, f"{rep.total}; {checks}")
    assert ok


# ------------------------------------------------------------------ 4


def test_criterion_4_named_identities(record):
    jj = convolve(J, J)
    powers = [convolve_power(G, e) for e in range(1, 7)]
    checks = {
        "J*J=id@7": jj.k == 7 and jj.is_identity(),
        "G^6=id@19": powers[-1].k == 19 and powers[-1].is_identity(),
        "G^1..5!=id": not any(p.is_identity() for p in powers[:-1]),
        "Ad(z)AB=id": conjugate_inner(Z, convolve(A, B)).is_identity(),
        "Ad(y)FA=BF": conjugate_inner(Y, convolve(F, A)) == convolve(B, F),
    }
    ok = all(checks.values())
    record("criterion 4 (named identities)", ok, str(checks))
    assert ok


# ------------------------------------------------------------------ 5


def test_criterion_5_inverses(record):
    out = {}
    for name, p in (("A", A), ("B", B)):
        res = invert_endo(p)
        out[name] = (res.level, verify_coupled(p, res.inverse), convolve(p, res.inverse).is_identity())
    ok = all(lv <= 7 and c and e for lv, c, e in out.values())
    record("criterion 5 (inverses of A and B)", ok, f"(level, coupled, certificate)={out}")
    assert ok


# ------------------------------------------------------------------ 6

# One printed cell contradicts the rest of its own table: P_122 and P_221
# both map to P_212 in the A column, which no automorphism can do.
ERRATA = {("A", "122"): ["121"]}


def test_criterion_6_golden_tables(record):
    gold = json.loads((DATA / "diag_golden.json").read_text())
    named = {"A": A, "G": G, "J": J}
    total, verbatim, mismatches = 0, 0, []
    for name, p in named.items():
        tab = diag_table(p, 5).as_dict()
        assert set(tab) == set(gold[name])
        for alpha, cell in gold[name].items():
            total += 1
            if sorted(tab[alpha]) == sorted(cell):
                verbatim += 1
            else:
                mismatches.append((name, alpha, cell, tab[alpha]))
    errata_ok = [m[:2] for m in mismatches] == list(ERRATA)
    for name, alpha, cell, mine in mismatches:
        if (name, alpha) not in ERRATA:
            continue
        errata_ok &= mine == ERRATA[(name, alpha)]
        # the printed column of that length overlaps, so it cannot be the image of
        # a partition; with the computed cell substituted it becomes one
        column = {a: c for a, c in gold[name].items() if len(a) == len(alpha)}
        errata_ok &= not partition_of_unity([ProjectionSum.of(2, c) for c in column.values()])
        column[alpha] = mine
        errata_ok &= partition_of_unity([ProjectionSum.of(2, c) for c in column.values()])
    ok = errata_ok and verbatim + len(ERRATA) == total
    record(
        "criterion 6 (golden projection tables, maxlen 5)",
        ok,
        f"{verbatim}/{total} cells verbatim; {len(mismatches)} cell(s) differ, each a self-inconsistent print: "
        + "; ".join(f"lambda_{n}(P_{a}) printed {c}, computed {m}" for n, a, c, m in mismatches),
    )
    assert ok


# ------------------------------------------------------------------ 7


def test_criterion_7_outerness(record):
    rng = np.random.default_rng(7)
    outer = {name: is_inner(p) for name, p in (("F@2", embed(F, 1)), ("A", A), ("J", J), ("G", G))}
    inner = [is_inner(inner_image(_trusted(2, 3, rng.permutation(8)))) for _ in range(100)]
    powers = [convolve_power(A, e).is_identity() for e in range(1, 5)]
    lap = lap_property_check(A, 3)
    ok = all(v is False for v in outer.values()) and all(v is True for v in inner) and not any(powers) and lap
    record(
        "criterion 7 (outerness at desk scale)",
        ok,
        f"outer={outer} inner {sum(v is True for v in inner)}/100; A^e!=id e<=4: {not any(powers)}; suffix relations |mu|<=3: {lap}",
    )
    assert ok


# ------------------------------------------------------------------ 8


def _closure_verdicts(T, n, k):
    """Sigma and Psi verdicts for every row; Sigma is cached per tree tuple."""
    trees = _tree_rows(T, n, k)
    cache = {}
    sig = np.zeros(len(T), dtype=bool)
    psi = np.zeros(len(T), dtype=bool)
    for r in range(len(T)):
        key = trees[r].tobytes()
        if key not in cache:
            cache[key] = sigma_closure(_tuple_from_rows(trees[r], n, k)).ok
        sig[r] = cache[key]
        psi[r] = psi_closure(_trusted(n, k, T[r])).ok
    return sig, psi


def _agreement(T, n, k):
    sig, psi = _closure_verdicts(T, n, k)
    b, d = ring_nilpotent_oracle_batch(T, n, k)
    h = stabilization_levels(T, n, k)
    full = sig & psi
    bad = int((sig != b).sum() + (psi != d).sum() + (full != (h >= 0)).sum())
    return bad, int(full.sum())


def test_criterion_8_oracle_equivalence(record, level4):
    out = {}
    for n, k in [(2, 2), (2, 3), (3, 2)]:
        T = np.array(list(itertools.permutations(range(n**k))), dtype=np.int64)
        out[(n, k)] = (len(T),) + _agreement(T, n, k)
    rng = np.random.default_rng(8)
    R = np.array([rng.permutation(16) for _ in range(10_000)])
    S = level4.tables[rng.choice(len(level4.tables), 1000, replace=False)]
    T = np.concatenate([R, S])
    out[(2, 4)] = (len(T),) + _agreement(T, 2, 4)
    # every hit of the stabilization kernel carries a convolution certificate
    certified = all(stabilize(_trusted(2, 4, row)).found for row in S[:50])
    ok = all(bad == 0 for _, bad, _ in out.values()) and certified
    ok &= out[(2, 2)][2] == 4 and out[(2, 3)][2] == 48 and out[(3, 2)][2] == 576
    record(
        "criterion 8 (closures = nilpotency = stabilization)",
        ok,
        "; ".join(f"P_{n}^{k}: {m} perms, {bad} disagreements, {a} automorphisms" for (n, k), (m, bad, a) in out.items()),
    )
    assert ok


# ------------------------------------------------------------------ 9


def _law(record, name, fn):
    try:
        fn()
    except BaseException:
        record(f"criterion 9 law: {name}", False)
        raise
    record(f"criterion 9 law: {name}", True, "1000 cases")


perm_small = st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)]).flatmap(
    lambda nk: st.permutations(range(nk[0] ** nk[1])).map(lambda t: Perm(nk[0], nk[1], np.array(t)))
)


def test_law_rank_bijection(record):
    @LAWS
    @given(st.data())
    def law(data):
        n = data.draw(st.integers(2, 10))
        kmax = 0
        while n ** (kmax + 1) <= 10**6:
            kmax += 1
        k = data.draw(st.integers(0, kmax))
        r = data.draw(st.integers(1, n**k))
        w = unrank_word(n, k, r)
        assert len(w) == k and rank_word(w) == r

    _law(record, "rank/unrank bijection", law)


def test_law_embed_shift_commute(record):
    @LAWS
    @given(perm_small, st.integers(0, 2), st.integers(0, 2))
    def law(p, a, b):
        assert shift(embed(p, a), b) == embed(shift(p, b), a)

    _law(record, "embed and shift commute", law)


def test_law_convolution_direct(record):
    @LAWS
    @given(perm_small, st.data())
    def law(p, data):
        r = data.draw(st.integers(1, 3 if p.n == 2 else 2))
        q = Perm(p.n, r, np.array(data.draw(st.permutations(range(p.n**r)))))
        ur = u_product(p, r)
        direct = compose(pad_to(p, ur.k), compose(ur, compose(pad_to(q, ur.k), invert_perm(ur))))
        assert convolve(p, q) == direct

    _law(record, "convolution equals u * Ad(u_r)(w)", law)


def test_law_homomorphism_on_diagonal(record):
    @LAWS
    @given(st.data())
    def law(data):
        n, k, r = data.draw(st.sampled_from([(2, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 1), (3, 1, 2)]))
        p = Perm(n, k, np.array(data.draw(st.permutations(range(n**k)))))
        q = Perm(n, r, np.array(data.draw(st.permutations(range(n**r)))))
        alpha = Word(n, tuple(data.draw(st.lists(st.integers(1, n), min_size=1, max_size=3))))
        assert act_on_projection(convolve(p, q), alpha) == act_on_sum(p, act_on_projection(q, alpha))

    _law(record, "act(p*q) = act(p) act(q) on projections", law)


def test_law_psi_power_identity(record):
    @LAWS
    @given(perm_small)
    def law(phi):
        psi = inner_image(phi)
        j = phi.k
        assert phi_r(psi, j) == compose(embed(invert_perm(phi), j), shift(phi, j))

    _law(record, "phi_r of an inner permutation", law)


def test_law_relabeling(record):
    @LAWS
    @given(st.data())
    def law(data):
        n, k = data.draw(st.sampled_from([(2, 2), (2, 3), (2, 4), (3, 2)]))
        p = Perm(n, k, np.array(data.draw(st.permutations(range(n**k)))))
        phi = Perm(n, k - 1, np.array(data.draw(st.permutations(range(n ** (k - 1))))))
        q = conjugate_inner(phi, p)
        assert extract_maps(q).key() == relabel_tuple(extract_maps(p), phi.table).key()
        for f, g in zip(extract_maps(p), extract_maps(q)):
            if is_rooted_tree(f):
                assert shape_of(f) == shape_of(g)

    _law(record, "relabeling conjugates tree maps and keeps shapes", law)


def test_law_fiber_size(record):
    @LAWS
    @given(st.sampled_from([(2, 2), (2, 3), (3, 2)]).flatmap(
        lambda nk: st.permutations(range(nk[0] ** nk[1])).map(lambda t: Perm(nk[0], nk[1], np.array(t)))
    ))
    def law(p):
        t = extract_maps(p)
        fib = fiber_tables(t)
        N = p.n ** (p.k - 1)
        assert len(fib) == factorial(p.n) ** N
        assert len({r.tobytes() for r in fib}) == len(fib)
        assert any(np.array_equal(r, p.table) for r in fib)
        for r in fib[:: max(1, len(fib) // 8)]:
            assert extract_maps(_trusted(p.n, p.k, r)).key() == t.key()

    _law(record, "fiber of a tree tuple has n!^(n^(k-1)) members", law)


def test_law_bogolubov_shapes(record):
    @LAWS
    @given(st.data())
    def law(data):
        n = data.draw(st.integers(2, 4))
        k = data.draw(st.integers(2, 4 if n == 2 else 3))
        u = Perm(n, 1, np.array(data.draw(st.permutations(range(n)))))
        t = extract_maps(embed(u, k - 1))
        shapes = {shape_of(f) for f in t}
        assert len(shapes) == 1
        f = t[0].table
        depth = 0
        for x in range(len(f)):
            d, y = 0, x
            while f[y] != y:
                y, d = f[y], d + 1
            depth = max(depth, d)
        assert depth == k - 1

    _law(record, "level-1 permutations give n identical trees of height k-1", law)


def test_law_aut_equals_stabilizer(record):
    shapes = enumerate_shapes(8, 2) + enumerate_shapes(9, 3) + enumerate_shapes(4, 4)

    @LAWS
    @given(st.sampled_from(shapes))
    def law(s):
        f = TreeMap(2, 4, np.array(shape_layout(s).parent))
        assert stabilizer_order(f) == aut_order(s)

    _law(record, "stabilizer order equals automorphism formula", law)


def test_law_conjugation_invariance(record, level4):
    autos = level4.tables

    @LAWS
    @given(st.integers(0, len(autos) - 1), st.permutations(range(16)), st.permutations(range(8)), st.booleans())
    def law(i, rand, phi, use_auto):
        p = _trusted(2, 4, autos[i]) if use_auto else Perm(2, 4, np.array(rand))
        q = conjugate_inner(Perm(2, 3, np.array(phi)), p)
        assert is_automorphism(p) == is_automorphism(q)
        assert is_diag_automorphism(p) == is_diag_automorphism(q)

    _law(record, "automorphism verdicts are inner-invariant", law)


def test_law_closure_oracle_depth(record, level4):
    autos = level4.tables

    @LAWS
    @given(st.data())
    def law(data):
        kind = data.draw(st.sampled_from(["p24", "auto", "p32", "p1"]))
        if kind == "auto":
            p = _trusted(2, 4, autos[data.draw(st.integers(0, len(autos) - 1))])
        elif kind == "p24":
            p = Perm(2, 4, np.array(data.draw(st.permutations(range(16)))))
        elif kind == "p32":
            p = Perm(3, 2, np.array(data.draw(st.permutations(range(9)))))
        else:
            n = data.draw(st.integers(2, 5))
            p = Perm(n, 1, np.array(data.draw(st.permutations(range(n)))))
        s = sigma_closure(extract_maps(p))
        ps = psi_closure(p)
        assert ring_nilpotent_oracle(p) == (s.ok, s.ok and ps.ok)
        assert s.depth <= s.members.size and ps.depth <= ps.members.size
        if p.k == 1:
            assert s.ok and ps.ok

    _law(record, "closures match nilpotency, depths bounded, level 1 trivial", law)


def test_law_cocycle(record):
    @LAWS
    @given(perm_small, st.integers(1, 3), st.integers(1, 3))
    def law(p, a, b):
        lhs = u_product(p, a + b)
        rhs = compose(pad_to(u_product(p, a), lhs.k), shift(u_product(p, b), a))
        assert lhs == rhs

    _law(record, "u_(a+b) = u_a phi^a(u_b)", law)


def test_law_inverse(record, level4):
    autos = level4.tables

    @LAWS
    @given(st.integers(0, len(autos) - 1), st.permutations(range(16)), st.booleans())
    def law(i, rand, use_auto):
        p = _trusted(2, 4, autos[i]) if use_auto else Perm(2, 4, np.array(rand))
        res = stabilize(p)
        assert res.found == is_automorphism(p)
        if res.found:
            assert res.level <= 2 ** (2 * 3)
            assert verify_coupled(p, res.inverse)

    _law(record, "inverse found iff automorphism; coupled equations; level bound", law)


def test_law_orbit_closure(record, level4):
    autos = level4.tables
    members = {r.tobytes() for r in autos}

    @LAWS
    @given(st.integers(0, len(autos) - 1), st.permutations(range(8)))
    def law(i, phi):
        q = conjugate_inner(Perm(2, 3, np.array(phi)), _trusted(2, 4, autos[i]))
        assert q.table.tobytes() in members

    _law(record, "automorphism set is a union of relabeling orbits", law)


def test_law_partition_of_unity(record):
    @LAWS
    @given(st.data())
    def law(data):
        n, k = data.draw(st.sampled_from([(2, 2), (2, 3), (2, 4), (3, 2)]))
        p = Perm(n, k, np.array(data.draw(st.permutations(range(n**k)))))
        l = data.draw(st.integers(1, 3))
        imgs = [act_on_projection(p, Word(n, t)) for t in itertools.product(range(1, n + 1), repeat=l)]
        assert partition_of_unity(imgs)

    _law(record, "images of a level partition form a partition of unity", law)


def test_invariants_deterministic(record, level4):
    """Laws that are properties of finite computed objects rather than random inputs."""
    from cuntzperm.search import brute_automorphisms

    checks = {}
    for n, k in [(2, 2), (2, 3), (3, 2)]:
        res = enumerate_automorphisms(SearchConfig(n, k, engine="both"))
        checks[f"engines agree {n},{k}"] = np.array_equal(res.tables, brute_automorphisms(n, k))
    rep = level4.report
    full = factorial(8)
    checks["orbit sizes divide 8! and equal it"] = all(full % o.size == 0 and o.size == full for o in rep.orbits)
    checks["N = 8! C"] = rep.total == full * rep.classes
    m = match_named(rep.orbits, {"B": B})
    fam = {k: v for k, v in m.items() if k != "B"}
    groups = [["id", "F"], ["A", "A*F", "F*A", "F*A*F"], ["J", "J*F", "F*J", "F*J*F"], ["G", "G*F", "F*G", "F*G*F"]]
    checks["14 named classes, 2+4+4+4"] = sorted(v for v in fam.values() if v is not None) == list(range(14)) and [
        len(g) for g in groups
    ] == [2, 4, 4, 4]
    checks["B outside the class of A"] = m["B"] is not None and m["B"] != m["A"]
    for l in range(1, 5):
        for t in itertools.product((1, 2), repeat=l):
            s = projection(2, Word(2, t))
            x = s
            for _ in range(6):
                x = act_on_sum(G, x)
            checks.setdefault("J^2, G^6 fix P_alpha, |alpha|<=4", True)
            checks["J^2, G^6 fix P_alpha, |alpha|<=4"] &= x == s and act_on_sum(J, act_on_sum(J, s)) == s
    ok = all(checks.values())
    record("criterion 9 deterministic invariants", ok, str(checks))
    assert ok
