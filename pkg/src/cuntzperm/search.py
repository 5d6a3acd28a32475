"""
Enumeration of localized automorphisms and their inner-equivalence classes.

Two engines produce the automorphisms in P_n^k:

* ``brute`` runs every permutation through the closures (n^k <= 9).
* ``pipeline`` builds tree-map tuples shape by shape.  One tree, the anchor,
  gets a fixed labeling; the others are labeled by backtracking with
  preimage-count and pair-graph pruning; each surviving tuple's fiber of
  n!^(n^(k-1)) permutations is filtered by the Psi closure.  Every labeling
  of the anchor is a relabeling of the fixed one, so a survivor stands for
  (n^(k-1))!/|Aut(anchor)| labeled tuples.

Inner equivalence is the action ``p -> (1 x phi) p (phi^-1 x 1)`` of
phi in P_n^(k-1); orbits are materialized in full, so orbit sizes (and
freeness of the action) are observed rather than assumed.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import factorial
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .algebra import (
    DomainError,
    Perm,
    _trusted,
    compose_tables,
    conjugate_inner,
    convolve,
    embed_table,
    format_cycles,
    identity,
    inner_image,
    invert_table,
    pad_to,
    shift_table,
)
from .closures import ResourceCapExceeded, psi_closure, sigma_closure
from .inverse import square_free_mask
from .trees import (
    TreeMap,
    TreeShape,
    TreeTuple,
    aut_order,
    conjugators,
    enumerate_shapes,
    extract_maps,
    shape_layout,
    shape_of,
)

__all__ = [
    "SearchConfig",
    "ClassReport",
    "SearchResult",
    "Orbit",
    "enumerate_automorphisms",
    "brute_automorphisms",
    "shape_tuples",
    "anchor_index",
    "fixed_labeling",
    "labelings",
    "fiber_tables",
    "all_relabelings",
    "orbit_tables",
    "inner_orbits",
    "inner_equivalent",
    "is_inner",
    "match_named",
    "named_family",
    "needs_long_run",
]

MODES = ("full", "diag-only", "square-free")
ENGINES = ("auto", "brute", "pipeline", "both")
BRUTE_MAX = 9  # n^k for which all n^k! permutations are scanned
FIBER_MAX = 10**5
RELABEL_MAX = 10**5


def needs_long_run(n: int, k: int) -> bool:
    """Cells whose fibers or relabeling groups are beyond desk scale."""
    if k == 1:
        return n > BRUTE_MAX
    N = n ** (k - 1)
    return factorial(n) ** N > FIBER_MAX or factorial(N) > RELABEL_MAX


@dataclass
class SearchConfig:
    n: int
    k: int
    mode: str = "full"
    engine: str = "auto"
    workers: int = 1
    classes: bool = True
    long_run: bool = False
    checkpoint: str | None = None
    max_units: int | None = None

    def resolved_engine(self) -> str:
        if self.engine != "auto":
            return self.engine
        return "brute" if self.k == 1 else "pipeline"

    def validate(self) -> "SearchConfig":
        if self.n < 2 or self.k < 1:
            raise DomainError(f"need n >= 2 and k >= 1, got n={self.n}, k={self.k}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.engine not in ENGINES:
            raise DomainError(f"engine must be one of {ENGINES}")
        eng = self.resolved_engine()
        if eng in ("brute", "both") and self.n**self.k > BRUTE_MAX:
            raise DomainError(f"brute engine needs n^k <= {BRUTE_MAX}")
        if eng in ("pipeline", "both") and self.k < 2:
            raise DomainError("pipeline engine needs k >= 2")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        if needs_long_run(self.n, self.k) and not self.long_run:
            raise ResourceCapExceeded(
                f"(n={self.n}, k={self.k}) is a long run; pass the long-run flag to attempt it"
            )
        return self


@dataclass
class Orbit:
    representative: str
    size: int
    stabilizer: int
    square_free: int | None = None


@dataclass
class ClassReport:
    n: int
    k: int
    mode: str
    engine: str
    total: int
    complete: bool = True
    orbits: list[Orbit] | None = None
    diag_total: int | None = None
    square_free: int | None = None
    shape_count: int | None = None
    shape_stats: dict[str, int] = field(default_factory=dict)
    aut_orders: dict[str, int] = field(default_factory=dict)

    @property
    def classes(self) -> int | None:
        return None if self.orbits is None else len(self.orbits)

    @property
    def free(self) -> bool | None:
        if self.orbits is None:
            return None
        full = factorial(self.n ** (self.k - 1))
        return all(o.size == full for o in self.orbits)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["classes"] = self.classes
        d["free"] = self.free
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@dataclass
class SearchResult:
    report: ClassReport
    tables: np.ndarray | None = field(default=None, repr=False)

    def perms(self) -> Iterator[Perm]:
        if self.tables is None:
            return iter(())
        n, k = self.report.n, self.report.k
        return (_trusted(n, k, row) for row in self.tables)


# ------------------------------------------------------------ brute


def _all_tables(n: int, k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n**k))), dtype=np.int64)


def _tree_rows(tables: np.ndarray, n: int, k: int) -> np.ndarray:
    """Stacked tree maps per row: shape (B, n, N)."""
    N = n ** (k - 1)
    inv = invert_table(tables)
    alpha = np.arange(N)
    return np.stack([inv[:, i + n * alpha] % N for i in range(n)], axis=1)


def brute_automorphisms(n: int, k: int, mode: str = "full") -> np.ndarray:
    """Tables of all p in P_n^k passing the closures, in lexicographic order.

    Sigma verdicts are cached per tree tuple; Psi runs only on Sigma-passers.
    """
    if n**k > BRUTE_MAX:
        raise DomainError(f"brute engine needs n^k <= {BRUTE_MAX}")
    T = _all_tables(n, k)
    if k == 1:
        return T
    trees = _tree_rows(T, n, k)
    cache: dict[bytes, bool] = {}
    keep = np.zeros(len(T), dtype=bool)
    for r in range(len(T)):
        key = trees[r].tobytes()
        ok = cache.get(key)
        if ok is None:
            ok = sigma_closure(_tuple_from_rows(trees[r], n, k)).ok
            cache[key] = ok
        if ok and mode != "diag-only":
            ok = psi_closure(_trusted(n, k, T[r])).ok
        keep[r] = ok
    return T[keep]


def _tuple_from_rows(rows: np.ndarray, n: int, k: int) -> TreeTuple:
    return TreeTuple(tuple(TreeMap(n, k, np.array(r)) for r in rows))


# --------------------------------------------------------- pipeline


def _pre_hist(shape: TreeShape, n: int) -> tuple[int, ...]:
    pre = shape_layout(shape).preimages()
    return tuple(pre.count(c) for c in range(n + 1))


def shape_tuples(n: int, k: int) -> list[tuple[TreeShape, ...]]:
    """Ordered n-tuples of admissible shapes, with a histogram prefilter for n = 2."""
    shapes = enumerate_shapes(n ** (k - 1), n)
    out = []
    for tup in itertools.product(shapes, repeat=n):
        if n == 2:
            h0, h1 = _pre_hist(tup[0], n), _pre_hist(tup[1], n)
            if h0 != h1[::-1]:
                continue
        out.append(tup)
    return out


def anchor_index(shapes: Sequence[TreeShape]) -> int:
    """Tree whose labeling is fixed: smallest automorphism group, lowest index on ties."""
    return min(range(len(shapes)), key=lambda i: (aut_order(shapes[i]), i))


def fixed_labeling(shape: TreeShape) -> np.ndarray:
    """Map table with each layout vertex labeled by its own index."""
    lay = shape_layout(shape)
    return np.array(lay.parent, dtype=np.int64)


class _Backtrack:
    """Labelings of the non-anchor trees given the anchor map."""

    def __init__(self, n: int, k: int, shapes: Sequence[TreeShape], anchor: int):
        self.n, self.k = n, k
        self.N = N = n ** (k - 1)
        self.shapes = shapes
        self.anchor = anchor
        self.others = [j for j in range(n) if j != anchor]
        self.maps = [np.full(N, -1, dtype=np.int64) for _ in range(n)]
        self.maps[anchor] = fixed_labeling(shapes[anchor])
        self.layouts = [shape_layout(s) for s in shapes]
        self.pres = [lay.preimages() for lay in self.layouts]
        self.rem = [n - c for c in np.bincount(self.maps[anchor], minlength=N).tolist()]
        self.labels = [[-1] * N for _ in range(n)]
        self.used = [[False] * N for _ in range(n)]
        self.succ: list[list[int]] = [[] for _ in range(N * N)]
        fa = self.maps[anchor]
        for a in range(N):
            for b in range(N):
                if a != b and fa[a] != fa[b]:
                    self.succ[a * N + b].append(int(fa[a] * N + fa[b]))
        self.steps = [(j, v) for j in self.others for v in range(N)]

    def _reaches(self, src: int, dst: int) -> bool:
        seen = {src}
        stack = [src]
        succ = self.succ
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for w in succ[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    def _add_edges(self, j: int, x: int) -> list[int] | None:
        """Edges induced by the new value f_j(x); None when one closes a cycle."""
        N, f = self.N, self.maps[j]
        y = int(f[x])
        added = []
        for z in range(N):
            fz = int(f[z])
            if z == x or fz < 0 or fz == y:
                continue
            for u, v in ((x * N + z, y * N + fz), (z * N + x, fz * N + y)):
                if self._reaches(v, u):
                    self._drop(added)
                    return None
                self.succ[u].append(v)
                added.append(u)
        return added

    def _drop(self, added: list[int]):
        for u in reversed(added):
            self.succ[u].pop()

    def candidates(self, step: int) -> list[int]:
        j, v = self.steps[step]
        lay = self.layouts[j]
        last = j == self.others[-1]
        need = self.pres[j][v]
        lo = -1
        if lay.twin_prev[v] >= 0:
            lo = self.labels[j][lay.twin_prev[v]]
        out = []
        for x in range(lo + 1, self.N):
            if self.used[j][x]:
                continue
            r = self.rem[x]
            if (need == r) if last else (need <= r):
                out.append(x)
        return out

    def push(self, step: int, x: int) -> list[int] | None:
        j, v = self.steps[step]
        lay = self.layouts[j]
        y = x if v == 0 else self.labels[j][lay.parent[v]]
        self.labels[j][v] = x
        self.used[j][x] = True
        self.rem[x] -= self.pres[j][v]
        self.maps[j][x] = y
        added = self._add_edges(j, x)
        if added is None:
            self.pop(step, x, [])
        return added

    def pop(self, step: int, x: int, added: list[int]):
        j, v = self.steps[step]
        self._drop(added)
        self.maps[j][x] = -1
        self.rem[x] += self.pres[j][v]
        self.used[j][x] = False
        self.labels[j][v] = -1

    def run(self, first: int | None = None) -> Iterator[TreeTuple]:
        def rec(step: int):
            if step == len(self.steps):
                t = TreeTuple(tuple(TreeMap(self.n, self.k, m.copy()) for m in self.maps))
                if sigma_closure(t).ok:
                    yield t
                return
            cands = self.candidates(step)
            if step == 0 and first is not None:
                cands = [x for x in cands if x == first]
            for x in cands:
                added = self.push(step, x)
                if added is None:
                    continue
                yield from rec(step + 1)
                self.pop(step, x, added)

        yield from rec(0)


def labelings(n: int, k: int, shapes: Sequence[TreeShape], first: int | None = None) -> Iterator[TreeTuple]:
    """Sigma-admissible tuples with the anchor fixed; ``first`` pins the first free root label."""
    return _Backtrack(n, k, shapes, anchor_index(shapes)).run(first)


def fiber_tables(t: TreeTuple) -> np.ndarray:
    """All permutations inducing the tree tuple t (n!^(n^(k-1)) rows)."""
    n, k = t.n, t.k
    N = n ** (k - 1)
    F = t.stacked()
    slots: list[list[int]] = [[] for _ in range(N)]
    for i in range(n):
        for a in range(N):
            slots[int(F[i, a])].append(i + n * a)
    if any(len(s) != n for s in slots):
        return np.zeros((0, n**k), dtype=np.int64)
    P = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(len(P))] * N), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)  # (n!^N, N)
    inv = np.empty((idx.shape[0], n**k), dtype=np.int64)
    for b in range(N):
        last = P[idx[:, b]]  # (rows, n)
        for s, pos in enumerate(slots[b]):
            inv[:, pos] = b + N * last[:, s]
    return invert_table(inv)


@dataclass
class _UnitResult:
    unit: tuple[int, int]
    survivors: int
    weight: int
    fiber: int
    passes: list[int]
    tables: list[list[int]]


def _units(n: int, k: int, tuples: list[tuple[TreeShape, ...]]) -> list[tuple[int, int]]:
    units = []
    for ti, shapes in enumerate(tuples):
        bt = _Backtrack(n, k, shapes, anchor_index(shapes))
        for x in bt.candidates(0):
            units.append((ti, x))
    return units


def _run_unit(args) -> _UnitResult:
    n, k, shapes, unit, mode = args
    N = n ** (k - 1)
    anchor = anchor_index(shapes)
    weight = factorial(N) // aut_order(shapes[anchor])
    fiber = factorial(n) ** N
    survivors, passes, tables = 0, [], []
    for t in labelings(n, k, shapes, first=unit[1]):
        survivors += 1
        if mode == "diag-only":
            continue
        count = 0
        for row in fiber_tables(t):
            if psi_closure(_trusted(n, k, row)).ok:
                count += 1
                tables.append(row.tolist())
        passes.append(count)
    return _UnitResult(tuple(unit), survivors, weight, fiber, passes, tables)


def _shape_key(shapes: Sequence[TreeShape]) -> str:
    return "|".join(s.code for s in shapes)


class _Checkpoint:
    def __init__(self, path: str | None, header: dict):
        self.path = Path(path) if path else None
        self.done: dict[tuple[int, int], _UnitResult] = {}
        if self.path and self.path.exists():
            lines = self.path.read_text().splitlines()
            if lines:
                old = json.loads(lines[0])
                if old != header:
                    raise DomainError(f"checkpoint {self.path} belongs to a different run: {old}")
                for line in lines[1:]:
                    d = json.loads(line)
                    r = _UnitResult(tuple(d["unit"]), d["survivors"], d["weight"], d["fiber"], d["passes"], d["tables"])
                    self.done[r.unit] = r
        elif self.path:
            self.path.write_text(json.dumps(header) + "\n")

    def record(self, r: _UnitResult):
        if self.path:
            with self.path.open("a") as fh:
                fh.write(json.dumps(asdict(r)) + "\n")
        self.done[r.unit] = r


def _pipeline(cfg: SearchConfig) -> tuple[ClassReport, np.ndarray | None]:
    n, k = cfg.n, cfg.k
    tuples = shape_tuples(n, k)
    units = _units(n, k, tuples)
    inner_mode = "diag-only" if cfg.mode == "diag-only" else "full"
    header = {"n": n, "k": k, "mode": inner_mode, "units": len(units)}
    ck = _Checkpoint(cfg.checkpoint, header)
    todo = [u for u in units if u not in ck.done]
    complete = True
    if cfg.max_units is not None and len(todo) > cfg.max_units:
        todo, complete = todo[: cfg.max_units], False
    args = [(n, k, tuples[u[0]], u, inner_mode) for u in todo]
    if cfg.workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            for r in ex.map(_run_unit, args, chunksize=1):
                ck.record(r)
    else:
        for a in args:
            ck.record(_run_unit(a))

    stats: dict[str, int] = {}
    diag_total, total = 0, 0
    fixed: list[list[int]] = []
    for u in units:
        r = ck.done.get(u)
        if r is None:
            continue
        key = _shape_key(tuples[u[0]])
        if r.survivors:
            stats[key] = stats.get(key, 0) + r.survivors
        diag_total += r.weight * r.survivors * r.fiber
        total += r.weight * sum(r.passes)
        fixed.extend(r.tables)
    auts = {s.code: aut_order(s) for tup in tuples for s in tup if _shape_key(tup) in stats}
    report = ClassReport(
        n, k, cfg.mode, "pipeline",
        total=diag_total if cfg.mode == "diag-only" else total,
        complete=complete,
        diag_total=diag_total,
        shape_count=len(enumerate_shapes(n ** (k - 1), n)),
        shape_stats=stats,
        aut_orders=auts,
    )
    tabs = None if cfg.mode == "diag-only" else np.array(fixed, dtype=np.int64).reshape(-1, n**k)
    return report, tabs


# -------------------------------------------------------------- orbits


def all_relabelings(N: int) -> np.ndarray:
    if factorial(N) > RELABEL_MAX * 10:
        raise ResourceCapExceeded(f"{N}! relabelings exceed the cap")
    return np.array(list(itertools.permutations(range(N))), dtype=np.int64)


def orbit_tables(p: Perm, phis: np.ndarray | None = None) -> np.ndarray:
    """Unique tables of ``(1 x phi) p (phi^-1 x 1)`` over all phi (or the given stack)."""
    n, k = p.n, p.k
    if phis is None:
        phis = all_relabelings(n ** (k - 1))
    left = shift_table(phis, n, k - 1, 1)
    right = embed_table(invert_table(phis), n, k - 1, 1)
    T = compose_tables(left, compose_tables(np.broadcast_to(p.table, right.shape), right))
    return np.unique(T, axis=0)


def _rep_index(T: np.ndarray) -> int:
    """Fewest moved points, then lexicographically least table."""
    moved = (T != np.arange(T.shape[1])).sum(axis=1)
    cand = np.flatnonzero(moved == moved.min())
    sub = T[cand]
    order = np.lexsort(sub.T[::-1])
    return int(cand[order[0]])


def inner_orbits(
    perms: Iterable[Perm] | np.ndarray,
    n: int | None = None,
    k: int | None = None,
    square_free: bool = False,
) -> tuple[list[Orbit], np.ndarray]:
    """Partition by inner equivalence; returns orbits and the union of all orbit tables.

    The input may be any subset meeting each orbit of interest; orbits are
    materialized over the full relabeling group.
    """
    if isinstance(perms, np.ndarray):
        T = np.atleast_2d(perms)
    else:
        plist = list(perms)
        if not plist:
            return [], np.zeros((0, 0), dtype=np.int64)
        n, k = plist[0].n, plist[0].k
        if any(p.n != n or p.k != k for p in plist):
            raise DomainError("all permutations must share n and k")
        T = np.stack([p.table for p in plist])
    if n is None or k is None:
        raise DomainError("n and k are needed for table input")
    if T.shape[0] == 0:
        return [], np.zeros((0, n**k), dtype=np.int64)
    N = n ** (k - 1)
    phis = all_relabelings(N)
    seen: set[bytes] = set()
    orbits, parts = [], []
    full = factorial(N)
    for row in T:
        if row.tobytes() in seen:
            continue
        O = orbit_tables(_trusted(n, k, row), phis)
        seen.update(r.tobytes() for r in O)
        rep = _trusted(n, k, O[_rep_index(O)])
        sf = int(square_free_mask(O, n, k).sum()) if square_free else None
        orbits.append(Orbit(format_cycles(rep), len(O), full // len(O), sf))
        parts.append(O)
    orbits_sorted = sorted(zip(orbits, parts), key=lambda t: _orbit_key(t[0], n, k))
    return [o for o, _ in orbits_sorted], np.concatenate([p for _, p in orbits_sorted])


def _orbit_key(o: Orbit, n: int, k: int):
    from .algebra import parse_cycles

    p = parse_cycles(o.representative, n, k)
    return (p.moved(), tuple(p.table.tolist()))


# ----------------------------------------------------------- top level


def enumerate_automorphisms(cfg: SearchConfig) -> SearchResult:
    cfg.validate()
    n, k = cfg.n, cfg.k
    eng = cfg.resolved_engine()
    inner_mode = "diag-only" if cfg.mode == "diag-only" else "full"
    if eng == "brute":
        tabs = brute_automorphisms(n, k, inner_mode)
        report = ClassReport(n, k, cfg.mode, "brute", total=len(tabs))
        if inner_mode == "diag-only":
            report.diag_total = len(tabs)
    else:
        report, tabs = _pipeline(cfg)
        if eng == "both":
            bt = brute_automorphisms(n, k, inner_mode)
            report.engine = "both"
            if inner_mode == "diag-only":
                if len(bt) != report.total:
                    raise RuntimeError(f"engines disagree: brute {len(bt)} vs pipeline {report.total}")
    if inner_mode == "diag-only":
        return SearchResult(report, tabs if eng == "brute" else None)

    need_orbits = cfg.classes or cfg.mode == "square-free" or eng != "brute"
    if need_orbits and report.complete:
        orbits, union = inner_orbits(tabs, n, k, square_free=cfg.mode == "square-free")
        report.orbits = orbits
        if eng != "brute":
            if sum(o.size for o in orbits) != report.total:
                raise RuntimeError("orbit sizes do not add up to the weighted count")
            tabs = union
            if eng == "both":
                order = np.lexsort(tabs.T[::-1])
                if not np.array_equal(tabs[order], bt):
                    raise RuntimeError("brute and pipeline automorphism sets differ")
        if cfg.mode == "square-free":
            report.square_free = sum(o.square_free for o in orbits)
        if not cfg.classes:
            report.orbits = None
    elif cfg.mode == "square-free":
        report.square_free = int(square_free_mask(tabs, n, k).sum())
    if tabs is not None:
        tabs = tabs[np.lexsort(tabs.T[::-1])]
    return SearchResult(report, tabs)


# ------------------------------------------------------------ innerness


def inner_equivalent(p: Perm, q: Perm) -> Perm | None:
    """A relabeling phi with ``conjugate_inner(phi, p) == q``, or None."""
    if p.n != q.n or p.k != q.k:
        return None
    if p.k == 1:
        return identity(p.n, 0) if p == q else None
    for phi in conjugators(extract_maps(p), extract_maps(q)):
        cand = _trusted(p.n, p.k - 1, phi)
        if conjugate_inner(cand, p) == q:
            return cand
    return None


def _shape_signature(p: Perm) -> tuple[str, ...]:
    return tuple(shape_of(f).code if _rooted(f) else "-" for f in extract_maps(p))


def _rooted(f: TreeMap) -> bool:
    from .trees import is_rooted_tree

    return is_rooted_tree(f)


def is_inner(p: Perm, max_relabelings: int = RELABEL_MAX) -> bool | None:
    """Whether lambda_p = Ad(w) for a permutation w at level k-1.

    Returns False at once when the shape tuple differs from the identity's;
    otherwise searches conjugators of the identity's tree tuple.  None marks
    relabeling groups beyond ``max_relabelings``.
    """
    if p.k == 0:
        return p.is_identity()
    if p.k == 1:
        return p.is_identity()
    ident = identity(p.n, p.k)
    if _shape_signature(p) != _shape_signature(ident):
        return False
    if factorial(p.n ** (p.k - 1)) > max_relabelings:
        return None
    for phi in conjugators(extract_maps(ident), extract_maps(p)):
        if inner_image(_trusted(p.n, p.k - 1, phi)) == p:
            return True
    return False


def named_family() -> dict[str, Perm]:
    """The 14 level-4 products that represent the outer classes for n = 2."""
    from .named import A, F, G, J

    Fp = pad_to(F, 4)
    out = {"id": identity(2, 4), "F": Fp}
    for name, X in (("A", A), ("J", J), ("G", G)):
        out[name] = X
        out[f"{name}*F"] = convolve(X, F)
        out[f"F*{name}"] = convolve(F, X)
        out[f"F*{name}*F"] = convolve(convolve(F, X), F)
    return out


def match_named(orbits: Sequence[Orbit], extra: dict[str, Perm] | None = None) -> dict[str, int | None]:
    """Index of the orbit containing each named product (None when unmatched)."""
    from .algebra import parse_cycles

    reps = [parse_cycles(o.representative, 2, 4) for o in orbits]
    family = named_family()
    if extra:
        family.update(extra)
    out: dict[str, int | None] = {}
    for name, p in family.items():
        p = pad_to(p, 4)
        out[name] = next((i for i, r in enumerate(reps) if inner_equivalent(r, p) is not None), None)
    return out
