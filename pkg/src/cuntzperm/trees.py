"""
Tree maps f_1..f_n extracted from a permutation, rooted-tree checks,
canonical shapes, automorphism counts and shape enumeration.

For sigma in P_n^k, ``f_i(alpha) = beta`` iff ``(i, alpha) = sigma(beta, m)``
for some last letter m.  Equivalently ``f_i(alpha)`` is the first k-1
letters of ``sigma^-1(i alpha)``.

Bounds on in-degrees.  The column-count argument gives, for every beta,
``sum_i |f_i^-1(beta)| = n``.  Each term is at most n, so a non-root vertex
receives at most n edges in any diagram.  The root's self-loop already uses
one preimage, so the root receives between 1 and n-1 edges from other
vertices (0 only for the one-vertex tree).
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, prod
from typing import Iterator, Sequence

import numpy as np

from .algebra import DomainError, Perm, unrank_word

__all__ = [
    "TreeMap",
    "TreeTuple",
    "TreeShape",
    "ShapeLayout",
    "extract_maps",
    "is_rooted_tree",
    "root_of",
    "shape_of",
    "aut_order",
    "stabilizer_order",
    "enumerate_shapes",
    "shape_layout",
    "relabel_map",
    "relabel_tuple",
    "conjugators",
    "to_dot",
]


@dataclass(frozen=True, eq=False)
class TreeMap:
    """A self-map of W_n^{k-1}, by 0-based rank."""

    n: int
    k: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.flags.writeable:
            t = t.copy()
            t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TreeMap):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.k, self.table.tobytes()))

    def preimage_counts(self) -> np.ndarray:
        return np.bincount(self.table, minlength=self.size)

    def as_words(self) -> dict[str, str]:
        lv = self.k - 1
        return {
            str(unrank_word(self.n, lv, a + 1)): str(unrank_word(self.n, lv, int(b) + 1))
            for a, b in enumerate(self.table)
        }


@dataclass(frozen=True)
class TreeTuple:
    maps: tuple[TreeMap, ...]

    @property
    def n(self) -> int:
        return self.maps[0].n

    @property
    def k(self) -> int:
        return self.maps[0].k

    def __iter__(self):
        return iter(self.maps)

    def __getitem__(self, i) -> TreeMap:
        return self.maps[i]

    def __len__(self):
        return len(self.maps)

    def key(self) -> bytes:
        return b"".join(f.table.tobytes() for f in self.maps)

    def preimage_sums(self) -> np.ndarray:
        return sum(f.preimage_counts() for f in self.maps)

    def stacked(self) -> np.ndarray:
        return np.stack([f.table for f in self.maps])


def extract_maps(p: Perm) -> TreeTuple:
    if p.k < 1:
        raise DomainError("tree maps need level >= 1")
    n, size = p.n, p.n ** (p.k - 1)
    inv = np.empty_like(p.table)
    inv[p.table] = np.arange(p.size)
    alpha = np.arange(size)
    return TreeTuple(tuple(TreeMap(n, p.k, inv[i + n * alpha] % size) for i in range(n)))


def _fixed_points(t: np.ndarray) -> np.ndarray:
    return np.flatnonzero(t == np.arange(t.shape[0]))


def is_rooted_tree(f: TreeMap) -> bool:
    """Exactly one fixed point and every orbit ends there."""
    t = f.table
    fixed = _fixed_points(t)
    if fixed.size != 1:
        return False
    # iterate by squaring until the exponent passes the vertex count
    g, e = t, 1
    while e < t.shape[0]:
        g, e = g[g], 2 * e
    return bool((g == fixed[0]).all())


def root_of(f: TreeMap) -> int:
    fixed = _fixed_points(f.table)
    if fixed.size != 1:
        raise DomainError("map has no unique fixed point")
    return int(fixed[0])


def _children(t: np.ndarray) -> list[list[int]]:
    ch: list[list[int]] = [[] for _ in range(t.shape[0])]
    for a, b in enumerate(t.tolist()):
        if a != b:
            ch[b].append(a)
    return ch


# ------------------------------------------------------------- shapes


@dataclass(frozen=True, order=True)
class TreeShape:
    """Unlabeled rooted tree as a canonical parenthesis code, e.g. ``"((()()))"``."""

    code: str

    @property
    def size(self) -> int:
        return self.code.count("(")

    @property
    def aut(self) -> int:
        return aut_order(self)

    def __str__(self):
        return self.code


def _codes(t: np.ndarray, root: int) -> list[str]:
    ch = _children(t)
    codes = [""] * t.shape[0]
    order = _bfs(ch, root)
    for v in reversed(order):
        codes[v] = "(" + "".join(sorted(codes[c] for c in ch[v])) + ")"
    return codes


def _bfs(ch: Sequence[Sequence[int]], root: int) -> list[int]:
    order, queue = [], deque([root])
    while queue:
        v = queue.popleft()
        order.append(v)
        queue.extend(ch[v])
    return order


def shape_of(f: TreeMap) -> TreeShape:
    if not is_rooted_tree(f):
        raise DomainError("shape_of needs a rooted tree")
    return TreeShape(_codes(f.table, root_of(f))[root_of(f)])


@lru_cache(maxsize=None)
def _split(code: str) -> tuple[str, ...]:
    """Top-level child codes of a node code."""
    out, depth, start = [], 0, 1
    for i, c in enumerate(code[1:-1], start=1):
        depth += 1 if c == "(" else -1
        if depth == 0:
            out.append(code[start : i + 1])
            start = i + 1
    return tuple(out)


@lru_cache(maxsize=None)
def _aut(code: str) -> int:
    kids = _split(code)
    return prod(_aut(c) for c in kids) * prod(factorial(m) for m in Counter(kids).values())


def aut_order(s: TreeShape | str) -> int:
    return _aut(s.code if isinstance(s, TreeShape) else s)


def stabilizer_order(f: TreeMap) -> int:
    """Count relabelings s with ``s f s^-1 = f`` by backtracking over child matchings."""
    if not is_rooted_tree(f):
        raise DomainError("stabilizer_order needs a rooted tree")
    ch = _children(f.table)
    root = root_of(f)
    order = _bfs(ch, root)
    parent = f.table
    img = {root: root}
    used = {root}

    def count(idx: int) -> int:
        if idx == len(order):
            return 1
        v = order[idx]
        total = 0
        for c in ch[img[int(parent[v])]]:
            if c in used or len(ch[c]) != len(ch[v]):
                continue
            img[v] = c
            used.add(c)
            total += count(idx + 1)
            used.discard(c)
        img.pop(v, None)
        return total

    return count(1)


@lru_cache(maxsize=None)
def _subtrees(size: int, maxdeg: int) -> tuple[str, ...]:
    """All canonical codes of rooted trees with ``size`` vertices, out-branching <= maxdeg."""
    if size == 1:
        return ("()",)
    return tuple(sorted("(" + "".join(f) + ")" for f in _forests(size - 1, 1, maxdeg, maxdeg)))


def _forests(total: int, lo: int, hi: int, maxdeg: int) -> list[tuple[str, ...]]:
    """Multisets of lo..hi subtrees with ``total`` vertices, each child list sorted."""
    pool = [c for s in range(1, total + 1) for c in _subtrees(s, maxdeg)]
    pool.sort()
    out: list[tuple[str, ...]] = []

    def rec(start: int, left: int, acc: list[str]):
        if left == 0:
            if lo <= len(acc) <= hi:
                out.append(tuple(sorted(acc)))
            return
        if len(acc) == hi:
            return
        for i in range(start, len(pool)):
            c = pool[i]
            s = c.count("(")
            if s <= left:
                acc.append(c)
                rec(i, left - s, acc)
                acc.pop()

    rec(0, total, [])
    return out


def enumerate_shapes(v: int, n: int) -> list[TreeShape]:
    """Rooted trees with v vertices that can occur as a diagram of some f_i.

    Non-root vertices receive at most n edges, the root between 1 and n-1.
    Sorted by code, so the order is stable across runs.
    """
    if v < 1:
        raise DomainError("vertex count must be >= 1")
    if v == 1:
        return [TreeShape("()")]
    codes = {"(" + "".join(f) + ")" for f in _forests(v - 1, 1, n - 1, n)}
    return [TreeShape(c) for c in sorted(codes)]


@dataclass(frozen=True)
class ShapeLayout:
    """A concrete vertex numbering of a shape: vertex 0 is the root, parents precede children.

    ``twin_prev[v]`` is the previous sibling of v with an identical subtree, or -1.
    """

    shape: TreeShape
    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    twin_prev: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.parent)

    def preimages(self) -> tuple[int, ...]:
        """``|f^-1(v)|`` for each layout vertex (root counts its loop)."""
        return tuple(len(c) + (v == 0) for v, c in enumerate(self.children))


@lru_cache(maxsize=None)
def shape_layout(shape: TreeShape) -> ShapeLayout:
    parent = [0]
    children: list[list[int]] = [[]]
    twin = [-1]
    queue = deque([(0, shape.code)])
    while queue:
        v, code = queue.popleft()
        prev_code, prev_v = None, -1
        for c in _split(code):
            u = len(parent)
            parent.append(v)
            children.append([])
            children[v].append(u)
            twin.append(prev_v if c == prev_code else -1)
            prev_code, prev_v = c, u
            queue.append((u, c))
    return ShapeLayout(shape, tuple(parent), tuple(tuple(c) for c in children), tuple(twin))


# ----------------------------------------------------------- relabeling


def relabel_map(f: TreeMap, phi: np.ndarray) -> TreeMap:
    """``phi f phi^-1`` for a 0-based relabeling table ``phi``."""
    g = np.empty_like(f.table)
    g[phi] = phi[f.table]
    return TreeMap(f.n, f.k, g)


def relabel_tuple(t: TreeTuple, phi: np.ndarray) -> TreeTuple:
    return TreeTuple(tuple(relabel_map(f, phi) for f in t))


def _depths(t: np.ndarray) -> np.ndarray:
    size = t.shape[0]
    depth = np.zeros(size, dtype=np.int64)
    cur = np.arange(size)
    for _ in range(size):
        moving = t[cur] != cur
        if not moving.any():
            break
        depth += moving
        cur = t[cur]
    return depth


def conjugators(fs: TreeTuple, gs: TreeTuple) -> Iterator[np.ndarray]:
    """All relabelings phi with ``phi f_i = g_i phi`` for every i.

    Assigning one vertex determines its whole forward orbit, so the search
    branches only where the maps leave labels unconstrained.
    """
    if len(fs) != len(gs) or fs.maps[0].size != gs.maps[0].size:
        return
    F, G = fs.stacked(), gs.stacked()
    size = F.shape[1]

    def signature(T):
        cols = [np.bincount(t, minlength=size) for t in T] + [_depths(t) for t in T]
        return [tuple(int(c[x]) for c in cols) for x in range(size)]

    sf, sg = signature(F), signature(G)
    if Counter(sf) != Counter(sg):
        return
    cand = [[y for y in range(size) if sg[y] == sf[x]] for x in range(size)]
    phi = [-1] * size
    used = [False] * size

    def assign(x: int, y: int) -> list[int] | None:
        trail, stack = [], [(x, y)]
        while stack:
            a, b = stack.pop()
            if phi[a] == -1:
                if used[b] or sf[a] != sg[b]:
                    _undo(trail)
                    return None
                phi[a], used[b] = b, True
                trail.append(a)
                for i in range(F.shape[0]):
                    stack.append((int(F[i, a]), int(G[i, b])))
            elif phi[a] != b:
                _undo(trail)
                return None
        return trail

    def _undo(trail):
        for a in trail:
            used[phi[a]] = False
            phi[a] = -1

    def rec():
        free = [x for x in range(size) if phi[x] == -1]
        if not free:
            yield np.array(phi, dtype=np.int64)
            return
        x = min(free, key=lambda v: len(cand[v]))
        for y in cand[x]:
            if used[y]:
                continue
            trail = assign(x, y)
            if trail is None:
                continue
            yield from rec()
            _undo(trail)

    yield from rec()


# ----------------------------------------------------------------- dot


def _label(f: TreeMap, v: int) -> str:
    return str(unrank_word(f.n, f.k - 1, v + 1))


def to_dot(t: TreeTuple | TreeMap, labels: bool = True, name: str = "trees") -> str:
    """Graph-description text; edges point from alpha to f(alpha), the root is starred."""
    maps = [t] if isinstance(t, TreeMap) else list(t.maps)
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, f in enumerate(maps, start=1):
        lines.append(f"  subgraph cluster_f{i} {{")
        lines.append(f'    label="f_{i}";')
        fixed = set(_fixed_points(f.table).tolist())
        for v in range(f.size):
            node = f"f{i}_{v}"
            text = _label(f, v) if labels else ""
            if v in fixed:
                text = text + "*" if labels else "*"
                lines.append(f'    {node} [label="{text}", shape=doublecircle];')
            else:
                lines.append(f'    {node} [label="{text}"];')
        for v, w in enumerate(f.table.tolist()):
            if v != w:
                lines.append(f"    f{i}_{v} -> f{i}_{w};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
