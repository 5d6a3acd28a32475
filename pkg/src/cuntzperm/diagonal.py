"""
Action of lambda_p on the diagonal projections P_alpha = S_alpha S_alpha^*.

Since ``lambda_u(S_alpha) = u_l S_alpha`` for |alpha| = l, the image of
P_alpha is ``u_l P_alpha u_l^*``.  With u_l a permutation unitary at level
k + l - 1 this is the sum of P_{pi(alpha gamma)} over all gamma of length
k - 1, which is then merged into a canonical antichain.

``symbolic_action`` computes the same projection from the defining relation
``lambda_u(S_i) = u^* S_i`` with a small calculus of S_x S_y^* terms; it is
used as an independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import DomainError, Perm, Word, rank_word, unrank_word, word
from .inverse import max_table_entries, u_product

__all__ = [
    "ProjectionSum",
    "projection",
    "act_on_projection",
    "act_on_sum",
    "symbolic_action",
    "diag_table",
    "DiagTable",
    "format_diag_table",
    "lap_property_check",
    "partition_of_unity",
]


def _key(w: Word) -> tuple[int, int]:
    return (len(w), rank_word(w))


def _merge(n: int, words: Iterable[Word]) -> tuple[Word, ...]:
    cur = {w.letters for w in words}
    changed = True
    while changed:
        changed = False
        if not cur:
            break
        longest = max(len(w) for w in cur)
        for L in range(longest, 0, -1):
            parents: dict[tuple[int, ...], int] = {}
            for w in cur:
                if len(w) == L:
                    parents[w[:-1]] = parents.get(w[:-1], 0) + 1
            full = [p for p, c in parents.items() if c == n]
            if full:
                for p in full:
                    for a in range(1, n + 1):
                        cur.discard(p + (a,))
                    cur.add(p)
                changed = True
                break
    return tuple(sorted((Word(n, w) for w in cur), key=_key))


def _is_antichain(words: Sequence[Word]) -> bool:
    seen = {w.letters for w in words}
    if len(seen) != len(words):
        return False
    for w in seen:
        for j in range(len(w)):
            if w[:j] in seen:
                return False
    return True


@dataclass(frozen=True)
class ProjectionSum:
    """A sum of distinct diagonal projections in canonical form."""

    n: int
    words: tuple[Word, ...]

    @classmethod
    def of(cls, n: int, words: Iterable[Word | str]) -> "ProjectionSum":
        ws = [w if isinstance(w, Word) else word(n, w) for w in words]
        if not _is_antichain(ws):
            raise DomainError("projections overlap: words are not prefix-free")
        return cls(n, _merge(n, ws))

    def __post_init__(self):
        ws = self.words
        if not _is_antichain(ws):
            raise DomainError("not an antichain")
        if list(ws) != sorted(ws, key=_key):
            raise DomainError("words not in canonical order")
        if _merge(self.n, ws) != ws:
            raise DomainError("sum is not maximally merged")

    def measure(self) -> Fraction:
        return sum((Fraction(1, self.n ** len(w)) for w in self.words), Fraction(0))

    def strings(self) -> list[str]:
        return [str(w) for w in self.words]

    def __len__(self):
        return len(self.words)

    def __str__(self):
        if not self.words:
            return "0"
        return " + ".join(f"P_{w}" for w in self.words)


def projection(n: int, alpha: Word | str) -> ProjectionSum:
    return ProjectionSum.of(n, [alpha])


def _image_words(w: Perm, alpha: Word, k: int) -> list[Word]:
    n, l = w.n, len(alpha)
    base = rank_word(alpha) - 1
    gammas = np.arange(n ** (k - 1))
    ranks = w.table[base + n**l * gammas]
    return [unrank_word(n, w.k, int(r) + 1) for r in ranks]


def act_on_projection(p: Perm, alpha: Word | str) -> ProjectionSum:
    """``lambda_p(P_alpha)`` in canonical form."""
    n = p.n
    if isinstance(alpha, str):
        alpha = word(n, alpha)
    if alpha.n != n:
        raise DomainError("alphabet mismatch")
    l = len(alpha)
    if l == 0:
        return ProjectionSum(n, (alpha,))
    if p.k == 0:
        return projection(n, alpha)
    w = u_product(p, l)
    return ProjectionSum.of(n, _image_words(w, alpha, p.k))


def act_on_sum(p: Perm, s: ProjectionSum) -> ProjectionSum:
    out: list[Word] = []
    for a in s.words:
        out.extend(act_on_projection(p, a).words)
    return ProjectionSum.of(s.n, out)


# ------------------------------------------------- symbolic calculus


def _mul(t1, t2):
    """``(S_x S_y^*)(S_x' S_y'^*)`` as a single term or None."""
    x, y = t1
    x2, y2 = t2
    if x2[: len(y)] == y:
        return (x + x2[len(y) :], y2)
    if y[: len(x2)] == x2:
        return (x, y2 + y[len(x2) :])
    return None


def symbolic_action(p: Perm, alpha: Word | str) -> ProjectionSum:
    """``lambda_p(P_alpha)`` from ``lambda(S_i) = u^* S_i``, term by term.

    Every term of ``lambda(S_alpha) lambda(S_alpha)^*`` must come out as a
    diagonal projection, each with multiplicity one.
    """
    n, k = p.n, p.k
    if isinstance(alpha, str):
        alpha = word(n, alpha)
    inv = np.empty_like(p.table)
    inv[p.table] = np.arange(p.size)
    gens: dict[int, list] = {i: [] for i in range(1, n + 1)}
    for r in range(n**k):
        beta = unrank_word(n, k, r + 1).letters
        src = unrank_word(n, k, int(inv[r]) + 1).letters
        gens[beta[0]].append((src, beta[1:]))
    terms = [((), ())]
    for a in alpha.letters:
        terms = [t for t in (_mul(s, g) for s in terms for g in gens[a]) if t is not None]
    counts: dict[tuple, int] = {}
    for t in terms:
        for t2 in terms:
            prod = _mul(t, (t2[1], t2[0]))
            if prod is not None:
                counts[prod] = counts.get(prod, 0) + 1
    if any(x != y or c != 1 for (x, y), c in counts.items()):
        raise RuntimeError("symbolic image is not a sum of distinct diagonal projections")
    return ProjectionSum.of(n, [Word(n, x) for (x, _) in counts])


# ----------------------------------------------------------- tables


@dataclass(frozen=True)
class DiagTable:
    n: int
    rows: tuple[tuple[Word, ProjectionSum], ...]
    truncated: bool = False
    maxlen_done: int = 0

    def as_dict(self) -> dict[str, list[str]]:
        return {str(a): s.strings() for a, s in self.rows}


def _words_lex(n: int, l: int) -> list[Word]:
    return [Word(n, t) for t in itertools.product(range(1, n + 1), repeat=l)]


def diag_table(p: Perm, maxlen: int) -> DiagTable:
    """Rows for every alpha with 1 <= |alpha| <= maxlen, by length then lexicographically.

    Lengths whose working level would exceed the table budget are skipped
    and the table is flagged as truncated.
    """
    if maxlen < 1:
        raise DomainError("maxlen must be >= 1")
    cap = max_table_entries()
    rows = []
    done = 0
    for l in range(1, maxlen + 1):
        if p.n ** (max(p.k, 1) + l - 1) > cap:
            return DiagTable(p.n, tuple(rows), True, done)
        w = u_product(p, l) if p.k >= 1 else None
        for alpha in _words_lex(p.n, l):
            img = projection(p.n, alpha) if w is None else ProjectionSum.of(p.n, _image_words(w, alpha, p.k))
            rows.append((alpha, img))
        done = l
    return DiagTable(p.n, tuple(rows), False, done)


def format_diag_table(tables: dict[str, DiagTable]) -> str:
    names = list(tables)
    first = tables[names[0]]
    header = ["P_alpha"] + [f"lambda_{m}(P_alpha)" for m in names]
    lines = [" | ".join(header)]
    for i, (alpha, _) in enumerate(first.rows):
        cells = [f"P_{alpha}"] + [str(tables[m].rows[i][1]) for m in names]
        lines.append(" | ".join(cells))
    return "\n".join(lines)


def partition_of_unity(sums: Sequence[ProjectionSum]) -> bool:
    """Pairwise orthogonal with total Bernoulli measure exactly one."""
    allw = [w for s in sums for w in s.words]
    if not _is_antichain(allw):
        return False
    return sum((s.measure() for s in sums), Fraction(0)) == 1


# ------------------------------------------------------ suffix pattern


def lap_property_check(p: Perm, depth: int) -> bool:
    """Suffix relations for every prefix mu with |mu| <= depth:

    ``lambda(P_{mu 211}) = P_{nu1 211} + P_{nu2 222}`` and
    ``lambda(P_{mu 212}) = P_{nu1 212} + P_{nu2 221}`` with shared nu1, nu2
    of length |mu| + 1; and words of length <= depth + 3 ending in neither
    211 nor 212 map to one projection of the same length.
    """
    if p.n != 2:
        raise DomainError("the suffix relations concern n = 2")
    for m in range(depth + 1):
        for mu in _words_lex(2, m):
            a = act_on_projection(p, Word(2, mu.letters + (2, 1, 1))).strings()
            b = act_on_projection(p, Word(2, mu.letters + (2, 1, 2))).strings()
            if len(a) != 2 or len(b) != 2:
                return False
            if any(len(s) != m + 4 for s in a + b):
                return False
            ends_a = {s[-3:]: s[:-3] for s in a}
            ends_b = {s[-3:]: s[:-3] for s in b}
            if set(ends_a) != {"211", "222"} or set(ends_b) != {"212", "221"}:
                return False
            if ends_a["211"] != ends_b["212"] or ends_a["222"] != ends_b["221"]:
                return False
    for L in range(1, depth + 4):
        for alpha in _words_lex(2, L):
            s = str(alpha)
            if s.endswith("211") or s.endswith("212"):
                continue
            img = act_on_projection(p, alpha)
            if len(img) != 1 or len(img.words[0]) != L:
                return False
    return True


def _power_identity_on(p: Perm, e: int, maxlen: int) -> bool:
    """Iterating the action e times fixes every P_alpha with |alpha| <= maxlen."""
    for l in range(1, maxlen + 1):
        for alpha in _words_lex(p.n, l):
            s = projection(p.n, alpha)
            for _ in range(e):
                s = act_on_sum(p, s)
            if s.words != (alpha,):
                return False
    return True
