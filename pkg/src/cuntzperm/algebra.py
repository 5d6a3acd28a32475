"""
Words over {1..n}, level-tagged permutations of W_n^k and the operations
that model permutation unitaries of the Cuntz algebra O_n.

A permutation ``sigma`` of W_n^k stands for the unitary
``u = sum_alpha S_{sigma(alpha)} S_alpha^*``.  Products are function
composition, ``compose(p, q)(x) = p(q(x))``, which matches the product of
the corresponding unitaries.

Ranks use the reversed lexicographic order: the *first* letter is the least
significant digit, ``rank(a_1..a_k) = 1 + sum_j (a_j - 1) n^(j-1)``.  With
this convention the word ``alpha gamma`` (alpha of length k) has 0-based
rank ``r(alpha) + n^k r(gamma)``, which is what makes ``embed`` and
``shift`` cheap index arithmetic on dense tables.

Tables are stored 0-based; cycle notation at the I/O boundary is 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "LevelError",
    "CycleParseError",
    "Word",
    "Perm",
    "rank_word",
    "unrank_word",
    "word",
    "identity",
    "compose",
    "invert_perm",
    "embed",
    "shift",
    "phi_r",
    "convolve",
    "convolve_power",
    "inner_image",
    "conjugate_inner",
    "parse_cycles",
    "format_cycles",
    "from_images",
    "minimal_level",
    "reduce_level",
    "pad_to",
]


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class LevelError(DomainError):
    """Operands live on different alphabets or levels."""


class CycleParseError(DomainError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------- words


@dataclass(frozen=True)
class Word:
    """A multi-index alpha in W_n^k; ``letters`` are 1-based."""

    n: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"alphabet size must be >= 2, got {self.n}")
        for pos, a in enumerate(self.letters):
            if not 1 <= a <= self.n:
                raise DomainError(f"letter {a} at position {pos + 1} not in 1..{self.n}")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return "".join(str(a) for a in self.letters) if self.letters else "0"

    def __add__(self, other: "Word") -> "Word":
        if self.n != other.n:
            raise LevelError("concatenating words over different alphabets")
        return Word(self.n, self.letters + other.letters)

    @property
    def rank(self) -> int:
        return rank_word(self)


def word(n: int, text: str | Sequence[int]) -> Word:
    """Build a word from a digit string such as ``"2111"`` or a letter sequence."""
    if isinstance(text, str):
        text = text.strip()
        if text in ("", "0"):
            return Word(n, ())
        if not text.isdigit():
            raise DomainError(f"cannot read word {text!r}")
        return Word(n, tuple(int(c) for c in text))
    return Word(n, tuple(int(a) for a in text))


def rank_word(w: Word) -> int:
    r = 0
    for a in reversed(w.letters):
        r = r * w.n + (a - 1)
    return r + 1


def unrank_word(n: int, k: int, r: int) -> Word:
    if k < 0 or not 1 <= r <= n**k:
        raise DomainError(f"rank {r} out of range 1..{n}**{k}")
    r -= 1
    letters = []
    for _ in range(k):
        r, a = divmod(r, n)
        letters.append(a + 1)
    return Word(n, tuple(letters))


# ---------------------------------------------------------- permutations


def _readonly(table) -> np.ndarray:
    arr = np.array(table, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Perm:
    """A permutation of W_n^k stored as a dense 0-based image table."""

    n: int
    k: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"alphabet size must be >= 2, got {self.n}")
        if self.k < 0:
            raise DomainError(f"level must be >= 0, got {self.k}")
        t = self.table
        if not (isinstance(t, np.ndarray) and t.dtype == np.int64 and not t.flags.writeable):
            t = _readonly(t)
            object.__setattr__(self, "table", t)
        size = self.n**self.k
        if t.shape != (size,):
            raise DomainError(f"table has shape {t.shape}, expected ({size},)")
        seen = np.zeros(size, dtype=bool)
        if size and (t.min() < 0 or t.max() >= size):
            raise DomainError("table entries out of range")
        seen[t] = True
        if not seen.all():
            raise DomainError("table is not a bijection")

    @property
    def size(self) -> int:
        return self.table.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Perm):
            return NotImplemented
        return (self.n, self.k) == (other.n, other.k) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.k, self.table.tobytes()))

    def __repr__(self):
        return f"Perm(n={self.n}, k={self.k}, {format_cycles(self)!r})"

    def __call__(self, w: Word) -> Word:
        if w.n != self.n or len(w) != self.k:
            raise LevelError(f"word {w} is not in W_{self.n}^{self.k}")
        return unrank_word(self.n, self.k, int(self.table[rank_word(w) - 1]) + 1)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.table, np.arange(self.size)))

    def moved(self) -> int:
        """Number of points not fixed."""
        return int(np.count_nonzero(self.table != np.arange(self.size)))

    def __mul__(self, other: "Perm") -> "Perm":
        return compose(self, other)


def _trusted(n: int, k: int, table: np.ndarray) -> Perm:
    # skips the bijection check for tables produced by closed operations
    p = object.__new__(Perm)
    t = np.ascontiguousarray(table, dtype=np.int64)
    t.setflags(write=False)
    object.__setattr__(p, "n", n)
    object.__setattr__(p, "k", k)
    object.__setattr__(p, "table", t)
    return p


def identity(n: int, k: int) -> Perm:
    return _trusted(n, k, np.arange(n**k))


def from_images(n: int, k: int, images: dict[str, str]) -> Perm:
    """Permutation from a word-to-word mapping, e.g. ``{"1111": "1112", ...}``.

    Unlisted words are fixed.
    """
    table = np.arange(n**k)
    for src, dst in images.items():
        a, b = word(n, src), word(n, dst)
        if len(a) != k or len(b) != k:
            raise LevelError(f"{src}->{dst} is not a map on W_{n}^{k}")
        table[a.rank - 1] = b.rank - 1
    return Perm(n, k, table)


def _check_same(p: Perm, q: Perm):
    if p.n != q.n or p.k != q.k:
        raise LevelError(f"level mismatch: (n={p.n}, k={p.k}) vs (n={q.n}, k={q.k})")


def compose(p: Perm, q: Perm) -> Perm:
    """``p`` after ``q``."""
    _check_same(p, q)
    return _trusted(p.n, p.k, p.table[q.table])


def invert_perm(p: Perm) -> Perm:
    inv = np.empty_like(p.table)
    inv[p.table] = np.arange(p.size)
    return _trusted(p.n, p.k, inv)


# Table-level kernels.  They accept a leading batch axis so search code can
# push many permutations of one level through at once.


def embed_table(t: np.ndarray, n: int, k: int, m: int) -> np.ndarray:
    size = n**k
    x = np.arange(size * n**m)
    return t[..., x % size] + size * (x // size)


def shift_table(t: np.ndarray, n: int, k: int, m: int) -> np.ndarray:
    pre = n**m
    x = np.arange(pre * n**k)
    return x % pre + pre * t[..., x // pre]


def compose_tables(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim == 1 and b.ndim == 1:
        return a[b]
    a, b = np.broadcast_arrays(a, b)
    return np.take_along_axis(a, b, axis=-1)


def invert_table(t: np.ndarray) -> np.ndarray:
    inv = np.empty_like(t)
    np.put_along_axis(inv, t, np.broadcast_to(np.arange(t.shape[-1]), t.shape), axis=-1)
    return inv


def phi_r_table(t: np.ndarray, n: int, k: int, r: int) -> np.ndarray:
    # (id_{r-1} x phi)(id_{r-2} x phi x id_1) ... (phi x id_{r-1}), rightmost first
    out = embed_table(t, n, k, r - 1)
    for j in range(1, r):
        factor = shift_table(embed_table(t, n, k, r - 1 - j), n, k + r - 1 - j, j)
        out = compose_tables(factor, out)
    return out


def convolve_tables(a: np.ndarray, b: np.ndarray, n: int, k: int, r: int) -> np.ndarray:
    pr = phi_r_table(a, n, k, r)
    out = compose_tables(embed_table(b, n, r, k - 1), pr)
    out = compose_tables(invert_table(pr), out)
    return compose_tables(embed_table(a, n, k, r - 1), out)


def embed(p: Perm, m: int) -> Perm:
    """``p x id_m``: acts on ``alpha gamma`` as ``p(alpha) gamma``."""
    if m < 0:
        raise DomainError("embedding depth must be >= 0")
    return _trusted(p.n, p.k + m, embed_table(p.table, p.n, p.k, m))


def shift(p: Perm, m: int) -> Perm:
    """``id_m x p``, the permutation of ``varphi^m(u)``."""
    if m < 0:
        raise DomainError("shift depth must be >= 0")
    return _trusted(p.n, p.k + m, shift_table(p.table, p.n, p.k, m))


def phi_r(p: Perm, r: int) -> Perm:
    if r < 1:
        raise DomainError(f"phi_r needs r >= 1, got {r}")
    return _trusted(p.n, p.k + r - 1, phi_r_table(p.table, p.n, p.k, r))


def convolve(p: Perm, q: Perm) -> Perm:
    """Permutation of ``u * w = u lambda_u(w)``, so ``lambda_p lambda_q = lambda_{convolve(p, q)}``.

    Levels k and r give level k + r - 1; level-0 operands are treated as
    level 1 identities.
    """
    if p.n != q.n:
        raise LevelError(f"alphabet mismatch: {p.n} vs {q.n}")
    if p.k == 0:
        p = embed(p, 1)
    if q.k == 0:
        q = embed(q, 1)
    k, r = p.k, q.k
    return _trusted(p.n, k + r - 1, convolve_tables(p.table, q.table, p.n, k, r))


def convolve_power(p: Perm, e: int) -> Perm:
    if e < 1:
        raise DomainError("convolution power must be >= 1")
    out = p
    for _ in range(e - 1):
        out = convolve(out, p)
    return out


def inner_image(phi: Perm) -> Perm:
    """``(id_1 x phi)(phi^-1 x id_1)``: the permutation inducing Ad(u) for u ~ phi."""
    return compose(shift(phi, 1), embed(invert_perm(phi), 1))


def conjugate_inner(phi: Perm, p: Perm) -> Perm:
    """``(1 x phi) p (phi^-1 x 1)``, i.e. Ad(u) lambda_p for u ~ phi at level k-1."""
    if phi.n != p.n or phi.k + 1 != p.k:
        raise LevelError(f"relabeling of level {phi.k} cannot act on level {p.k}")
    return compose(shift(phi, 1), compose(p, embed(invert_perm(phi), 1)))


def _factors_at(t: np.ndarray, n: int, j: int) -> bool:
    block = n**j
    head = t[:block]
    if head.size and head.max() >= block:
        return False
    x = np.arange(t.size)
    return bool(np.array_equal(t, head[x % block] + block * (x // block)))


def minimal_level(p: Perm) -> int:
    """Least j with ``p = tau x id_{k-j}`` for some tau at level j."""
    j = p.k
    while j > 0 and _factors_at(p.table, p.n, j - 1):
        j -= 1
    return j


def reduce_level(p: Perm) -> Perm:
    j = minimal_level(p)
    return _trusted(p.n, j, p.table[: p.n**j].copy())


def pad_to(p: Perm, level: int) -> Perm:
    if level < p.k:
        raise LevelError(f"cannot pad level {p.k} down to {level}")
    return p if level == p.k else embed(p, level - p.k)


# ------------------------------------------------------------ cycle I/O

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(,)|(\d+))")


def parse_cycles(text: str, n: int, k: int) -> Perm:
    """Read a product of disjoint cycles over {1..n^k}; ``"()"`` or ``""`` is the identity."""
    size = n**k
    table = np.arange(size)
    seen: set[int] = set()
    pos = 0
    current: list[int] | None = None
    expect_number = False
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CycleParseError(f"unexpected character {text[pos]!r}", pos)
        at = m.start(m.lastindex)
        if m.group(1):
            if current is not None:
                raise CycleParseError("nested '('", at)
            current, expect_number = [], True
        elif m.group(2):
            if current is None:
                raise CycleParseError("unmatched ')'", at)
            if expect_number and current:
                raise CycleParseError("dangling ','", at)
            for a, b in zip(current, current[1:] + current[:1]):
                table[a - 1] = b - 1
            current = None
        elif m.group(3):
            if current is None or expect_number:
                raise CycleParseError("misplaced ','", at)
            expect_number = True
        else:
            if current is None:
                raise CycleParseError("number outside a cycle", at)
            if not expect_number:
                raise CycleParseError("missing ','", at)
            v = int(m.group(4))
            if not 1 <= v <= size:
                raise CycleParseError(f"element {v} not in 1..{size}", at)
            if v in seen:
                raise CycleParseError(f"element {v} repeated", at)
            seen.add(v)
            current.append(v)
            expect_number = False
        pos = m.end()
    if current is not None:
        raise CycleParseError("unterminated cycle", len(text))
    return Perm(n, k, table)


def cycles(p: Perm) -> list[list[int]]:
    """Non-trivial cycles, 1-based, each starting at its least element, sorted."""
    t = p.table
    done = np.zeros(p.size, dtype=bool)
    out = []
    for start in range(p.size):
        if done[start] or t[start] == start:
            continue
        cyc = [start + 1]
        done[start] = True
        x = int(t[start])
        while x != start:
            cyc.append(x + 1)
            done[x] = True
            x = int(t[x])
        out.append(cyc)
    return out


def format_cycles(p: Perm) -> str:
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + ",".join(map(str, c)) + ")" for c in cs)


def words_of_level(n: int, k: int) -> Iterable[Word]:
    for r in range(1, n**k + 1):
        yield unrank_word(n, k, r)
