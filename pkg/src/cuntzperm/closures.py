"""
Decision procedures for lambda_sigma.

* Sigma-closure: starting from the diagonal of W_n^{k-1} x W_n^{k-1}, add a
  pair once all its images ``(f_i(a), f_i(b))`` are present.  The closure is
  the full square iff lambda_sigma restricts to an automorphism of the
  diagonal.
* Psi-closure: starting from the annihilated symbol, add an off-diagonal pair
  once all its images under the corner maps f_ij are present.  Together with
  the Sigma test this decides whether lambda_sigma is an automorphism.

Both closures run as reverse-dependency worklists: each pair keeps a count of
images still outside the set, and entering a pair decrements the counts of
its preimages.

``ring_nilpotent_oracle`` decides the same questions by a different route:
it materializes the 0/1 generator matrices and tests nilpotency of the ring
they generate with boolean matrix products.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .algebra import DomainError, Perm
from .trees import TreeTuple, extract_maps, is_rooted_tree, shape_of

__all__ = [
    "ClosureState",
    "PairMaps",
    "ResourceCapExceeded",
    "sigma_closure",
    "pair_maps",
    "psi_closure",
    "is_diag_automorphism",
    "is_automorphism",
    "ring_nilpotent_oracle",
    "generator_matrices",
    "boolean_nilpotency_index",
    "diagnose",
    "ring_nilpotent_oracle_batch",
]

DAGGER = -1


class ResourceCapExceeded(DomainError):
    pass


@dataclass(frozen=True)
class ClosureState:
    """Fixpoint of a monotone pair closure.

    ``members`` is a boolean N x N array over W_n^{k-1} pairs; for the Psi
    closure the diagonal is left False and the annihilated symbol is implicit.
    ``depth`` is the first m with the m-th set equal to the fixpoint.
    """

    universe: str
    ok: bool
    depth: int
    members: np.ndarray = field(repr=False)

    def __iter__(self):
        yield self.ok
        yield self.depth


def _worklist(succ: list[list[int]], size: int, seeds_done: np.ndarray):
    """Shared fixpoint engine.

    ``succ[p]`` lists images of pair p that are not yet known to be in the
    set (absorbing targets already dropped).  Returns per-pair depth, -1 for
    pairs never reached.
    """
    pending = [len(s) for s in succ]
    preds: list[list[int]] = [[] for _ in range(size)]
    for p, ss in enumerate(succ):
        for q in ss:
            preds[q].append(p)
    depth = np.full(size, -1, dtype=np.int64)
    best = [0] * size
    queue = deque()
    for p in range(size):
        if seeds_done[p] and pending[p] == 0:
            depth[p] = 1
            queue.append(p)
    while queue:
        q = queue.popleft()
        d = int(depth[q])
        for p in preds[q]:
            pending[p] -= 1
            if d > best[p]:
                best[p] = d
            if pending[p] == 0:
                depth[p] = best[p] + 1
                queue.append(p)
    return depth


def sigma_closure(t: TreeTuple) -> ClosureState:
    """Closure of the diagonal under pair-preimages of all f_i.

    Needs only the tree maps, so one result serves every permutation that
    induces the same tuple.
    """
    maps = [f.table.tolist() for f in t]
    N = len(maps[0])
    succ: list[list[int]] = []
    for a in range(N):
        for b in range(N):
            if a == b:
                succ.append([])
                continue
            ss = []
            for f in maps:
                x, y = f[a], f[b]
                if x != y:
                    ss.append(x * N + y)
            succ.append(ss)
    offdiag = np.ones(N * N, dtype=bool)
    offdiag[:: N + 1] = False
    depth = _worklist(succ, N * N, offdiag)
    depth[:: N + 1] = 0
    members = (depth >= 0).reshape(N, N)
    ok = bool(members.all())
    return ClosureState("pairs", ok, int(depth.max()) if ok else int(depth[depth >= 0].max()), members)


@dataclass(frozen=True)
class PairMaps:
    """``target[i, j, a*N + b]``: index of f_ij(a, b), or -1 when annihilated.

    Entries on diagonal source pairs are -1 and never consulted.
    """

    n: int
    k: int
    target: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.n ** (self.k - 1)

    def __call__(self, i: int, j: int, a: int, b: int) -> tuple[int, int] | None:
        """Corner map with 1-based letters i, j and 0-based word ranks a, b."""
        v = int(self.target[i - 1, j - 1, a * self.N + b])
        return None if v == DAGGER else divmod(v, self.N)


def pair_maps(p: Perm) -> PairMaps:
    if p.k < 1:
        raise DomainError("pair maps need level >= 1")
    n, N = p.n, p.n ** (p.k - 1)
    inv = np.empty_like(p.table)
    inv[p.table] = np.arange(p.size)
    alpha = np.arange(N)
    y = np.stack([inv[i + n * alpha] for i in range(n)])  # sigma^-1(i alpha)
    gamma, last = y % N, y // N
    same = last[:, None, :, None] == last[None, :, None, :]
    tgt = np.where(same, gamma[:, None, :, None] * N + gamma[None, :, None, :], DAGGER)
    tgt = tgt.reshape(n, n, N * N)
    tgt[:, :, :: N + 1] = DAGGER
    return PairMaps(n, p.k, tgt)


def psi_closure(p: Perm | PairMaps) -> ClosureState:
    pm = p if isinstance(p, PairMaps) else pair_maps(p)
    N = pm.N
    flat = pm.target.reshape(-1, N * N).T.tolist()  # per pair: its n*n images
    succ = [[q for q in row if q != DAGGER] for row in flat]
    offdiag = np.ones(N * N, dtype=bool)
    offdiag[:: N + 1] = False
    for d in range(N):
        succ[d * (N + 1)] = []
    depth = _worklist(succ, N * N, offdiag)
    depth[:: N + 1] = -1
    members = (depth >= 0).reshape(N, N)
    ok = bool(members.sum() == N * N - N)
    reached = depth[depth >= 0]
    return ClosureState("offdiag+dagger", ok, int(reached.max()) if reached.size else 0, members)


def is_diag_automorphism(p: Perm) -> bool:
    return sigma_closure(extract_maps(p)).ok


def is_automorphism(p: Perm) -> bool:
    return sigma_closure(extract_maps(p)).ok and psi_closure(p).ok


# ---------------------------------------------------------------- oracle


def generator_matrices(p: Perm) -> tuple[np.ndarray, np.ndarray]:
    """The 0/1 matrices ``b_i`` (n x N x N) and ``d_ij`` (n x n x M x M), M = N*N.

    Built from forward images of sigma: ``b_i[a, c] = 1`` iff
    ``sigma(c m) = i a`` for some m, and ``d_ij[(a, b), (c, d)] = 1`` iff
    ``sigma(c m) = i a`` and ``sigma(d m) = j b`` for a common m.
    """
    n, N = p.n, p.n ** (p.k - 1)
    s = p.table
    b = np.zeros((n, N, N), dtype=np.uint8)
    d = np.zeros((n, n, N * N, N * N), dtype=np.uint8)
    for m in range(n):
        img = s[np.arange(N) + N * m]
        i, a = img % n, img // n
        b[i, a, np.arange(N)] = 1
        for c in range(N):
            for e in range(N):
                if c != e:
                    d[i[c], i[e], a[c] * N + a[e], c * N + e] = 1
    return b, d


def boolean_nilpotency_index(M: np.ndarray) -> int | None:
    """Least L with M^L = 0 over the boolean semiring, or None."""
    dim = M.shape[0]
    if dim == 0:
        return 0
    M = (M > 0).astype(np.int64)
    P = np.eye(dim, dtype=np.int64)
    for L in range(1, dim + 1):
        P = ((P @ M) > 0).astype(np.int64)
        if not P.any():
            return L
    return None


def ring_nilpotent_oracle(p: Perm, max_dim: int = 4096) -> tuple[bool, bool]:
    """``(diag, full)`` nilpotency verdicts from explicit generator matrices.

    All generators are entrywise non-negative, so a product of them vanishes
    iff its boolean product does, and the ring they generate is nilpotent iff
    the boolean sum of the generators is a nilpotent matrix.

    The diagonal ring is the quotient action of the b_i on D^{k-1}/C1.  A
    product of b's kills that quotient exactly when it has a single non-zero
    column, i.e. when it merges every pair of rows; so it is tested on the
    off-diagonal block of ``b_i (x) b_i``, which is non-negative.
    """
    if p.k < 1:
        raise DomainError("oracle needs level >= 1")
    N = p.n ** (p.k - 1)
    if N * N > max_dim:
        raise ResourceCapExceeded(f"pair space {N * N} exceeds cap {max_dim}")
    b, d = generator_matrices(p)
    off = np.array([a != c for a in range(N) for c in range(N)], dtype=bool)
    lift = sum(np.kron(b[i], b[i]) for i in range(p.n))[np.ix_(off, off)]
    dsum = d.sum(axis=(0, 1))[np.ix_(off, off)]
    diag = boolean_nilpotency_index(lift) is not None
    full = diag and boolean_nilpotency_index(dsum) is not None
    return diag, full


def diagnose(p: Perm, oracle: bool = True) -> dict:
    """Per-permutation report: tree shapes, closure verdicts and depths."""
    t = extract_maps(p)
    trees = []
    for i, f in enumerate(t, start=1):
        tree = is_rooted_tree(f)
        trees.append({"i": i, "rooted_tree": tree, "shape": shape_of(f).code if tree else None})
    sig = sigma_closure(t)
    psi = psi_closure(p)
    report = {
        "n": p.n,
        "k": p.k,
        "trees": trees,
        "sigma": {"ok": sig.ok, "depth": sig.depth},
        "psi": {"ok": psi.ok, "depth": psi.depth},
        "diag_automorphism": sig.ok,
        "automorphism": sig.ok and psi.ok,
    }
    if oracle:
        try:
            od, of = ring_nilpotent_oracle(p)
            report["oracle"] = {"diag": od, "full": of, "agrees": (od, of) == (sig.ok, sig.ok and psi.ok)}
        except ResourceCapExceeded as exc:
            report["oracle"] = {"skipped": str(exc)}
    return report


def _batch_nilpotent(M: np.ndarray) -> np.ndarray:
    """Boolean nilpotency of a stack of square 0/1 matrices, by repeated squaring."""
    B, dim, _ = M.shape
    if dim == 0:
        return np.ones(B, dtype=bool)
    P = (M > 0).astype(np.float32)
    e = 1
    while e < dim:
        P = (np.matmul(P, P) > 0).astype(np.float32)
        e *= 2
    return ~P.reshape(B, -1).any(axis=1)


def ring_nilpotent_oracle_batch(tables: np.ndarray, n: int, k: int, chunk: int = 2048):
    """Vectorized oracle over a stack of tables at one level.

    Returns two boolean arrays: nilpotency of the lifted b-ring and of the
    d-ring, separately (the full verdict is their conjunction).
    """
    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    N = n ** (k - 1)
    if N * N > 4096:
        raise ResourceCapExceeded(f"pair space {N * N} exceeds cap 4096")
    X = n**k
    c = np.arange(X) % N  # source word of slot x = c + N m
    m = np.arange(X) // N
    xs, ys = np.meshgrid(np.arange(X), np.arange(X), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    keep = c[xs] != c[ys]
    xs, ys = xs[keep], ys[keep]
    same_m = m[xs] == m[ys]
    off = np.array([a != e for a in range(N) for e in range(N)], dtype=bool)
    b_out, d_out = [], []
    for lo in range(0, tables.shape[0], chunk):
        T = tables[lo : lo + chunk]
        B = T.shape[0]
        i, a = T % n, T // n
        col = c[xs] * N + c[ys]
        row = a[:, xs] * N + a[:, ys]
        bi = np.broadcast_to(np.arange(B)[:, None], row.shape)
        L = np.zeros((B, N * N, N * N), dtype=np.uint8)
        sel = i[:, xs] == i[:, ys]
        L[bi[sel], row[sel], np.broadcast_to(col, row.shape)[sel]] = 1
        D = np.zeros_like(L)
        sm = np.broadcast_to(same_m, row.shape)
        D[bi[sm], row[sm], np.broadcast_to(col, row.shape)[sm]] = 1
        L = L[:, off][:, :, off]
        D = D[:, off][:, :, off]
        b_out.append(_batch_nilpotent(L))
        d_out.append(_batch_nilpotent(D))
    return np.concatenate(b_out), np.concatenate(d_out)
