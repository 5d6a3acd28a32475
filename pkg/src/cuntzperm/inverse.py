"""
Inverses by stabilization, square-freeness, and the matrix equations that
couple a permutation with its inverse.

For u ~ sigma at level k the conjugated sequence

    R_0 = sigma^-1,   R_{m+1} = (id_{m+1} x sigma)(R_m x id_1)(id_{m+1} x sigma^-1)

lives at level k + m.  Once R_m factors as ``tau x id_{k-1}`` with tau at
level m + 1, the next conjugating factor commutes with it and the sequence
is constant from there on; tau then induces the inverse endomorphism.
Every candidate is certified with ``convolve(p, tau) == identity``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numba
import numpy as np

from .algebra import (
    DomainError,
    LevelError,
    Perm,
    _trusted,
    compose,
    convolve,
    embed,
    invert_perm,
    pad_to,
    shift,
)

__all__ = [
    "NotStabilized",
    "StabilizationResult",
    "MAX_TABLE_ENV",
    "max_table_entries",
    "default_cutoff",
    "u_product",
    "invert_endo",
    "stabilize",
    "stabilization_levels",
    "is_square_free",
    "square_free_mask",
    "verify_coupled",
    "verify_necU",
]

MAX_TABLE_ENV = "CUNTZPERM_MAX_TABLE"
_DEFAULT_MAX_TABLE = 1 << 22


def max_table_entries() -> int:
    """Largest permutation table (in entries) any routine may allocate."""
    raw = os.environ.get(MAX_TABLE_ENV)
    if raw is None:
        return _DEFAULT_MAX_TABLE
    try:
        val = int(raw)
    except ValueError:
        raise DomainError(f"{MAX_TABLE_ENV}={raw!r} is not an integer") from None
    if val < 1:
        raise DomainError(f"{MAX_TABLE_ENV} must be positive")
    return val


def _max_level(n: int, cap: int) -> int:
    lv = 0
    while n ** (lv + 1) <= cap:
        lv += 1
    return lv


class NotStabilized(DomainError):
    """The conjugated sequence did not settle within ``cutoff`` levels.

    Either the endomorphism is not invertible or the cutoff was too small;
    ``capped`` says whether the memory budget lowered the cutoff.
    """

    def __init__(self, cutoff: int, capped: bool = False, cap: int | None = None):
        self.cutoff = cutoff
        self.capped = capped
        self.cap = cap
        msg = f"no stabilization up to inverse level {cutoff}"
        if capped:
            msg += f" (limited by table cap of {cap} entries; set {MAX_TABLE_ENV} to raise it)"
        super().__init__(msg)


@dataclass(frozen=True)
class StabilizationResult:
    found: bool
    inverse: Perm | None
    level: int | None
    iterations: int
    cutoff: int
    capped: bool = False

    @property
    def outcome(self) -> str:
        return "inverse found" if self.found else "not stabilized by cutoff"


def u_product(p: Perm, m: int) -> Perm:
    """``u_m = u* phi(u*) ... phi^{m-1}(u*)`` at level k + m - 1."""
    if m < 1:
        raise DomainError(f"u_product needs m >= 1, got {m}")
    inv = invert_perm(p)
    top = p.k + m - 1
    out = pad_to(inv, top)
    for j in range(1, m):
        out = compose(out, shift(embed(inv, m - 1 - j), j))
    return out


# --------------------------------------------------------- stabilization


@numba.njit(cache=True)
def _eval(x, m, sig, siginv, n, k, hi):
    """R_m(x), evaluated pointwise by unwinding the recursion (``hi`` is scratch)."""
    N = sig.shape[0]
    pre = 1
    for _ in range(m):
        pre *= n
    size = pre * N // n  # n^(k+m-1): level of R_{m-1}
    for j in range(m, 0, -1):
        y = x % pre + pre * siginv[x // pre]
        hi[j] = y // size
        x = y % size
        pre //= n
        size //= n
    v = siginv[x]
    pre = n
    size = N
    for j in range(1, m + 1):
        z = v + size * hi[j]
        v = z % pre + pre * sig[z // pre]
        pre *= n
        size *= n
    return v


# odd prime used as a stride: visiting positions in scrambled order finds a
# violation after a handful of probes, where a linear scan can walk through a
# long well-behaved prefix first
_STRIDE = 2654435761


@numba.njit(cache=True)
def _factors(m, j, sig, siginv, n, k, hi):
    """Whether R_m = tau x id with tau at level j."""
    block = 1
    for _ in range(j):
        block *= n
    size = block
    for _ in range(k + m - j):
        size *= n
    for i in range(size):
        x = (i * _STRIDE) % size
        v = _eval(x, m, sig, siginv, n, k, hi)
        if x < block:
            if v >= block:
                return False
        elif v != _eval(x % block, m, sig, siginv, n, k, hi) + block * (x // block):
            return False
    return True


@numba.njit(cache=True)
def _stabilize_kernel(sig, n, k, cutoff):
    """Returns (h, m, tau) with tau the inverse table at level h, or h = -1.

    Detection at step m: R_m factors through level m + 1 and R_{m+1} equals
    R_m x id_1.  The first condition already forces the second; both are
    checked.
    """
    siginv = np.empty_like(sig)
    for x in range(sig.shape[0]):
        siginv[sig[x]] = x
    hi = np.zeros(cutoff + 2, dtype=np.int64)
    for m in range(cutoff):
        if not _factors(m, m + 1, sig, siginv, n, k, hi):
            continue
        if not _factors(m + 1, m + 1, sig, siginv, n, k, hi):
            continue
        h = m + 1
        while h > 0 and _factors(m, h - 1, sig, siginv, n, k, hi):
            h -= 1
        size = 1
        for _ in range(h):
            size *= n
        tau = np.empty(size, dtype=np.int64)
        for x in range(size):
            tau[x] = _eval(x, m, sig, siginv, n, k, hi)
        return h, m + 1, tau
    return -1, cutoff, np.empty(0, dtype=np.int64)


@numba.njit(cache=True)
def _stabilize_many(tables, n, k, cutoff):
    out = np.empty(tables.shape[0], dtype=np.int64)
    for b in range(tables.shape[0]):
        h, _, _ = _stabilize_kernel(tables[b], n, k, cutoff)
        out[b] = h
    return out


def default_cutoff(n: int, k: int) -> int:
    return max(k, n ** (2 * (k - 1)))


def _effective_cutoff(n: int, k: int, cutoff: int | None) -> tuple[int, bool, int]:
    if cutoff is None:
        cutoff = default_cutoff(n, k)
    if cutoff < k:
        raise DomainError(f"cutoff {cutoff} is below the level {k}")
    cap = max_table_entries()
    # detection of an inverse at level h needs R_h, a table at level k + h
    room = _max_level(n, cap) - k
    if room < 1:
        raise NotStabilized(0, True, cap)
    if cutoff > room:
        return room, True, cap
    return cutoff, False, cap


def stabilize(p: Perm, cutoff: int | None = None) -> StabilizationResult:
    """Non-raising form of :func:`invert_endo`."""
    if p.k == 0:
        return StabilizationResult(True, p, 0, 0, 0)
    eff, capped, _ = _effective_cutoff(p.n, p.k, cutoff)
    h, iters, tab = _stabilize_kernel(np.ascontiguousarray(p.table, dtype=np.int64), p.n, p.k, eff)
    if h < 0:
        return StabilizationResult(False, None, None, iters, eff, capped)
    tau = _trusted(p.n, int(h), tab)
    if not convolve(p, tau).is_identity():
        raise RuntimeError("stabilized candidate failed the convolution certificate")
    return StabilizationResult(True, tau, tau.k, iters, eff, capped)


def invert_endo(p: Perm, cutoff: int | None = None) -> StabilizationResult:
    """Inverse of lambda_p as a permutation, found by stabilization.

    ``cutoff`` bounds the level of the inverse; the default is the a priori
    bound n^(2(k-1)), lowered to what the table budget allows.
    """
    res = stabilize(p, cutoff)
    if not res.found:
        raise NotStabilized(res.cutoff, res.capped, max_table_entries())
    return res


def stabilization_levels(tables: np.ndarray, n: int, k: int, cutoff: int | None = None) -> np.ndarray:
    """Inverse level per row of a table stack, -1 where the sequence never settled.

    Structural detection only; certify hits with :func:`invert_endo`.
    """
    eff, _, _ = _effective_cutoff(n, k, cutoff)
    tables = np.ascontiguousarray(np.atleast_2d(tables), dtype=np.int64)
    return _stabilize_many(tables, n, k, eff)


# ----------------------------------------------------------- square-free


def is_square_free(p: Perm) -> bool:
    """Whether lambda_p is an involution (or the identity)."""
    direct = convolve(p, p).is_identity()
    if p.k >= 1:
        uk = u_product(p, p.k)
        lhs = compose(uk, compose(embed(p, p.k - 1), invert_perm(uk)))
        matrix = lhs == embed(invert_perm(p), p.k - 1)
        if matrix != direct:
            raise RuntimeError("square-free criteria disagree")
    return direct


def square_free_mask(tables: np.ndarray, n: int, k: int, chunk: int = 4096) -> np.ndarray:
    """Vectorized ``convolve(p, p) == identity`` over a table stack."""
    from .algebra import convolve_tables

    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    out = []
    ident = np.arange(n ** (2 * k - 1))
    for lo in range(0, tables.shape[0], chunk):
        T = tables[lo : lo + chunk]
        sq = convolve_tables(T, T, n, k, k)
        out.append((sq == ident).all(axis=1))
    return np.concatenate(out) if out else np.zeros(0, dtype=bool)


# ------------------------------------------------------- coupled equations


def _same(p: Perm, q: Perm) -> bool:
    top = max(p.k, q.k)
    return pad_to(p, top) == pad_to(q, top)


def _ad(w: Perm, x: Perm) -> Perm:
    """``w x w*`` with x padded to the level of w."""
    return compose(w, compose(pad_to(x, w.k), invert_perm(w)))


def verify_coupled(U: Perm, V: Perm) -> bool:
    """``U_h V U_h* = U*`` and ``V_k U V_k* = V*`` for U at level k, V at level h."""
    if U.n != V.n:
        raise LevelError(f"alphabet mismatch: {U.n} vs {V.n}")
    U = pad_to(U, max(U.k, 1))
    V = pad_to(V, max(V.k, 1))
    first = _same(_ad(u_product(U, V.k), V), invert_perm(U))
    second = _same(_ad(u_product(V, U.k), U), invert_perm(V))
    return first and second


def verify_necU(U: Perm, r: int) -> tuple[bool, Perm]:
    """Check ``V_r U V_r* = U_r* U U_r`` for ``V = U_r* U* U_r``; returns (holds, V)."""
    if r < max(U.k, 1):
        raise LevelError(f"r = {r} is below the level {U.k}")
    U = pad_to(U, r)
    Ur = u_product(U, r)
    Ur_inv = invert_perm(Ur)
    V = compose(Ur_inv, compose(pad_to(invert_perm(U), Ur.k), Ur))
    lhs = _ad(u_product(V, r), U)
    rhs = compose(Ur_inv, compose(pad_to(U, Ur.k), Ur))
    return _same(lhs, rhs), V
