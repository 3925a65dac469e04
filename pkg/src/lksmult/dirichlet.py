"""Discrete Besov-Dirichlet seminorms ||x||^p = sum_{j,k} c_{j,k} |x_j - x_k|^p.

Coefficient convention (the dominant source of factor-of-two bugs, so it
is stated once and used everywhere): a Toeplitz matrix built from a
coefficient sequence (c_k) has entries

    c_{j,k} = c_{|j-k|} / 2,

matching F L^2(T, w) = B^2_0(c_{|j-k|}/2) for the LKS weight generated
by (c_k).  Toeplitz seminorms are evaluated over all of Z with the
window vector extended by zero; `general` matrices live on their stated
window only (entries vanish outside).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .seqcore import (DegenerateMatrixError, PreconditionError, WindowSeq,
                      synthesize_complex)
from .weights import (CONVERGENT, DIVERGENT, CoeffSeq, _two_series,
                      lks_weight)


@dataclass(frozen=True)
class DirichletMatrix:
    kind: str                       # "toeplitz" | "general"
    lo: int
    hi: int
    coeffs: Optional[CoeffSeq] = None
    dense: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "toeplitz":
            if self.coeffs is None:
                raise PreconditionError("toeplitz kind needs a CoeffSeq")
        elif self.kind == "general":
            d = np.asarray(self.dense, dtype=float)
            n = self.hi - self.lo + 1
            if d.shape != (n, n):
                raise PreconditionError("dense shape does not match window")
            if np.any(d < 0) or not np.all(np.isfinite(d)):
                raise PreconditionError("entries must be finite and nonnegative")
            if not np.allclose(d, d.T, atol=0.0):
                raise PreconditionError("matrix must be symmetric")
            if np.any(np.diag(d) != 0.0):
                raise PreconditionError("diagonal must vanish")
            d = d.copy()
            d.setflags(write=False)
            object.__setattr__(self, "dense", d)
        else:
            raise PreconditionError("unknown kind %r" % (self.kind,))

    @classmethod
    def toeplitz(cls, c: CoeffSeq, N: int = 64) -> "DirichletMatrix":
        return cls("toeplitz", -N, N, coeffs=c)

    @classmethod
    def general(cls, dense, lo: int) -> "DirichletMatrix":
        dense = np.asarray(dense, dtype=float)
        return cls("general", lo, lo + dense.shape[0] - 1, dense=dense)

    def entry(self, j: int, k: int) -> float:
        if self.kind == "toeplitz":
            return 0.5 * float(self.coeffs.coeff(abs(j - k)))
        if self.lo <= j <= self.hi and self.lo <= k <= self.hi:
            return float(self.dense[j - self.lo, k - self.lo])
        return 0.0

    def materialize(self) -> np.ndarray:
        """Dense entries on the window (lazy for the toeplitz kind)."""
        if self.kind == "general":
            return np.asarray(self.dense)
        idx = np.arange(self.lo, self.hi + 1)
        return 0.5 * self.coeffs.coeff(np.abs(idx[:, None] - idx[None, :]))


def _toeplitz_seminorm_p2(c: CoeffSeq, x: np.ndarray) -> float:
    # sum_k c_k sum_j |x_j - x_{j-k}|^2 = sum_k c_k (2 S - 2 Re r_k)
    n = x.size
    S = float(np.sum(np.abs(x) ** 2))
    L = 1
    while L < n + c.K + 1:
        L *= 2
    f = np.fft.fft(x, L)
    ac = np.fft.ifft(f * np.conj(f))           # ac[k] = sum_j x_{j+k} conj(x_j)
    r = ac[1: c.K + 1].real
    kmax = min(c.K, n - 1)
    total = float(np.sum(c.c[:kmax] * (2.0 * S - 2.0 * r[:kmax])))
    if c.K > kmax:                              # shifts that clear the support
        total += 2.0 * S * float(np.sum(c.c[kmax:]))
    return total


def seminorm(C: DirichletMatrix, x: WindowSeq, p: float = 2.0) -> float:
    """||x||_{B^p(C)}^p ... raised to 1/p, i.e. the seminorm itself.

    Toeplitz matrices use the banded/FFT path (cost O((N+K) log) for
    p = 2, O(K (N+K)) otherwise); general matrices require the vector
    to live inside their window.
    """
    if p < 1.0:
        raise PreconditionError("p must be >= 1")
    if C.kind == "general":
        if x.lo < C.lo or x.hi > C.hi:
            raise PreconditionError("vector window exceeds matrix window")
        xv = x.as_range(C.lo, C.hi)
        diff = np.abs(xv[:, None] - xv[None, :]) ** p
        return float(np.sum(C.dense * diff)) ** (1.0 / p)
    c = C.coeffs
    xv = x.values
    if p == 2.0:
        return math.sqrt(max(_toeplitz_seminorm_p2(c, xv), 0.0))
    total = 0.0
    z = np.zeros(1, dtype=complex)
    for k in range(1, c.K + 1):
        ck = c.c[k - 1]
        if ck == 0.0:
            continue
        zk = np.zeros(k, dtype=complex)
        a = np.concatenate([xv, zk])
        b = np.concatenate([zk, xv])
        total += ck * float(np.sum(np.abs(a - b) ** p))
    return total ** (1.0 / p)


@dataclass(frozen=True)
class ComponentInfo:
    non_splitting: bool
    D: Optional[int]                      # Toeplitz GCD, absent for general kind
    cosets: tuple                         # tuple of index arrays on the window
    chains: dict                          # window index -> chain [0, ..., n] or None


def _bezout_representation(n: int, gens) -> list:
    """Integers a_i with n = sum a_i p_i, built by folding extended gcds."""
    g, coeff = gens[0], [1]
    for p in gens[1:]:
        old = math.gcd(g, p)
        # s*g + t*p = old
        s, t = _ext_gcd(g, p)
        coeff = [ci * s for ci in coeff] + [t]
        g = old
    q = n // g
    return [a * q for a in coeff]


def _ext_gcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0


def _chain_to(n: int, gens) -> list:
    """Chain 0 = n_0, ..., n_r = n with steps +-p_i, partial sums kept inside
    [min(0,n) - max(gens), max(0,n) + max(gens)] by greedy reordering."""
    if n == 0:
        return [0]
    coeff = _bezout_representation(n, gens)
    pos, neg = [], []
    for a, p in zip(coeff, gens):
        (pos if a > 0 else neg).extend([int(math.copysign(p, a))] * abs(a))
    upper, lower = max(0, n), min(0, n)
    chain = [0]
    cur = 0
    while pos or neg:
        if cur > upper:
            s = neg.pop()        # remaining sum is n - cur < 0, so neg is nonempty
        elif cur < lower:
            s = pos.pop()
        elif pos and neg:
            s = pos.pop() if cur <= (upper + lower) // 2 else neg.pop()
        else:
            s = (pos or neg).pop()
        cur += s
        chain.append(cur)
    assert cur == n
    return chain


def components(C: DirichletMatrix) -> ComponentInfo:
    """Connectivity structure of the matrix.

    Toeplitz: D = gcd{k >= 1 : c_k > 0}, cosets are the residue classes
    j + DZ intersected with the window, and chains joining 0 to every
    reachable window index are built constructively (Bezout plus greedy
    reordering, so partial sums stay near the window).  General: union
    find over the positive entries of the window matrix.
    """
    win = np.arange(C.lo, C.hi + 1)
    if C.kind == "toeplitz":
        support = [int(k) for k in C.coeffs.support()]
        if not support:
            raise DegenerateMatrixError("all coefficients vanish")
        D = 0
        gens = []
        for k in support:
            nd = math.gcd(D, k)
            if nd != D:
                gens.append(k)
                D = nd
        cosets = tuple(win[(win % D) == (r % D)] for r in range(D))
        chains = {}
        for n in win:
            chains[int(n)] = _chain_to(int(n), gens) if n % D == 0 else None
        return ComponentInfo(D == 1, D, cosets, chains)

    d = C.dense
    if not np.any(d > 0):
        raise DegenerateMatrixError("all entries vanish")
    n = d.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    rows, cols = np.nonzero(d > 0)
    for i, j in zip(rows, cols):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    cosets = tuple(win[np.array(g)] for g in sorted(groups.values(), key=min))
    # chains from 0 by BFS inside the window
    chains = {int(j): None for j in win}
    start = -C.lo
    prev = {start: None}
    queue = [start]
    while queue:
        i = queue.pop(0)
        for j in np.nonzero(d[i] > 0)[0]:
            if int(j) not in prev:
                prev[int(j)] = i
                queue.append(int(j))
    for i in prev:
        path = []
        k = i
        while k is not None:
            path.append(int(win[k]))
            k = prev[k]
        chains[int(win[i])] = path[::-1]
    return ComponentInfo(len(cosets) == 1, None, cosets, chains)


@dataclass(frozen=True)
class MinimalityReport:
    verdict: str                 # minimal | not_minimal | inconclusive
    necessary_series: float      # partial sum, must converge for minimality
    sufficient_series: float     # partial sum, convergence implies minimality
    necessary_class: str
    sufficient_class: str


def minimality_report(c: CoeffSeq, n_max: int = 4096) -> MinimalityReport:
    """Minimality of (e_n) in B^2_0(c_{|j-k|}/2) via the two series of
    Comments 2.5(3) (evaluated on the gcd-reduced sequence, which carries
    the within-coset structure)."""
    red = c.reduced()
    lower, upper, cls_low, cls_up = _two_series(red, n_max)
    if cls_up == CONVERGENT:
        verdict = "minimal"
    elif cls_low == DIVERGENT:
        verdict = "not_minimal"
    else:
        verdict = "inconclusive"
    return MinimalityReport(verdict, lower, upper, cls_low, cls_up)


def parseval_check(c: CoeffSeq, x: WindowSeq, M: int = 1 << 18):
    """Two independent evaluations of the same norm:

        lhs = quadrature of ||F^{-1} x||^2_{L^2(w)} on the grid,
        rhs = Besov double sum through the banded seminorm,

    returned as (lhs, rhs, relative gap).  Exact up to roundoff as long
    as the total degree 2*window + K stays below M/2.
    """
    if x.hi - x.lo > M // 4:
        raise PreconditionError("window too wide for the grid")
    grid, _ = lks_weight(c, M)
    p = synthesize_complex(x, M)
    lhs = float(np.mean(np.abs(p) ** 2 * grid.samples))
    rhs = seminorm(DirichletMatrix.toeplitz(c), x, 2.0) ** 2
    gap = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return lhs, rhs, gap


def shift_isometry_check(C: DirichletMatrix, trials: int = 20, seed: int = 0,
                         tol: float = 1e-10) -> bool:
    """||S x|| == ||x|| for `trials` random finitely supported x.

    True for every Toeplitz matrix and false for generic non-Toeplitz
    perturbations (Corollary: the shift is an isometry iff Toeplitz).
    """
    rng = np.random.default_rng(seed)
    span = min(C.hi - 1, 8) - max(C.lo, -8) + 1
    for _ in range(trials):
        lo = max(C.lo, -8)
        vals = rng.standard_normal(span) + 1j * rng.standard_normal(span)
        x = WindowSeq(lo, lo + span - 1, vals)
        a = seminorm(C, x, 2.0)
        b = seminorm(C, x.shifted(1), 2.0)
        if abs(a - b) > tol * max(a, 1.0):
            return False
    return True


def contraction_check(C: DirichletMatrix, x: WindowSeq):
    """Pair (||xbar||, ||x||) with xbar = min(max(Re x, 0), 1); callers
    assert the contraction ||xbar|| <= ||x||."""
    clamped = WindowSeq(x.lo, x.hi, np.clip(x.values.real, 0.0, 1.0))
    return seminorm(C, clamped, 2.0), seminorm(C, x, 2.0)
