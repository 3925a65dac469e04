"""Green kernels, discrete capacities, and equilibrium potentials.

For a weight w with 1/w integrable, the Green kernel is g = F(1/w) >= 0
and the potential kernel is kappa = F(1/w^{1/2}) >= 0, with
kappa * kappa = g.  Capacity of a finite set J is

    Cap(J) = inf { ||x||_D^2 : x_j >= 1 on J }
           = sup { sum_J z : z >= 0 on J, (Gz)_j <= 1 on J },

and the equilibrium triple x = Gz, y = Kz satisfies
||x||_D^2 = ||y||_2^2 = sum z = Cap(J).

Kernels are computed by quadrature on the midpoint grid, so the whole
theory here is the exact potential theory of the sampled circle; the
identity checks (see `kernel_identity_residual`) certify the kernels at
grid resolution, and window truncation is the only approximation that
reaches the capacity solvers.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import solve_toeplitz

from .seqcore import (PreconditionError, QuadratureResolutionError,
                      SolverFailure, WeightGrid, WindowSeq,
                      analyze_samples_full, convolve_array, grid_nodes,
                      toeplitz_form)
from .weights import CoeffSeq, lks_weight, reciprocal_integrable

log = logging.getLogger(__name__)

NEG_CLAMP_REL = 1e-8     # kernel entries below -1e-8 * g0 are a hard error


@dataclass(frozen=True)
class KernelSeq:
    """Symmetric nonnegative convolution kernel on Z, stored on [-N, N]."""

    values: np.ndarray
    role: str                 # "green" | "potential"
    tag: str = ""
    quasimetric_kappa: Optional[float] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.size % 2 != 1:
            raise PreconditionError("kernel array must have odd length")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise PreconditionError("kernel entries must be finite and nonnegative")
        if not np.allclose(v, v[::-1], rtol=0.0, atol=1e-12 * max(v.max(), 1e-300)):
            raise PreconditionError("kernel must be symmetric")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return (self.values.size - 1) // 2

    def at(self, j) -> np.ndarray:
        j = np.asarray(j)
        if np.any(np.abs(j) > self.N):
            raise PreconditionError("kernel window [-%d, %d] exceeded" % (self.N, self.N))
        return self.values[j + self.N]

    @property
    def g0(self) -> float:
        return float(self.values[self.N])


@dataclass(frozen=True)
class WeightKernels:
    """Kernel pair of one weight plus its quadrature coefficient table,
    so that capacities and Dirichlet norms refer to the same measure."""

    g: KernelSeq
    kappa: KernelSeq
    wtable: WindowSeq
    tag: str = ""

    def norm_sq(self, x: WindowSeq) -> float:
        """||x||_D^2 = quadrature L^2(w) norm of the polynomial F^{-1}x."""
        return toeplitz_form(x.values, self.wtable)


def _clamp_kernel(vals: np.ndarray, what: str) -> np.ndarray:
    g0 = float(vals[vals.size // 2])
    mn = float(vals.min())
    if mn < -NEG_CLAMP_REL * g0:
        raise QuadratureResolutionError(
            "%s kernel has coefficient %.3g < -%g * g0; retry with a larger grid"
            % (what, mn, NEG_CLAMP_REL))
    if mn < 0.0:
        log.info("clamping %d slightly negative %s entries (min %.3g)",
                 int(np.sum(vals < 0)), what, mn)
        vals = np.where(vals < 0.0, 0.0, vals)
    return vals


def _kernels_from_samples(samples: np.ndarray, N_g: int, N_w: int, tag: str,
                          wtable: Optional[WindowSeq] = None) -> WeightKernels:
    M = samples.size
    half = M // 2
    if N_g >= half or N_w >= half:
        raise PreconditionError("kernel window exceeds grid resolution")
    if np.any(samples <= 0.0):
        raise QuadratureResolutionError("weight vanishes at a grid node")
    gfull = analyze_samples_full(1.0 / samples).real
    kfull = analyze_samples_full(samples ** -0.5).real
    gv = _clamp_kernel(gfull[half - N_g: half + N_g + 1], "green")
    kv = _clamp_kernel(kfull[half - N_g: half + N_g + 1], "potential")
    if wtable is None:
        wfull = analyze_samples_full(samples).real
        wtable = WindowSeq(-N_w, N_w, wfull[half - N_w: half + N_w + 1])
    return WeightKernels(KernelSeq(gv, "green", tag),
                         KernelSeq(kv, "potential", tag), wtable, tag)


def green_kernel(c: CoeffSeq, M: int = 1 << 20, N_g: int = 1 << 14) -> WeightKernels:
    """Kernels of the LKS weight generated by `c`.

    Precondition: the reciprocal-integrability verdict for `c` must be
    `integrable` (only a closed-form tag can certify that; truncated
    tables never qualify, since their weights have double zeros).
    """
    rep = reciprocal_integrable(c)
    if rep.verdict != "integrable":
        raise PreconditionError(
            "1/w not certified integrable (verdict %r); Green kernel undefined"
            % rep.verdict)
    grid, table = lks_weight(c, M)
    N_w = min(max(4 * N_g, c.K + 1), M // 2 - 1)
    return _kernels_from_samples(grid.samples, N_g, N_w,
                                 "lks(K=%d,M=%d)" % (c.K, M),
                                 wtable=table.pad_to(-N_w, N_w))


@lru_cache(maxsize=16)
def riesz_kernels(alpha: float, M: int = 1 << 20, N_g: int = 1 << 16,
                  N_w: int = 1 << 17) -> WeightKernels:
    """Kernels of the fractional-order weight w_alpha = |1 - e^{it}|^alpha,
    0 < alpha < 1 (the closed form; its Green kernel is the discrete
    Riesz kernel g_j ~ (|j|+1)^{-(1-alpha)})."""
    if not 0.0 < alpha < 1.0:
        raise PreconditionError("alpha must lie in (0, 1)")
    t = grid_nodes(M)
    samples = np.abs(2.0 * np.sin(t / 2.0)) ** alpha
    return _kernels_from_samples(samples, N_g, N_w, "riesz(alpha=%g,M=%d)" % (alpha, M))


def kernel_identity_residual(samples: np.ndarray, n_check: int = 256) -> float:
    """max_{|j| <= n_check} |(kappa * kappa)_j - g_j| at full grid resolution.

    The convolution runs over every resolvable coefficient of kappa, so
    the residual measures only quadrature/roundoff consistency of the
    computed kernels with kappa * kappa = g.
    """
    M = samples.size
    g = analyze_samples_full(1.0 / samples).real
    kap = analyze_samples_full(samples ** -0.5).real
    conv = convolve_array(kap, kap)          # index j + M <-> lag j
    jj = np.arange(-n_check, n_check + 1)
    return float(np.max(np.abs(conv[jj + M] - g[jj + M // 2])))


def apply_potential(k: KernelSeq, x: WindowSeq) -> WindowSeq:
    """(K x)_m = sum_j k_{m-j} x_j as a sequence on the combined window."""
    kern = WindowSeq(-k.N, k.N, k.values.astype(complex))
    from .seqcore import convolve
    return convolve(kern, x)


@dataclass
class CapacityResult:
    J: np.ndarray
    value: float
    xJ: WindowSeq
    yJ: Optional[WindowSeq]
    zJ: WindowSeq
    active_set: np.ndarray
    gap: float
    method: str
    iterations: int
    truncation_flag: bool
    checks: dict = field(default_factory=dict)

    def validate(self, tol: float = 1e-8) -> dict:
        """Equilibrium-structure checks; stored in `checks` as booleans."""
        xv = self.xJ.values.real
        xJvals = self.xJ.at(self.J).real
        z = self.zJ.values.real
        out = {
            "x_le_1": bool(xv.max() <= 1.0 + tol),
            "x_ge_0": bool(xv.min() >= -tol),
            "x_eq_1_on_J": bool(np.max(np.abs(xJvals - 1.0)) <= tol),
            "z_nonneg": bool(z.min() >= -tol),
            "max_principle": bool(xv.max() <= 1.0 + 1e-8),
        }
        self.checks.update(out)
        return out


def _active_set_solve(GJ: np.ndarray, warm: Optional[list] = None):
    n = GJ.shape[0]
    S = sorted(set(warm)) if warm else list(range(n))
    if not S:
        S = list(range(n))
    iters = 0
    while True:
        iters += 1
        z = np.linalg.solve(GJ[np.ix_(S, S)], np.ones(len(S)))
        worst = int(np.argmin(z))
        if z[worst] >= -1e-13:
            break
        S.pop(worst)
        if not S:
            raise SolverFailure("active set emptied")
    zf = np.zeros(n)
    zf[S] = np.maximum(z, 0.0)
    # drops may leave (Gz)_j > 1 at removed indices; re-add and re-solve then
    while True:
        slack = GJ @ zf - 1.0
        bad = [j for j in range(n) if j not in S and slack[j] > 1e-11]
        if not bad:
            break
        S.append(int(np.argmax(slack)))
        iters += 1
        z = np.linalg.solve(GJ[np.ix_(S, S)], np.ones(len(S)))
        while z.min() < -1e-13:
            S.pop(int(np.argmin(z)))
            z = np.linalg.solve(GJ[np.ix_(S, S)], np.ones(len(S)))
            iters += 1
        zf = np.zeros(n)
        zf[S] = np.maximum(z, 0.0)
        if iters > 4 * n + 16:
            raise SolverFailure("active-set cycling")
    return zf, sorted(S), iters


def _projected_gradient_solve(GJ: np.ndarray, tol: float = 1e-10,
                              max_iter: int = 10 ** 6):
    """Projected gradient ascent on the dual form
    phi(z) = 2 sum z - z^T G z over z >= 0, step 1/L with
    L = lambda_max(G_J) (= largest eigenvalue of K_J K_J^*)."""
    n = GJ.shape[0]
    L = float(np.linalg.eigvalsh(GJ)[-1])
    z = np.zeros(n)
    phi = 0.0
    for it in range(1, max_iter + 1):
        grad = 1.0 - GJ @ z
        z = np.maximum(z + grad / L, 0.0)
        Gz = GJ @ z
        phin = 2.0 * z.sum() - float(z @ Gz)
        kkt = max(float(np.max(np.where(z > 0, np.abs(1.0 - Gz), 0.0))),
                  float(np.max(np.maximum(1.0 - Gz, 0.0))))
        if abs(phin - phi) <= tol * max(abs(phin), 1e-30) and kkt <= 1e-9:
            return z, it
        phi = phin
    raise SolverFailure("projected gradient did not converge in %d iterations" % max_iter)


def _vertex_enumeration_solve(GJ: np.ndarray):
    """Exhaustive vertex enumeration of {z >= 0, (Gz)_J <= 1}; oracle for
    |J| <= 8."""
    n = GJ.shape[0]
    if n > 8:
        raise PreconditionError("dual_lp oracle limited to |J| <= 8")
    best, bz = 0.0, np.zeros(n)
    cnt = 0
    for r in range(1, n + 1):
        for S in itertools.combinations(range(n), r):
            for T in itertools.combinations(range(n), r):
                A = GJ[np.ix_(T, S)]
                try:
                    zs = np.linalg.solve(A, np.ones(r))
                except np.linalg.LinAlgError:
                    continue
                cnt += 1
                if zs.min() < -1e-12:
                    continue
                z = np.zeros(n)
                z[list(S)] = np.maximum(zs, 0.0)
                if float(np.max(GJ @ z)) <= 1.0 + 1e-9:
                    v = float(z.sum())
                    if v > best:
                        best, bz = v, z
    return bz, cnt


def capacity(J, kernels: WeightKernels, method: str = "active_set",
             xy_window: Optional[int] = None,
             warm_start: Optional[list] = None) -> CapacityResult:
    """Capacity of the finite set J with its equilibrium triple.

    Methods: `active_set` (drop rule, direct solves), `projected_gradient`
    (first-order on the dual quadratic program), `dual_lp` (vertex
    enumeration oracle, |J| <= 8).  The returned x = Gz and y = Kz are
    evaluated on [-xy_window, xy_window].
    """
    J = np.unique(np.asarray(list(J), dtype=int))
    if J.size == 0:
        raise PreconditionError("capacity of the empty set is not defined here")
    g = kernels.g
    span = int(np.max(np.abs(J)))
    if span >= g.N:
        raise PreconditionError("J exceeds the kernel window")
    truncation_flag = (g.N - span) < g.N // 4
    GJ = g.at(J[:, None] - J[None, :])

    if method == "active_set":
        z, S, iters = _active_set_solve(GJ, warm_start)
        active = J[np.array(S, dtype=int)]
    elif method == "projected_gradient":
        z, iters = _projected_gradient_solve(GJ)
        active = J[z > 1e-12]
    elif method == "dual_lp":
        z, iters = _vertex_enumeration_solve(GJ)
        active = J[z > 1e-12]
    else:
        raise PreconditionError("unknown method %r" % (method,))

    value = float(z.sum())
    energy = float(z @ GJ @ z)
    gap = max(float(np.max(np.abs(np.where(z > 0, GJ @ z - 1.0, 0.0)))),
              abs(value - energy) / max(value, 1e-300))

    W = xy_window if xy_window is not None else min(g.N - span, 4096)
    W = min(max(W, span), g.N - span)   # x must cover J; g must cover the window
    m = np.arange(-W, W + 1)
    xv = np.zeros(2 * W + 1)
    for zi, ji in zip(z, J):
        if zi != 0.0:
            xv += zi * g.at(m - ji)
    x = WindowSeq(-W, W, xv)
    y = None
    if kernels.kappa is not None and kernels.kappa.N >= W + span:
        yv = np.zeros(2 * W + 1)
        for zi, ji in zip(z, J):
            if zi != 0.0:
                yv += zi * kernels.kappa.at(m - ji)
        y = WindowSeq(-W, W, yv)

    zlo = min(int(J.min()), 0)
    zhi = max(int(J.max()), 0)
    zfull = np.zeros(zhi - zlo + 1)
    zfull[J - zlo] = z
    res = CapacityResult(J, value, x, y, WindowSeq(zlo, zhi, zfull),
                         active, gap, method, iters, truncation_flag)
    res.validate()
    return res


def interval_capacity(n0: int, n1: int, kernels: WeightKernels) -> float:
    """Cap([n0, n1]) through the Toeplitz fast path (falls back to the
    active-set solver when the unconstrained solve leaves z < 0)."""
    if n1 < n0:
        raise PreconditionError("empty interval")
    g = kernels.g
    if max(abs(n0), abs(n1)) >= g.N:
        raise PreconditionError("interval exceeds kernel window")
    col = g.values[g.N: g.N + (n1 - n0) + 1]
    z = solve_toeplitz((col, col), np.ones(n1 - n0 + 1))
    if z.min() >= -1e-13:
        return float(z.sum())
    return capacity(np.arange(n0, n1 + 1), kernels).value


def strong_capacitary_ratio(x: WindowSeq, kernels: WeightKernels,
                            warm_sweep: bool = True):
    """(integral of Cap(N_t) t dt) / ||x||_D^2 with N_t = {j : |x_j| >= t}.

    Cap(N_t) is constant between consecutive sorted values of |x|, so the
    integral is the exact finite sum of Cap * (t_i^2 - t_{i-1}^2)/2 terms;
    nested level sets share warm starts.  Lemma-type bound: the ratio is
    at most 2 (tests assert the safe constant 4; see the open question on
    the sharp constant).
    """
    vals = np.abs(x.values)
    idx = x.indices()
    levels = np.unique(vals[vals > 0.0])
    total = 0.0
    tprev = 0.0
    warm_members = None
    for t in levels:
        S = idx[vals >= t - 1e-300]
        warm = None
        if warm_sweep and warm_members is not None:
            warm = [i for i, j in enumerate(S) if int(j) in warm_members] or None
        res = capacity(S, kernels, warm_start=warm, xy_window=8)
        total += res.value * (t * t - tprev * tprev) / 2.0
        tprev = t
        warm_members = {int(v) for v in res.active_set}
    norm_sq = kernels.norm_sq(x)
    ratio = total / norm_sq if norm_sq > 0 else 0.0
    return ratio, total, norm_sq
