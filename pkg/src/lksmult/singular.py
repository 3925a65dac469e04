"""Weights with several power-like singularities on the circle.

For singularities at angles theta_j (exact rationals of a full turn) of
common order alpha, the multiplier algebra is governed by the polygon
parameter d_s: the largest divisor d' of the point count such that the
singularity set is a union of regular d'-gons.  The composite weight

    W = sum_j prod_m w_alpha^{theta_m - theta_j}

is equivalent to |1 - e^{i d_s t}|^alpha, and membership reduces to a
modulus-restricted capacitary test.  The two-singularity machinery
(cut-off decomposition, the three capacitary conditions, and the
inverse-decomposition adjustment) makes the mixed-order case and its
spectral localization checkable at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .seqcore import (CutoffSpecError, NotInvertibleError, PreconditionError,
                      WeightGrid, WindowSeq, analyze_samples_full, grid_nodes)
from .multipliers import (MultiplierSpec, RatioScan, classify_trend,
                          interval_ratio_scan, mu_riesz_sq)
from .potentials import WeightKernels, riesz_kernels


@dataclass(frozen=True)
class SingularitySet:
    """Pairwise distinct singular angles as exact fractions of a turn."""

    fractions: tuple      # Fraction values in [0, 1)
    alpha: float          # common order for the same-order case
    orders: Optional[tuple] = None   # per-point orders (two-point machinery)

    def __post_init__(self):
        fr = tuple(Fraction(f) % 1 for f in self.fractions)
        if len(set(fr)) != len(fr):
            raise PreconditionError("angles must be pairwise distinct mod 1")
        object.__setattr__(self, "fractions", fr)

    @property
    def d(self) -> int:
        return len(self.fractions)

    def angles(self) -> np.ndarray:
        return np.array([2.0 * np.pi * float(f) for f in self.fractions])


@dataclass(frozen=True)
class PolygonDecomposition:
    d: int
    divisors: tuple       # all divisors of d, descending
    d_s: int
    n_s: int
    orbits: tuple         # tuple of index-tuples into the angle list


def _divisors_desc(d: int):
    out = [k for k in range(1, d + 1) if d % k == 0]
    return tuple(sorted(out, reverse=True))


def polygon_structure(theta: SingularitySet) -> PolygonDecomposition:
    """Largest divisor d' > 1 of d such that rotation by 1/d' of a turn
    permutes the angle set (exact arithmetic), with the orbit partition
    into n_s = d/d_s regular d_s-gons; d_s = 1 when no symmetry exists."""
    fr = theta.fractions
    d = len(fr)
    index = {f: i for i, f in enumerate(fr)}
    for dp in _divisors_desc(d):
        if dp == 1:
            break
        step = Fraction(1, dp)
        if all((f + step) % 1 in index for f in fr):
            seen = set()
            orbits = []
            for i, f in enumerate(fr):
                if i in seen:
                    continue
                orb = []
                g = f
                for _ in range(dp):
                    j = index[g % 1]
                    orb.append(j)
                    seen.add(j)
                    g += step
                orbits.append(tuple(orb))
            return PolygonDecomposition(d, _divisors_desc(d), dp, d // dp,
                                        tuple(orbits))
    return PolygonDecomposition(d, _divisors_desc(d), 1, d,
                                tuple((i,) for i in range(d)))


def polygon_structure_float(angles, tol: float = 1e-9):
    """Heuristic symmetry detector for float angles (fractions of a turn);
    returns d_s only.  The exact-rational path is the authoritative one."""
    a = np.sort(np.mod(np.asarray(angles, dtype=float), 1.0))
    d = a.size
    for dp in _divisors_desc(d):
        if dp == 1:
            break
        b = np.sort(np.mod(a + 1.0 / dp, 1.0))
        if np.max(np.abs(b - a)) <= tol:
            return dp
    return 1


@dataclass(frozen=True)
class CompositeWeightReport:
    grid: WeightGrid
    d_s: int
    ratio_min: float
    ratio_max: float
    bracket: float          # A with W / |1 - e^{i d_s t}|^alpha in [1/A, A]
    w_min: float


def composite_weight(theta: SingularitySet, M: int = 1 << 18) -> CompositeWeightReport:
    """Grid of W = sum_j prod_m w_alpha^{theta_m - theta_j} and its
    equivalence ratio against |1 - e^{i d_s t}|^alpha."""
    alpha = theta.alpha
    t = grid_nodes(M)
    ang = theta.angles()
    W = np.zeros(M)
    for j in range(theta.d):
        term = np.ones(M)
        for m in range(theta.d):
            term *= np.abs(2.0 * np.sin((t - (ang[m] - ang[j])) / 2.0)) ** alpha
        W += term
    ds = polygon_structure(theta).d_s
    ref = np.abs(2.0 * np.sin(ds * t / 2.0)) ** alpha
    ratio = W / ref
    rmin, rmax = float(ratio.min()), float(ratio.max())
    return CompositeWeightReport(WeightGrid(W), ds, rmin, rmax,
                                 max(rmax, 1.0 / rmin), float(W.min()))


@dataclass(frozen=True)
class Theorem51Report:
    d_s: int
    scan: RatioScan
    verdict: str


def theorem51_check(lam: MultiplierSpec, theta: SingularitySet,
                    kmax: int = 10, pad: int = 2048,
                    M: int = 1 << 20) -> Theorem51Report:
    """Modulus-restricted capacitary test of Theorem-5.1 type:
    sum_{j in J} sum_{d_s | j-m} |lambda_j - lambda_m|^2/(|j-m|+1)^{1+alpha}
    against Cap_alpha(J) over the interval family J = [0, 2^k]."""
    alpha = theta.alpha
    ds = polygon_structure(theta).d_s
    n_top = 1 << kmax
    vals = lam.realize(-pad, n_top + pad)
    mu2 = mu_riesz_sq(vals, alpha, pad, modulus=ds)
    scan = interval_ratio_scan("restricted mu^2 vs Cap_%g" % alpha,
                               mu2, riesz_kernels(alpha, M), kmax)
    verdict = {"bounded": "pass", "diverging": "fail"}.get(
        scan.classification, "indeterminate")
    return Theorem51Report(ds, scan, verdict)


# ---------------------------------------------------------------------------
# cut-off decomposition

@dataclass(frozen=True)
class CutoffSpec:
    """Trapezoidal raised-cosine cut-off: eta = 1 on |t| < a, 0 on |t| > 2a,
    cosine ramp between, with its quadrature coefficient table."""

    a: float
    table: WindowSeq
    abs_sum: float          # sum |eta_hat(n)| over the stored window
    tail_bound: float       # estimated sum |eta_hat| beyond the window


def build_cutoff(a: float, n_coeffs: int = 8192, quad_M: int = 1 << 17) -> CutoffSpec:
    """Cut-off coefficients by quadrature, with the O(1/n^2) tail decay
    verified numerically (Wiener-algebra membership at tolerance)."""
    if not 0.0 < a < np.pi / 4:
        raise PreconditionError("half-width a must lie in (0, pi/4)")
    t = grid_nodes(quad_M)
    at = np.abs(t)
    ramp = 0.5 * (1.0 + np.cos(np.pi * (at - a) / a))
    e = np.where(at < a, 1.0, np.where(at > 2 * a, 0.0, ramp))
    full = analyze_samples_full(e).real
    half = quad_M // 2
    if n_coeffs >= quad_M // 4:
        raise PreconditionError("n_coeffs too large for the quadrature grid")
    vals = full[half - n_coeffs: half + n_coeffs + 1]
    scaled = np.abs(vals[n_coeffs + 1:]) * (np.arange(1, n_coeffs + 1) + 1.0) ** 2
    C_mid = float(np.max(scaled[n_coeffs // 2: 3 * n_coeffs // 4]))
    C_far = float(np.max(scaled[3 * n_coeffs // 4:]))
    if C_far > 4.0 * max(C_mid, 1e-300):
        raise CutoffSpecError("cut-off coefficients do not decay like 1/n^2")
    C2 = max(C_mid, C_far)
    tail_bound = 2.0 * C2 / n_coeffs
    abs_sum = float(np.sum(np.abs(vals)))
    if tail_bound > 1e-4 * abs_sum:
        raise CutoffSpecError("cut-off tail %.3g not summable at tolerance" % tail_bound)
    return CutoffSpec(float(a), WindowSeq(-n_coeffs, n_coeffs, vals),
                      abs_sum, tail_bound)


def cutoff_decompose(lam: MultiplierSpec, cutoff: CutoffSpec, lo: int, hi: int):
    """lambda^(1) = eta_hat * lambda (symbol convolution), lambda^(2) =
    lambda - lambda^(1), both on [lo, hi]; the sup-norm inequality
    ||lambda^(1)||_inf <= sum|eta_hat| * ||lambda||_inf is verified."""
    P = cutoff.table.hi
    vals = lam.realize(lo - P, hi + P)
    eh = cutoff.table.values.real
    from scipy.signal import fftconvolve
    lam1 = fftconvolve(vals, eh.astype(complex), mode="valid")
    lam2 = vals[P:-P] - lam1
    sup_ok = float(np.max(np.abs(lam1))) <= cutoff.abs_sum * \
        float(np.max(np.abs(vals))) + 1e-12
    if not sup_ok:
        raise CutoffSpecError("cut-off convolution violated the sup bound")
    return (WindowSeq(lo, hi, lam1), WindowSeq(lo, hi, lam2))


# ---------------------------------------------------------------------------
# Theorem 5.3 / Corollary 5.7 conditions

@dataclass(frozen=True)
class Theorem53Report:
    alpha: float
    beta: float
    gamma: float
    theta: float
    branch: str                     # "generic" | "axis"  (theta = pi n)
    conditions: dict                # name -> RatioScan
    verdict: str
    cutoff_a: float


def _condition_scans(lam1_vals: np.ndarray, lam2_vals: np.ndarray,
                     alpha: float, beta: float, theta: float, pad: int,
                     kmax: int, M: int, include_gamma: bool) -> dict:
    """Corollary-5.7 capacitary scans for a decomposition given on
    [-pad, 2^kmax + pad]:

      smooth_part:  mu^beta(lambda1)^2        vs Cap_beta
      rotated_part: mu^alpha(e^{ij theta} lambda2)^2  vs Cap_beta
      size_part:    |lambda2|^2               vs Cap_gamma
    """
    n_top = 1 << kmax
    gamma = max(alpha, beta - alpha)
    jfull = np.arange(-pad, n_top + pad + 1)
    kb = riesz_kernels(beta, M)
    out = {}
    mu1 = mu_riesz_sq(lam1_vals, beta, pad)
    out["smooth_part"] = interval_ratio_scan(
        "mu^%g(lambda1)^2 vs Cap_%g" % (beta, beta), mu1, kb, kmax)
    rot = np.exp(1j * theta * jfull) * lam2_vals
    mu2 = mu_riesz_sq(rot, alpha, pad)
    out["rotated_part"] = interval_ratio_scan(
        "mu^%g(rot lambda2)^2 vs Cap_%g" % (alpha, beta), mu2, kb, kmax)
    if include_gamma:
        kg = riesz_kernels(gamma, M)
        out["size_part"] = interval_ratio_scan(
            "|lambda2|^2 vs Cap_%g" % gamma,
            np.abs(lam2_vals[pad: pad + n_top + 1]) ** 2, kg, kmax)
    return out


def _combined_verdict(conditions: dict) -> str:
    states = [s.classification for s in conditions.values()]
    if all(s == "bounded" for s in states):
        return "pass"
    if any(s == "diverging" for s in states):
        return "fail"
    return "indeterminate"


def theorem53_check(lam: MultiplierSpec, alpha: float, beta: float,
                    theta: float, kmax: int = 10, pad: int = 2048,
                    M: int = 1 << 20, a: Optional[float] = None,
                    cutoff: Optional[CutoffSpec] = None) -> Theorem53Report:
    """Three-condition report for the weight w_beta * w_alpha^theta
    (0 < alpha < beta < 1) via the explicit cut-off decomposition.

    Generic branch (theta != pi n): all three Corollary-5.7 conditions;
    axis branch: the size condition is dropped.  Verdicts are trend
    classifications of the interval ratio scans.
    """
    if not (0.0 < alpha < beta < 1.0):
        raise PreconditionError("need 0 < alpha < beta < 1")
    gamma = max(alpha, beta - alpha)
    thw = math.remainder(theta, 2.0 * math.pi)
    axis = abs(math.remainder(theta, math.pi)) < 1e-12
    branch = "axis" if axis else "generic"
    if cutoff is None:
        if a is None:
            base = abs(thw) if not axis else math.pi
            a = min(0.9 * base / 4.0, 0.999 * math.pi / 4.0)
        cutoff = build_cutoff(a)
    n_top = 1 << kmax
    lam1, lam2 = cutoff_decompose(lam, cutoff, -pad, n_top + pad)
    conditions = _condition_scans(lam1.values, lam2.values, alpha, beta,
                                  theta, pad, kmax, M,
                                  include_gamma=not axis)
    return Theorem53Report(alpha, beta, gamma, theta, branch, conditions,
                           _combined_verdict(conditions), cutoff.a)


def conditions_for_pair(lam1: WindowSeq, lam2: WindowSeq, alpha: float,
                        beta: float, theta: float, kmax: int = 10,
                        pad: int = 2048, M: int = 1 << 20) -> dict:
    """Evaluate the Corollary-5.7 conditions for an explicitly supplied
    decomposition pair (used for the inverse decomposition of the
    spectral-localization check)."""
    n_top = 1 << kmax
    v1 = lam1.as_range(-pad, n_top + pad)
    v2 = lam2.as_range(-pad, n_top + pad)
    return _condition_scans(v1, v2, alpha, beta, theta, pad, kmax, M, True)


# ---------------------------------------------------------------------------
# Theorem 5.9 adjustment and the inverse decomposition

@dataclass(frozen=True)
class AdjustedDecomposition:
    lam3: WindowSeq
    lam4: WindowSeq
    inv_smooth: WindowSeq       # 1/lambda3
    inv_rest: WindowSeq         # -lambda4 / (lambda lambda3)
    delta: float
    min_lam3: float
    reconstruction_error: float


def theorem59_adjust(lam1: WindowSeq, lam2: WindowSeq,
                     delta: Optional[float] = None) -> AdjustedDecomposition:
    """Adjusted pair lambda3 = lambda1 + lambda2 chi_{Z2},
    lambda4 = lambda2 - lambda2 chi_{Z2} with Z2 = {|lambda1| < delta/2},
    plus the explicit inverse decomposition

        1/lambda = 1/lambda3 + (-lambda4)/(lambda lambda3).

    inf |lambda3| >= delta/2 holds by construction; the reconstruction
    identity (1/lambda3 + inv_rest) * lambda = 1 is evaluated per index.
    """
    lo = min(lam1.lo, lam2.lo)
    hi = max(lam1.hi, lam2.hi)
    v1 = lam1.as_range(lo, hi)
    v2 = lam2.as_range(lo, hi)
    lam = v1 + v2
    inf_lam = float(np.min(np.abs(lam)))
    if delta is None:
        delta = inf_lam
    if delta <= 0.0 or inf_lam <= 0.0:
        raise NotInvertibleError("inf |lambda_j| = 0 on the window")
    if inf_lam < delta - 1e-12:
        raise PreconditionError("stated delta exceeds the actual lower bound")
    z2 = np.abs(v1) < delta / 2.0
    v3 = np.where(z2, v1 + v2, v1)
    v4 = np.where(z2, 0.0, v2)
    min3 = float(np.min(np.abs(v3)))
    inv3 = 1.0 / v3
    rest = -v4 / (lam * v3)
    rec = np.max(np.abs((inv3 + rest) * lam - 1.0))
    return AdjustedDecomposition(WindowSeq(lo, hi, v3), WindowSeq(lo, hi, v4),
                                 WindowSeq(lo, hi, inv3), WindowSeq(lo, hi, rest),
                                 float(delta), min3, float(rec))
