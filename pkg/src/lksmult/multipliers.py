"""Multiplier membership machinery for weighted L^2 spaces.

The chain implemented here: a multiplier candidate lambda induces the
difference weights

    mu_k(lambda)^2 = sum_j c_{j,k} |lambda_j - lambda_k|^2,

membership is equivalent to the embedding F L^2(w) in l^2(mu^2), the
embedding constant is a generalized eigenvalue on finite windows, and
Theorem-4.3-type capacitary / energy conditions characterize it set by
set.  Everything operator-valued is represented by its compression to
span{z^n : |n| <= N}, computed by Gram conjugation; compressions are
monotone lower bounds for the true norms, and every report carries its
window size.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import polynomial as npoly
from scipy.signal import fftconvolve

from .seqcore import (NotInvertibleError, PreconditionError, ResolutionError,
                      WeightGrid, WindowSeq, gram)
from .potentials import WeightKernels, capacity, interval_capacity
from .weights import CoeffSeq

log = logging.getLogger(__name__)

SLOPE_BOUNDED = 0.02      # log2 ratio growth per octave; at or below: bounded
SLOPE_DIVERGING = 0.05    # at or above: diverging


def _pmap(fn, items):
    """Map honoring the LKSMULT_THREADS cap; order-stable."""
    try:
        workers = int(os.environ.get("LKSMULT_THREADS", "1"))
    except ValueError:
        workers = 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass(frozen=True)
class MultiplierSpec:
    """Multiplier family, realized lazily on any window.

    Families: constant(a); basis(n); rotation(zeta); power_rotation with
    lambda_j = e^{-ij theta} (|j|+1)^{-delta}; symbol with
    lambda_n = phi(zeta^n); table (finitely supported values).
    Realization commutes with window restriction by construction.
    """

    family: str
    a: complex = 0.0
    n: int = 0
    zeta_angle: float = 0.0
    delta: float = 0.0
    theta: float = 0.0
    phi: Optional[tuple] = None
    values: Optional[WindowSeq] = None

    @classmethod
    def constant(cls, a) -> "MultiplierSpec":
        return cls("constant", a=complex(a))

    @classmethod
    def basis(cls, n: int) -> "MultiplierSpec":
        return cls("basis", n=int(n))

    @classmethod
    def rotation(cls, zeta) -> "MultiplierSpec":
        angle = float(np.angle(zeta)) if np.iscomplexobj(np.asarray(zeta)) \
            else float(zeta)
        return cls("rotation", zeta_angle=angle)

    @classmethod
    def power_rotation(cls, delta: float, theta: float) -> "MultiplierSpec":
        return cls("power_rotation", delta=float(delta), theta=float(theta))

    @classmethod
    def affine_rotation(cls, a, b, theta: float) -> "MultiplierSpec":
        """lambda_j = a + b e^{i j theta} (constant plus rotation)."""
        return cls("affine_rotation", a=complex(a), n=0, zeta_angle=float(theta),
                   phi=(complex(b),))

    @classmethod
    def symbol(cls, phi_coeffs, zeta) -> "MultiplierSpec":
        angle = float(np.angle(zeta)) if np.iscomplexobj(np.asarray(zeta)) \
            else float(zeta)
        return cls("symbol", phi=tuple(complex(c) for c in phi_coeffs),
                   zeta_angle=angle)

    @classmethod
    def table(cls, values: WindowSeq) -> "MultiplierSpec":
        return cls("table", values=values)

    def realize(self, lo: int, hi: int) -> np.ndarray:
        j = np.arange(lo, hi + 1)
        if self.family == "constant":
            return np.full(j.size, self.a, dtype=complex)
        if self.family == "basis":
            out = np.zeros(j.size, dtype=complex)
            if lo <= self.n <= hi:
                out[self.n - lo] = 1.0
            return out
        if self.family == "rotation":
            return np.exp(1j * self.zeta_angle * j)
        if self.family == "power_rotation":
            return np.exp(-1j * self.theta * j) * (np.abs(j) + 1.0) ** -self.delta
        if self.family == "symbol":
            zn = np.exp(1j * self.zeta_angle * j)
            return npoly.polyval(zn, np.asarray(self.phi, dtype=complex))
        if self.family == "affine_rotation":
            return self.a + self.phi[0] * np.exp(1j * self.zeta_angle * j)
        if self.family == "table":
            return self.values.as_range(lo, hi)
        raise PreconditionError("unknown family %r" % (self.family,))

    def inf_modulus(self, lo: int, hi: int) -> float:
        """inf_j |lambda_j| over all of Z (exact for the closed families;
        window minimum for tables restricted to their support window)."""
        if self.family == "constant":
            return float(abs(self.a))
        if self.family == "rotation":
            return 1.0
        if self.family in ("basis", "table"):
            return 0.0   # zero extension off the support
        if self.family == "power_rotation":
            return 0.0 if self.delta > 0 else 1.0
        if self.family == "affine_rotation":
            return abs(abs(self.a) - abs(self.phi[0]))
        if self.family == "symbol":
            t = np.linspace(0.0, 2.0 * np.pi, 1 << 12, endpoint=False)
            return float(np.min(np.abs(npoly.polyval(np.exp(1j * t),
                                                     np.asarray(self.phi, dtype=complex)))))
        return float(np.min(np.abs(self.realize(lo, hi))))

    def conjugate(self) -> "MultiplierSpec":
        f = self.family
        if f == "constant":
            return MultiplierSpec.constant(np.conj(self.a))
        if f == "basis":
            return self
        if f == "rotation":
            return MultiplierSpec.rotation(-self.zeta_angle)
        if f == "power_rotation":
            return MultiplierSpec.power_rotation(self.delta, -self.theta)
        if f == "symbol":
            return MultiplierSpec.symbol(tuple(np.conj(c) for c in self.phi),
                                         -self.zeta_angle)
        if f == "affine_rotation":
            return MultiplierSpec.affine_rotation(np.conj(self.a),
                                                  np.conj(self.phi[0]),
                                                  -self.zeta_angle)
        return MultiplierSpec.table(self.values.conj())

    def reflected(self) -> "MultiplierSpec":
        f = self.family
        if f == "constant":
            return self
        if f == "basis":
            return MultiplierSpec.basis(-self.n)
        if f == "rotation":
            return MultiplierSpec.rotation(-self.zeta_angle)
        if f == "power_rotation":
            return MultiplierSpec.power_rotation(self.delta, -self.theta)
        if f == "symbol":
            return MultiplierSpec.symbol(self.phi, -self.zeta_angle)
        if f == "affine_rotation":
            return MultiplierSpec.affine_rotation(self.a, self.phi[0],
                                                  -self.zeta_angle)
        return MultiplierSpec.table(self.values.reflected())


@dataclass(frozen=True)
class NuWeight:
    """Nonnegative weight nu on a window of Z (here usually nu = mu^2)."""

    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.hi - self.lo + 1,):
            raise PreconditionError("values do not match window")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise PreconditionError("nu must be finite and nonnegative")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def mu(self) -> np.ndarray:
        return np.sqrt(self.values)

    def at(self, j) -> np.ndarray:
        j = np.asarray(j)
        out = np.zeros(j.shape, dtype=float)
        inside = (j >= self.lo) & (j <= self.hi)
        out[inside] = self.values[j[inside] - self.lo]
        return out if out.shape else out[()]


def _difference_weight_sq(lam_vals: np.ndarray, offsets_w: np.ndarray) -> np.ndarray:
    """mu^2 on the inner window from lambda on the padded window:
    mu_k^2 = sum_h s_h |lambda_{k+h} - lambda_k|^2 with s the symmetric
    offset weights (s_0 = 0), via three convolutions."""
    P = (offsets_w.size - 1) // 2
    lam_abs2 = np.abs(lam_vals) ** 2
    S = float(offsets_w.sum())
    conv_abs2 = fftconvolve(lam_abs2, offsets_w, mode="valid")
    conv_lam = fftconvolve(lam_vals, offsets_w.astype(complex), mode="valid")
    core = lam_vals[P:-P] if P else lam_vals
    out = conv_abs2 + np.abs(core) ** 2 * S - 2.0 * (np.conj(core) * conv_lam).real
    return np.maximum(out, 0.0)   # clamp roundoff cancellation


def _offset_weights_lks(c: CoeffSeq, modulus: Optional[int]) -> np.ndarray:
    s = np.zeros(2 * c.K + 1)
    k = np.arange(1, c.K + 1)
    s[c.K + k] = 0.5 * c.c
    s[c.K - k] = 0.5 * c.c
    if modulus:
        mask = (np.arange(-c.K, c.K + 1) % modulus) == 0
        s = np.where(mask, s, 0.0)
    return s


def _offset_weights_riesz(alpha: float, P: int, modulus: Optional[int]) -> np.ndarray:
    h = np.arange(-P, P + 1)
    s = (np.abs(h) + 1.0) ** -(1.0 + alpha)
    s[P] = 0.0
    if modulus:
        s = np.where(h % modulus == 0, s, 0.0)
    return s


def mu_weights(lam: MultiplierSpec, c: CoeffSeq, lo: int, hi: int,
               modulus: Optional[int] = None) -> NuWeight:
    """mu_k^2 = sum_{j != k} (c_{|j-k|}/2) |lambda_j - lambda_k|^2 on
    [lo, hi] (offsets restricted to multiples of `modulus` when set).

    lambda is realized on the window padded by the truncation length K;
    a truncation-tail estimate is attached for tagged sequences.
    """
    vals = lam.realize(lo - c.K, hi + c.K)
    s = _offset_weights_lks(c, modulus)
    out = _difference_weight_sq(vals, s)
    return NuWeight(lo, hi, out)


def mu_tail_estimate(lam: MultiplierSpec, c: CoeffSeq, lo: int, hi: int) -> Optional[float]:
    """Upper bound on the mu^2 mass dropped with the coefficient tail
    beyond K (tagged sequences only): (2 sup|lambda|)^2 * sum_{k>K} c_k."""
    if c.closed_form is None:
        return None
    x = np.exp(np.linspace(np.log(float(c.K)), np.log(1e12), 2048))
    cv = np.maximum(c.closed_form(x), 0.0)
    tail = float(np.trapezoid(cv, x))
    sup = float(np.max(np.abs(lam.realize(lo - c.K, hi + c.K))))
    return (2.0 * sup) ** 2 * tail


def mu_riesz_sq(values: np.ndarray, alpha: float, pad: int,
                modulus: Optional[int] = None) -> np.ndarray:
    """Plain fractional difference weight (no 1/2), truncated at |h| <= pad:
    mu_j^2 = sum_h |v_{j+h} - v_j|^2 / (|h|+1)^{1+alpha}; the input array
    must carry `pad` extra entries on each side."""
    s = _offset_weights_riesz(alpha, pad, modulus)
    return _difference_weight_sq(np.asarray(values, dtype=complex), s)


# ---------------------------------------------------------------------------
# embedding constants

def embedding_constant(nu: NuWeight, c: CoeffSeq, N: int) -> float:
    """C_N^2 = largest generalized eigenvalue of diag(nu) u = sigma Q u,
    Q = Gram of the weight on [-N, N] (zero-extended vectors).

    Monotone nondecreasing in N and a lower bound for the true embedding
    constant; preconditions need 1/w integrable for Q to stay well
    conditioned, with the documented jitter fallback otherwise.
    """
    Q = gram(c.exact_table(max(2 * N, c.K)), N).matrix.real
    ev = np.linalg.eigvalsh(Q)
    if ev[0] <= 0 or ev[-1] / max(ev[0], 1e-300) > 1e14:
        jitter = 1e-12 * np.trace(Q) / Q.shape[0]
        log.info("embedding_constant: jitter %.3g applied to Gram", jitter)
        Q = Q + jitter * np.eye(Q.shape[0])
    dvals = nu.at(np.arange(-N, N + 1))
    sig = sla.eigh(np.diag(dvals), Q, eigvals_only=True)
    return float(sig[-1])


def embedding_constant_green(nu: NuWeight, kernels: WeightKernels) -> float:
    """Exact embedding constant for nu supported on its window F:
    largest eigenvalue of sqrt(nu) G_F sqrt(nu).

    Equivalent to maximizing over minimal-energy extensions of window
    data (the Dirichlet form restricted to potentials of measures on F),
    so Theorem 4.3's sandwich C_1 <= C <= 4 C_1 holds for it exactly.
    """
    idx = nu.indices()
    G = kernels.g.at(idx[:, None] - idx[None, :])
    sq = np.sqrt(nu.values)
    return float(np.linalg.eigvalsh(sq[:, None] * G * sq[None, :])[-1])


# ---------------------------------------------------------------------------
# capacitary / energy constants

def _subsets(indices: np.ndarray):
    import itertools
    for r in range(1, indices.size + 1):
        yield from itertools.combinations(indices.tolist(), r)


def capacitary_constant(nu: NuWeight, kernels: WeightKernels,
                        strategy: str = "all_subsets",
                        random_count: int = 200, seed: int = 0):
    """C_1 = max over enumerated J of (sum_J nu) / Cap(J), with witness.

    Strategies: `all_subsets` (window <= 14), `intervals` (all intervals
    inside the window; justified for decreasing quasi-metric kernels),
    `random` (random subsets).
    """
    idx = nu.indices()
    if strategy == "all_subsets":
        if idx.size > 14:
            raise PreconditionError("all_subsets enumeration limited to window <= 14")
        sets = list(_subsets(idx))
    elif strategy == "intervals":
        sets = [tuple(range(a, b + 1)) for a in idx for b in range(a, idx[-1] + 1)]
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        sets = []
        for _ in range(random_count):
            r = int(rng.integers(1, min(idx.size, 8) + 1))
            sets.append(tuple(sorted(rng.choice(idx, size=r, replace=False).tolist())))
    else:
        raise PreconditionError("unknown strategy %r" % (strategy,))

    def ratio(J):
        Ja = np.asarray(J, dtype=int)
        mass = float(np.sum(nu.at(Ja)))
        if mass == 0.0:
            return 0.0, J
        return mass / capacity(Ja, kernels, xy_window=1).value, J

    best, witness = 0.0, None
    for val, J in _pmap(ratio, sets):
        if val > best:
            best, witness = val, J
    return best, witness


def energy_constant(nu: NuWeight, kernels: WeightKernels,
                    strategy: str = "all_subsets",
                    random_count: int = 200, seed: int = 0):
    """C_E = max over enumerated J of
    (sum_{j,m in J} g_{m-j} nu_j nu_m) / (sum_J nu), with witness."""
    idx = nu.indices()
    g = kernels.g
    if strategy == "all_subsets":
        if idx.size > 14:
            raise PreconditionError("all_subsets enumeration limited to window <= 14")
        sets = list(_subsets(idx))
    elif strategy == "intervals":
        sets = [tuple(range(a, b + 1)) for a in idx for b in range(a, idx[-1] + 1)]
    elif strategy == "random":
        rng = np.random.default_rng(seed)
        sets = [tuple(sorted(rng.choice(idx, size=int(rng.integers(1, min(idx.size, 8) + 1)),
                                        replace=False).tolist()))
                for _ in range(random_count)]
    else:
        raise PreconditionError("unknown strategy %r" % (strategy,))

    best, witness = 0.0, None
    for J in sets:
        Ja = np.asarray(J, dtype=int)
        nn = nu.at(Ja)
        mass = float(nn.sum())
        if mass == 0.0:
            continue
        q = float(nn @ g.at(Ja[:, None] - Ja[None, :]) @ nn) / mass
        if q > best:
            best, witness = q, J
    return best, witness


@dataclass(frozen=True)
class QuasiMetricReport:
    is_quasimetric: bool
    kappa_best: Optional[float]
    interval_constant: Optional[float] = None
    subset_constant: Optional[float] = None
    ratio: Optional[float] = None


def quasimetric_report(kernels: WeightKernels, nu: Optional[NuWeight] = None,
                       scan_window: int = 256) -> QuasiMetricReport:
    """Best constant in 1/g_{j+m} <= kappa (1/g_j + 1/g_m) over the scan
    window, plus (when nu is given) the interval-restricted vs all-subset
    energy constants and their ratio >= 1."""
    g = kernels.g
    N = min(scan_window, g.N // 2)
    idx = np.arange(-N, N + 1)
    vals = g.at(idx)
    if np.any(vals == 0.0):
        return QuasiMetricReport(False, None)
    d = 1.0 / vals
    best = 0.0
    for j in range(-N, N + 1):
        m = np.arange(max(-N, -N - j), min(N, N - j) + 1)
        q = d[(j + m) + N] / (d[j + N] + d[m + N])
        best = max(best, float(q.max()))
    if nu is None:
        return QuasiMetricReport(True, best)
    sub, _ = energy_constant(nu, kernels, "all_subsets")
    iv, _ = energy_constant(nu, kernels, "intervals")
    return QuasiMetricReport(True, best, iv, sub, sub / iv if iv > 0 else None)


# ---------------------------------------------------------------------------
# compression norms and SLP bounds

def _gram_sqrt(Q: np.ndarray):
    ev, U = np.linalg.eigh(Q)
    if ev[0] <= 0.0:
        raise ResolutionError("Gram matrix not positive definite (min eig %.3g)" % ev[0])
    return (U * np.sqrt(ev)) @ U.conj().T, (U / np.sqrt(ev)) @ U.conj().T


def multiplier_norm(lam: MultiplierSpec, wtable: WindowSeq, N: int) -> float:
    """Compression norm ||T_lambda||_N = ||W^{1/2} Lambda W^{-1/2}||_2 with
    W the weight Gram on [-N, N]; equals the norm of T_lambda restricted
    to span{z^n : |n| <= N}, hence monotone nondecreasing in N and a
    lower bound for the multiplier norm."""
    W = gram(wtable, N).matrix
    Wh, Wmh = _gram_sqrt(W)
    lamv = lam.realize(-N, N)
    A = Wh @ (lamv[:, None] * Wmh)
    return float(np.linalg.svd(A, compute_uv=False)[0])


@dataclass(frozen=True)
class SlpReport:
    delta: float
    pointwise_ok: bool
    pointwise_margin: float
    norm_lambda: float
    norm_inverse: float
    bound_lemma: float
    bound_remark: float
    window: int
    caveat: str = ("compression norms are lower bounds of the operator "
                   "norms; the displayed bounds use them in place of "
                   "||T_lambda||")


def slp_bounds(lam: MultiplierSpec, c: CoeffSeq, wtable: WindowSeq,
               N: int) -> SlpReport:
    """Pointwise SLP inequality and the two inverse-norm bounds.

    Checks mu_k(1/lambda) <= mu_k(lambda)/delta^2 + 1e-12 at every window
    index (the exact inequality from the proof of the embedding lemma),
    then evaluates both inverse bounds
        delta^{-2} (||T_lambda|| + sup|lambda|) + delta^{-1}
        2 delta^{-1} sup|lambda| + delta^{-2} ||T_lambda||
    with the window compression in place of the true norm.
    """
    pad = c.K
    vals = lam.realize(-N - pad, N + pad)
    delta = min(float(np.min(np.abs(vals))), lam.inf_modulus(-N - pad, N + pad))
    if delta <= 0.0:
        raise NotInvertibleError("inf |lambda_j| = 0")
    sup = float(np.max(np.abs(vals)))
    inv_spec = MultiplierSpec.table(WindowSeq(-N - pad, N + pad, 1.0 / vals))
    mu2 = mu_weights(lam, c, -N, N).values
    mu2_inv = mu_weights(inv_spec, c, -N, N).values
    margin = float(np.max(np.sqrt(mu2_inv) - np.sqrt(mu2) / delta ** 2))
    ok = margin <= 1e-12
    nl = multiplier_norm(lam, wtable, N)
    ninv = multiplier_norm(inv_spec, wtable, N)
    b1 = delta ** -2 * (nl + sup) + 1.0 / delta
    b2 = 2.0 * sup / delta + nl / delta ** 2
    return SlpReport(delta, ok, margin, nl, ninv, b1, b2, N)


# ---------------------------------------------------------------------------
# interval ratio scans and trend classification

@dataclass(frozen=True)
class RatioScan:
    label: str
    ks: np.ndarray            # J = [0, 2^k]
    ratios: np.ndarray
    slope: float              # log2 growth per octave over the second half
    classification: str       # bounded | diverging | indeterminate

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    @property
    def growth(self) -> float:
        lo = max(float(self.ratios[0]), 1e-300)
        return float(self.ratios[-1]) / lo


def classify_trend(label: str, ks, ratios) -> RatioScan:
    r = np.asarray(ratios, dtype=float)
    ks = np.asarray(ks)
    if np.all(r <= 1e-12):
        return RatioScan(label, ks, r, float("-inf"), "bounded")
    half = len(r) // 2
    a = max(float(r[half]), 1e-300)
    b = max(float(r[-1]), 1e-300)
    slope = np.log2(b / a) / max(len(r) - 1 - half, 1)
    if slope >= SLOPE_DIVERGING:
        cls = "diverging"
    elif slope <= SLOPE_BOUNDED:
        cls = "bounded"
    else:
        cls = "indeterminate"
    return RatioScan(label, ks, r, float(slope), cls)


def interval_ratio_scan(label: str, numerator_terms: np.ndarray,
                        kernels: WeightKernels, kmax: int) -> RatioScan:
    """Ratios sum_{j in [0, 2^k]} a_j / Cap([0, 2^k]) for k = 0..kmax;
    `numerator_terms` holds a_j for j = 0..2^kmax."""
    ks = np.arange(0, kmax + 1)
    ratios = []
    csum = np.cumsum(numerator_terms)
    for k in ks:
        n = 1 << k
        ratios.append(csum[n] / interval_capacity(0, n, kernels))
    return classify_trend(label, ks, np.array(ratios))


# ---------------------------------------------------------------------------
# pair multipliers (D_{beta/2} -> D_{alpha/2})

@dataclass(frozen=True)
class PairReport:
    alpha: float
    beta: float
    sup_lambda: float
    mu_scan: RatioScan
    lambda_scan: Optional[RatioScan]
    verdict: str


def pair_multiplier_check(lam: MultiplierSpec, alpha: float, beta: float,
                          kmax: int = 10, M: int = 1 << 20,
                          pad: int = 2048) -> PairReport:
    """Theorem-4.11-type verdict for lambda in Mult(D_{beta/2} -> D_{alpha/2}).

    Case beta <= alpha: interval capacitary test of mu^alpha(lambda)^2
    against Cap_beta.  Case alpha < beta: additionally |lambda|^2 against
    Cap_{beta-alpha}.  Constants, witnesses and growth trends are
    reported; verdicts assert boundedness-vs-growth only.
    """
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise PreconditionError("orders must lie in (0, 1)")
    from .potentials import riesz_kernels
    n_top = 1 << kmax
    vals = lam.realize(-pad, n_top + pad)
    sup = float(np.max(np.abs(vals)))
    mu2 = mu_riesz_sq(vals, alpha, pad)
    kb = riesz_kernels(beta, M)
    mu_scan = interval_ratio_scan("mu^%g(lambda)^2 vs Cap_%g" % (alpha, beta),
                                  mu2, kb, kmax)
    lam_scan = None
    if alpha < beta:
        kg = riesz_kernels(beta - alpha, M)
        lam_scan = interval_ratio_scan("|lambda|^2 vs Cap_%g" % (beta - alpha),
                                       np.abs(vals[pad:pad + n_top + 1]) ** 2,
                                       kg, kmax)
    states = [mu_scan.classification] + ([lam_scan.classification] if lam_scan else [])
    if all(s == "bounded" for s in states):
        verdict = "pass"
    elif any(s == "diverging" for s in states):
        verdict = "fail"
    else:
        verdict = "indeterminate"
    return PairReport(alpha, beta, sup, mu_scan, lam_scan, verdict)


def commutator_inequality_ratio(x: WindowSeq, alpha: float, beta: float,
                                pad: int = 256):
    """||mu^{beta-alpha}[mu^alpha(x)]||_2 / ||mu^beta(x)||_2 by direct
    summation on padded windows (0/0 -> 0)."""
    if not (0.0 < alpha < beta < 1.0):
        raise PreconditionError("need 0 < alpha < beta < 1")
    lo, hi = x.lo - 2 * pad, x.hi + 2 * pad
    xv = x.as_range(lo - pad, hi + pad)
    mu_a = np.sqrt(mu_riesz_sq(xv, alpha, pad))          # on [lo, hi]
    inner = np.sqrt(mu_riesz_sq(mu_a, beta - alpha, pad))  # on [lo+pad, hi-pad]
    num = float(np.sqrt(np.sum(inner ** 2)))
    mu_b = np.sqrt(mu_riesz_sq(xv, beta, pad))
    den = float(np.sqrt(np.sum(mu_b ** 2)))
    if den == 0.0:
        return 0.0, num, den
    return num / den, num, den


# ---------------------------------------------------------------------------
# duality transforms

def duality_transforms(lam: Optional[MultiplierSpec] = None,
                       grid: Optional[WeightGrid] = None) -> dict:
    """The four duality transforms of Sec. 3.12-type identities:
    conjugate and reflected multipliers, reciprocal and reflected
    weights.  Norm identities are checked by the invariant tests, not
    here."""
    out = {}
    if lam is not None:
        out["conjugate"] = lam.conjugate()
        out["reflection"] = lam.reflected()
    if grid is not None:
        if np.any(grid.samples <= 0.0):
            raise PreconditionError("weight reciprocal needs strict positivity")
        out["weight_reciprocal"] = WeightGrid(1.0 / grid.samples)
        out["weight_reflection"] = WeightGrid(grid.samples[::-1])
    return out


@dataclass(frozen=True)
class MultiplierReport:
    """Summary bundle produced by the CLI `mult` command."""

    family: str
    window: int
    mu: NuWeight
    embedding_constant: float
    capacitary_constant: float
    capacitary_witness: tuple
    energy_constant: float
    energy_witness: tuple
    quasimetric: QuasiMetricReport
    norms: dict                  # N -> compression norm
    slp: Optional[SlpReport]
    verdict: str
