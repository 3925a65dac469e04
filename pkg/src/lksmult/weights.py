"""LKS weights w(e^{it}) = 4 sum_k c_k sin^2(kt/2) and their analytic criteria.

A weight is specified by a nonnegative coefficient sequence (c_k)_{k>=1}
with 0 < sum c_k < infinity.  The package stores a finite truncation
c_1..c_K plus an optional closed-form tag; the tag is what licenses any
statement about the tail (integrability of 1/w, minimality), since no
finite prefix decides convergence of a series.  An untagged table is
read literally as an exactly finitely supported sequence.

The exact Fourier table of the truncated weight is
    what(0) = 2 sum c_k,   what(+-k) = -c_k  (1 <= k <= K),  0 beyond,
which is also the ground truth for the quadrature round-trip tests.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .seqcore import (HypothesisViolation, PreconditionError, WeightGrid,
                      WindowSeq, analyze, grid_nodes, synthesize)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosedForm:
    """Closed-form evaluator for the coefficient function c(x), x >= 1."""

    kind: str  # "power" | "power_log" | "custom"
    alpha: Optional[float] = None
    beta: Optional[float] = None
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return (x + 1.0) ** -(1.0 + self.alpha)
        if self.kind == "power_log":
            return x ** -2.0 * np.log(np.e * x) ** self.beta
        return np.asarray(self.fn(x), dtype=float)

    def describe(self) -> str:
        if self.kind == "power":
            return "power(alpha=%g)" % self.alpha
        if self.kind == "power_log":
            return "power_log(beta=%g)" % self.beta
        return "custom"


@dataclass(frozen=True)
class CoeffSeq:
    """Truncated coefficient sequence; c[k-1] is c_k for k = 1..K."""

    c: np.ndarray
    closed_form: Optional[ClosedForm] = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise PreconditionError("coefficient array must be 1-d and nonempty")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise PreconditionError("coefficients must be finite and nonnegative")
        if not np.any(c > 0):
            raise PreconditionError("at least one c_k must be positive")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def power(cls, alpha: float, K: int) -> "CoeffSeq":
        """Riesz-type coefficients c_k = (k+1)^{-(1+alpha)}."""
        k = np.arange(1, K + 1, dtype=float)
        return cls((k + 1.0) ** -(1.0 + alpha), ClosedForm("power", alpha=alpha))

    @classmethod
    def power_log(cls, beta: float, K: int) -> "CoeffSeq":
        """c_k = k^{-2} (log e k)^beta (beta = 0 gives the 1/k^2 family)."""
        k = np.arange(1, K + 1, dtype=float)
        return cls(k ** -2.0 * np.log(np.e * k) ** beta,
                   ClosedForm("power_log", beta=beta))

    @classmethod
    def from_function(cls, fn: Callable, K: int) -> "CoeffSeq":
        k = np.arange(1, K + 1, dtype=float)
        return cls(np.asarray(fn(k), dtype=float), ClosedForm("custom", fn=fn))

    @classmethod
    def table(cls, values) -> "CoeffSeq":
        """Exactly finitely supported coefficients; no tail is implied."""
        return cls(np.asarray(values, dtype=float))

    @property
    def K(self) -> int:
        return self.c.size

    def coeff(self, k) -> np.ndarray:
        """c_k with zero extension beyond the truncation."""
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=float)
        inside = (k >= 1) & (k <= self.K)
        out[inside] = self.c[k[inside] - 1]
        return out if out.shape else out[()]

    def support(self) -> np.ndarray:
        return np.nonzero(self.c > 0)[0] + 1

    def total(self) -> float:
        return float(self.c.sum())

    def exact_table(self, N: Optional[int] = None) -> WindowSeq:
        """Exact Fourier table of the truncated weight on [-N, N]."""
        if N is None:
            N = self.K
        v = np.zeros(2 * N + 1, dtype=complex)
        v[N] = 2.0 * self.c.sum()
        kk = np.arange(1, min(N, self.K) + 1)
        v[N + kk] = -self.c[kk - 1]
        v[N - kk] = -self.c[kk - 1]
        return WindowSeq(-N, N, v)

    def reduced(self) -> "CoeffSeq":
        """Coefficients of w_1 with w(e^{it}) = w_1(e^{i d t}), d = gcd of
        the support (identity when d = 1)."""
        d = zero_set(self).d
        if d == 1:
            return self
        sub = self.c[d - 1::d]
        form = self.closed_form
        red_form = None
        if form is not None:
            red_form = ClosedForm("custom", fn=lambda x, f=form, d=d: f(d * x))
        return CoeffSeq(sub, red_form)


@dataclass(frozen=True)
class ZeroSet:
    d: int
    fractions: tuple  # angles as exact fractions of a full turn

    def angles(self) -> np.ndarray:
        return np.array([2.0 * np.pi * float(f) for f in self.fractions])


def lks_weight(c: CoeffSeq, M: int = 1 << 20):
    """Sample the truncated LKS weight on the midpoint grid of size M.

    Returns (grid, table) where table is the exact coefficient table
    {what(0) = 2 sum c_k, what(+-k) = -c_k}.  The grid values equal the
    partial sums of the defining series to FFT roundoff.
    """
    if c.K >= M // 2:
        raise PreconditionError("truncation K = %d needs grid M > 2K" % c.K)
    table = c.exact_table()
    grid = synthesize(table, M)
    return grid, table


def zero_set(c: CoeffSeq) -> ZeroSet:
    """Zero set of the weight: the d-th roots of unity, d = gcd of the
    support of (c_k)."""
    d = 0
    for k in c.support():
        d = math.gcd(d, int(k))
        if d == 1:
            break
    return ZeroSet(d, tuple(Fraction(j, d) for j in range(d)))


# ---------------------------------------------------------------------------
# series classification (Lemma 3.6 / Comments 2.5(3) machinery)

_X_FAR = 1e15          # far end of the log-space tail scan
_P_MARGIN = 0.05       # margin for the power-scale exponent test
_B_MARGIN = 0.15       # margin for the logarithmic-scale exponent test

CONVERGENT, DIVERGENT, UNDECIDED = "convergent", "divergent", "undecided"


def _log_grid(lo: float, hi: float, n: int = 4096) -> np.ndarray:
    return np.exp(np.linspace(np.log(lo), np.log(hi), n))


def _tail_profiles(c: CoeffSeq):
    """B(x) = sum_{k<=x} c_k k^2 and T(x) = sum_{k>x} c_k, extended past the
    truncation by log-grid quadrature of the closed form."""
    k = np.arange(1, c.K + 1, dtype=float)
    Bex = np.cumsum(c.c * k * k)
    Tex = c.total() - np.cumsum(c.c)

    if c.closed_form is None:
        def B(x):
            x = np.asarray(x, dtype=float)
            idx = np.clip(np.floor(x).astype(int), 1, c.K)
            return Bex[idx - 1]

        def T(x):
            x = np.asarray(x, dtype=float)
            idx = np.clip(np.floor(x).astype(int), 1, c.K)
            out = Tex[idx - 1].copy()
            out[x >= c.K] = 0.0
            return out

        return B, T, float(c.K)

    form = c.closed_form
    x0 = float(c.K)
    u = np.log(_log_grid(x0, _X_FAR))
    xs = np.exp(u)
    cv = np.maximum(form(xs), 0.0)
    du = np.diff(u)
    # cumulative trapezoid of c(t) t^2 dt and c(t) dt on the log grid
    f3 = cv * xs ** 3
    f1 = cv * xs
    B_tail = np.concatenate([[0.0], np.cumsum(0.5 * (f3[1:] + f3[:-1]) * du)])
    I1 = np.concatenate([[0.0], np.cumsum(0.5 * (f1[1:] + f1[:-1]) * du)])
    # remainder of the integral of c beyond the far end by local power fit
    with np.errstate(divide="ignore"):
        slope = (np.log(cv[-1]) - np.log(cv[-8])) / (u[-1] - u[-8])
    rem = 0.0
    if np.isfinite(slope) and slope < -1.0 - 1e-9:
        rem = cv[-1] * xs[-1] / (-slope - 1.0)
    T_far = (I1[-1] - I1) + rem

    def B(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=float)
        low = x < x0
        if np.any(low):
            idx = np.clip(np.floor(x[low]).astype(int), 1, c.K)
            out[low] = Bex[idx - 1]
        if np.any(~low):
            out[~low] = Bex[-1] + np.interp(np.log(x[~low]), u, B_tail)
        return out

    def T(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape, dtype=float)
        low = x < x0
        if np.any(low):
            idx = np.clip(np.floor(x[low]).astype(int), 1, c.K)
            out[low] = Tex[idx - 1]
        if np.any(~low):
            out[~low] = np.interp(np.log(x[~low]), u, T_far)
        return out

    return B, T, x0


def _classify_tail(denom: Callable[[np.ndarray], np.ndarray],
                   x_lo: float = 1e8, x_hi: float = _X_FAR) -> str:
    """Convergence class of sum 1/denom(n) from the asymptotic scale of denom.

    Two-level scale test: the power exponent p = dlog denom / dlog x
    decides when it is safely away from 1; otherwise the logarithmic
    exponent (Bertrand scale) decides; otherwise undecided.
    """
    x = _log_grid(x_lo, x_hi, 512)
    d = denom(x)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        return UNDECIDED
    lx, ld = np.log(x), np.log(d)
    p = np.diff(ld) / np.diff(lx)
    p_med = float(np.median(p[-128:]))
    if p_med >= 1.0 + _P_MARGIN and float(np.min(p[-128:])) > 1.0:
        return CONVERGENT
    if p_med <= 1.0 - _P_MARGIN:
        return DIVERGENT
    beta = (ld - lx) / np.log(lx)
    b_med = float(np.median(beta[-128:]))
    if b_med >= 1.0 + _B_MARGIN:
        return CONVERGENT
    if b_med <= 1.0 - _B_MARGIN:
        return DIVERGENT
    return UNDECIDED


def _classify_table(denom_vals: np.ndarray) -> str:
    """Class from finitely many terms only (untagged tables): divergence is
    sound when the denominators stop growing; convergence is never
    claimed from a prefix."""
    d = denom_vals
    n = d.size
    if n < 16:
        return UNDECIDED
    tail = d[3 * n // 4:]
    if float(tail.max()) <= float(tail.min()) * (1.0 + 1e-9):
        return DIVERGENT  # constant denominators: terms have a positive floor
    lx = np.log(np.arange(1, n + 1, dtype=float))
    p = np.diff(np.log(d[n // 2:])) / np.diff(lx[n // 2:])
    if float(np.median(p)) <= 1.0 - 0.1:
        return DIVERGENT
    return UNDECIDED


def _two_series(c: CoeffSeq, n_max: int):
    """Partial sums and convergence classes of the Lemma 3.6 pair

        lower: sum_n 1 / (B_n + n^2 T_n)   (the smaller term-wise series)
        upper: sum_n 1 / B_n

    with B_n = sum_{k<=n} c_k k^2 and T_n = sum_{k>n} c_k.
    """
    B, T, x0 = _tail_profiles(c)
    n = np.arange(1, n_max + 1, dtype=float)
    dlow = B(n) + n * n * T(n)
    dup = B(n)
    with np.errstate(divide="ignore"):
        lower = float(np.sum(np.where(dlow > 0, 1.0 / dlow, np.inf)))
        upper = float(np.sum(np.where(dup > 0, 1.0 / dup, np.inf)))
    if c.closed_form is not None:
        cls_low = _classify_tail(lambda x: B(x) + x * x * T(x))
        cls_up = _classify_tail(lambda x: B(x))
    else:
        nn = np.arange(1, min(n_max, max(4 * c.K, 64)) + 1, dtype=float)
        cls_low = _classify_table(B(nn) + nn * nn * T(nn))
        cls_up = _classify_table(B(nn))
    return lower, upper, cls_low, cls_up


@dataclass(frozen=True)
class IntegrabilityReport:
    verdict: str                       # integrable | not_integrable | inconclusive
    lower_bound: float                 # partial sum of the lower Lemma 3.6 series
    upper_bound: float                 # partial sum of the upper Lemma 3.6 series
    criterion_used: str
    lower_class: str
    upper_class: str
    reduction_d: int


def reciprocal_integrable(c: CoeffSeq, n_max: int = 4096) -> IntegrabilityReport:
    """Three-valued verdict on 1/w in L^1(T) from the Lemma 3.6 series.

    The criterion is applied to the reduced weight w_1 (w(e^{it}) =
    w_1(e^{idt}), d = gcd of the support), since the integral of 1/w is
    unchanged by that substitution.  The verdict is `integrable` when
    the upper series converges, `not_integrable` when the lower series
    diverges, and `inconclusive` otherwise; tables without a closed-form
    tag are read as exactly finitely supported.
    """
    d = zero_set(c).d
    red = c.reduced()
    lower, upper, cls_low, cls_up = _two_series(red, n_max)
    if cls_up == CONVERGENT:
        verdict = "integrable"
    elif cls_low == DIVERGENT:
        verdict = "not_integrable"
    else:
        verdict = "inconclusive"
    return IntegrabilityReport(verdict, lower, upper, "lemma36",
                               cls_low, cls_up, d)


@dataclass(frozen=True)
class RegularCriterionReport:
    verdict: str
    criterion_used: str            # lemma38 | remark_k3
    hypothesis_ok: bool
    series_class: str
    series_partial: float


def _eventually_monotone(vals: np.ndarray, xs: np.ndarray, decreasing: bool,
                         from_below: float) -> bool:
    """True when vals is monotone (with 1e-12 relative slack) on [x*, end]
    for some x* <= from_below."""
    ratio = vals[1:] / np.maximum(vals[:-1], 1e-300)
    ok = ratio <= 1.0 + 1e-12 if decreasing else ratio >= 1.0 - 1e-12
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return True
    return bool(xs[bad[-1] + 1] <= from_below)


def regular_criterion(c: CoeffSeq, gamma: float, n_max: int = 4096) -> RegularCriterionReport:
    """Integrability of 1/w for regular closed-form coefficients.

    Uses the single-series criterion sum_n 1/(sum_{k<=n} c_k k^2) under
    the hypothesis that x -> x^gamma c(x) eventually decreases for some
    1 < gamma < 3 (checked numerically on [10, 1e6]); falls back to the
    sum_k 1/(k^3 c_k) form when c(t) t^2 increases to infinity and c is
    numerically submultiplicative.  Refuses with HypothesisViolation
    when neither hypothesis can be verified.
    """
    if c.closed_form is None:
        raise PreconditionError("regular_criterion needs a closed-form tag")
    form = c.closed_form
    xs = _log_grid(10.0, 1e6, 600)
    cv = np.maximum(form(xs), 0.0)
    if np.any(cv <= 0):
        raise HypothesisViolation("c(x) must be positive on [10, 1e6]")

    lemma38_ok = (1.0 < gamma < 3.0 and
                  _eventually_monotone(xs ** gamma * cv, xs, True, 1e3))
    ct2 = xs * xs * cv
    remark_mono = _eventually_monotone(ct2, xs, False, 1e3)
    remark_grow = bool(ct2[-1] >= 1.5 * ct2[len(xs) // 2])
    # submultiplicativity c(xy) <= A c(x) c(y): the empirical constant must
    # not blow up when the range grows
    def _subm_const(hi):
        s = _log_grid(1.0, hi, 24)
        X, Y = np.meshgrid(s, s)
        return float(np.max(form(X * Y) / (form(X) * form(Y))))
    A1, A2 = _subm_const(1e2), _subm_const(1e5)
    remark_ok = remark_mono and remark_grow and A2 <= 4.0 * A1

    B, T, _ = _tail_profiles(c)
    n = np.arange(1, n_max + 1, dtype=float)
    if lemma38_ok:
        cls = _classify_tail(lambda x: B(x))
        partial = float(np.sum(1.0 / np.maximum(B(n), 1e-300)))
        used = "lemma38"
    elif remark_ok:
        k3c = lambda x: x ** 3 * np.maximum(form(x), 1e-300)
        cls = _classify_tail(k3c)
        partial = float(np.sum(1.0 / k3c(n)))
        used = "remark_k3"
    else:
        raise HypothesisViolation(
            "neither the Lemma 3.8 monotonicity (gamma=%g) nor the Remark "
            "hypotheses hold numerically" % gamma)
    verdict = {CONVERGENT: "integrable", DIVERGENT: "not_integrable",
               UNDECIDED: "inconclusive"}[cls]
    return RegularCriterionReport(verdict, used, True, cls, partial)


# ---------------------------------------------------------------------------
# Muckenhoupt (A2) on dyadic arcs

@dataclass(frozen=True)
class A2Report:
    sup_product: float
    per_level: np.ndarray   # per_level[l] = max over arcs of length M/2^l
    max_level: int


def a2_report(grid: WeightGrid, max_level: int = 18) -> A2Report:
    """Supremum of (avg_I w)(avg_I 1/w) over dyadic-length arcs at every
    offset, levels 0..max_level (arc length M / 2^level samples).

    Computed with rolling window sums on the sample grid; the deepest
    levels are quadrature-limited near zeros of w (arcs of a few
    samples), which caps the growth visible for non-(A2) weights.
    """
    w = grid.samples
    M = grid.M
    if np.any(w <= 0.0):
        raise PreconditionError("A2 product needs strictly positive samples")
    max_level = min(max_level, int(np.log2(M)) - 2)
    iw = 1.0 / w
    out = np.empty(max_level + 1)
    for lev in range(max_level + 1):
        L = M >> lev
        cw = np.concatenate([w, w[:L]]).cumsum()
        ci = np.concatenate([iw, iw[:L]]).cumsum()
        sw = cw[L - 1: M + L - 1].copy()
        sw[1:] -= cw[:M - 1]
        si = ci[L - 1: M + L - 1].copy()
        si[1:] -= ci[:M - 1]
        out[lev] = float(np.max(sw * si)) / (L * L)
    return A2Report(float(out.max()), out, max_level)


def schoenberg_pd_check(grid: WeightGrid, eps_list, n_coeffs: int = 2048) -> dict:
    """Minimum Fourier coefficient of exp(-eps * w) per eps.

    Schoenberg's characterization makes exp(-eps w) positive definite
    for every eps > 0 exactly when w is LKS; a clearly negative minimum
    certifies a non-LKS weight.
    """
    n_coeffs = min(n_coeffs, grid.M // 4 - 1)
    out = {}
    for eps in eps_list:
        e = WeightGrid(np.exp(-float(eps) * grid.samples))
        tab = analyze(e, n_coeffs)
        out[float(eps)] = {
            "min_coeff": float(np.min(tab.values.real)),
            "coeff0": float(tab.at(0).real),
        }
    return out


# ---------------------------------------------------------------------------
# profile-driven synthesis (w ~ t^2 u(1/|t|))

def synthesize_from_profile(u: Callable, alpha: float, K: int,
                            du: Optional[Callable] = None) -> CoeffSeq:
    """Coefficients c(x) = u'(x/pi) / x^2 realizing w(e^{it}) ~ t^2 u(1/|t|).

    Requires u eventually increasing and s -> s^alpha u'(s) eventually
    decreasing for the supplied alpha in (-1, 1); both are checked
    numerically on a log grid and HypothesisViolation is raised on
    failure.  The derivative is taken numerically unless supplied.
    """
    if not (-1.0 < alpha < 1.0):
        raise HypothesisViolation("alpha must lie in (-1, 1)")
    if du is None:
        h = 1e-6

        def du(s, _u=u):
            s = np.asarray(s, dtype=float)
            return (np.asarray(_u(s * (1 + h))) - np.asarray(_u(s * (1 - h)))) / (2 * h * s)

    s = _log_grid(0.5, 1e7, 800)
    us = np.asarray(u(s), dtype=float)
    if not _eventually_monotone(us, s, False, 1e3):
        raise HypothesisViolation("u is not eventually increasing")
    dus = np.asarray(du(s), dtype=float)
    if np.any(dus <= 0):
        raise HypothesisViolation("u' must be positive")
    if not _eventually_monotone(s ** alpha * dus, s, True, 1e3):
        raise HypothesisViolation("s^alpha u'(s) is not eventually decreasing")

    def cfun(x, _du=du):
        x = np.asarray(x, dtype=float)
        return np.asarray(_du(x / np.pi), dtype=float) / (x * x)

    k = np.arange(1, K + 1, dtype=float)
    return CoeffSeq(cfun(k), ClosedForm("custom", fn=cfun))


# ---------------------------------------------------------------------------
# weight specification records (external interface)

def weight_from_spec(spec: dict):
    """Build the weight object described by a flat specification record.

    Returns a dict with keys `kind`, and either `coeffs` (CoeffSeq) plus
    `grid`/`table` or a raw `grid`, or `angles`/`alpha` for the
    product-singularities kind (consumed by the singular module).
    """
    kind = spec.get("kind")
    M = int(spec.get("M", 1 << 20))
    if kind == "lks_power":
        c = CoeffSeq.power(float(spec["alpha"]), int(spec.get("K", 1 << 17)))
    elif kind == "lks_power_log":
        c = CoeffSeq.power_log(float(spec["beta"]), int(spec.get("K", 1 << 17)))
    elif kind == "lks_table":
        c = CoeffSeq.table(np.asarray(spec["c"], dtype=float))
    elif kind == "grid_table":
        return {"kind": kind, "grid": WeightGrid(np.asarray(spec["samples"], dtype=float))}
    elif kind == "product_singularities":
        angles = [Fraction(a) for a in spec["angles"]]
        return {"kind": kind, "angles": angles, "alpha": float(spec["alpha"]), "M": M}
    else:
        raise PreconditionError("unknown weight kind %r" % (kind,))
    grid, table = lks_weight(c, M)
    return {"kind": kind, "coeffs": c, "grid": grid, "table": table}
