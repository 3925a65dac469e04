"""Windowed sequences on Z, sampled weights on the circle, and the FFT bridge.

Conventions used throughout the package:

* A sequence table is a :class:`WindowSeq`: values x_j for j in [lo, hi]
  with implicit zero extension outside the window.  The window always
  contains the origin.
* A weight is sampled on the midpoint grid t_m = 2*pi*(m + 1/2)/M - pi,
  m = 0..M-1.  The midpoint offset guarantees that t = 0 and every root
  of unity of order dividing M fall between nodes, so integrable
  singularities of 1/w are never sampled at a zero.
* Quadrature of the normalized Lebesgue measure is the plain node
  average: integral h dm ~ (1/M) sum_m h(t_m).
* Fourier analysis/synthesis of grids is exact (up to roundoff) for
  trigonometric polynomials of degree < M/2; the public `analyze`
  restricts to N < M/4 as a safety margin against aliasing.

All containers are immutable after construction and all functions are
pure, so everything here is safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve


class LksError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(LksError):
    """A documented precondition of an operation was violated."""


class ResolutionError(PreconditionError):
    """Requested coefficient range exceeds what the grid resolves."""


class ConjugateSymmetryError(PreconditionError):
    """Real synthesis requested from a non-Hermitian coefficient table."""


class InsufficientRangeError(PreconditionError):
    """Coefficient table does not cover the lags needed by the Gram matrix."""


class DegenerateMatrixError(PreconditionError):
    """All matrix entries vanish."""


class HypothesisViolation(PreconditionError):
    """A numerically checked hypothesis of a criterion failed."""


class NotInvertibleError(PreconditionError):
    """inf |lambda_j| = 0 on the requested window."""


class CutoffSpecError(PreconditionError):
    """Cut-off coefficient tail is not summable at tolerance."""


class OnCurveError(PreconditionError):
    """Winding-number probe point lies (numerically) on the curve."""


class QuadratureResolutionError(LksError):
    """Quadrature produced results incompatible with analytic guarantees."""


class SolverFailure(LksError):
    """An iterative solver did not converge within its budget."""


TAU = 2.0 * np.pi


def grid_nodes(M: int) -> np.ndarray:
    """Midpoint nodes t_m = 2*pi*(m+1/2)/M - pi in (-pi, pi)."""
    return TAU * (np.arange(M) + 0.5) / M - np.pi


def _check_grid_size(M: int) -> None:
    if M < 8 or (M & (M - 1)) != 0:
        raise PreconditionError("grid size must be a power of two >= 8, got %r" % (M,))


@dataclass(frozen=True)
class WindowSeq:
    """Finitely supported sequence on Z, stored on the window [lo, hi].

    ``values[j - lo]`` is x_j; the sequence is zero outside the window.
    The window must contain the origin.
    """

    lo: int
    hi: int
    values: np.ndarray

    def __post_init__(self):
        if not (self.lo <= 0 <= self.hi):
            raise PreconditionError("window [%d, %d] must contain 0" % (self.lo, self.hi))
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.hi - self.lo + 1,):
            raise PreconditionError("values length %d does not match window [%d, %d]"
                                    % (vals.size, self.lo, self.hi))
        if not np.all(np.isfinite(vals)):
            raise PreconditionError("non-finite entries in sequence values")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def basis(cls, n: int) -> "WindowSeq":
        """The standard 0-1 sequence e_n."""
        lo, hi = min(n, 0), max(n, 0)
        v = np.zeros(hi - lo + 1, dtype=complex)
        v[n - lo] = 1.0
        return cls(lo, hi, v)

    @classmethod
    def from_values(cls, lo: int, values) -> "WindowSeq":
        values = np.asarray(values, dtype=complex)
        return cls(lo, lo + values.size - 1, values)

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def at(self, j) -> np.ndarray:
        """Value(s) at index/indices j, zero outside the window."""
        j = np.asarray(j)
        inside = (j >= self.lo) & (j <= self.hi)
        out = np.zeros(j.shape, dtype=complex)
        out[inside] = self.values[j[inside] - self.lo]
        return out if out.shape else out[()]

    def as_range(self, lo: int, hi: int) -> np.ndarray:
        """Values on [lo, hi] with zero extension."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo: b - lo + 1] = self.values[a - self.lo: b - self.lo + 1]
        return out

    def pad_to(self, lo: int, hi: int) -> "WindowSeq":
        return WindowSeq(lo, hi, self.as_range(lo, hi))

    def restrict(self, lo: int, hi: int) -> "WindowSeq":
        return WindowSeq(lo, hi, self.as_range(lo, hi))

    def conj(self) -> "WindowSeq":
        return WindowSeq(self.lo, self.hi, np.conj(self.values))

    def reflected(self) -> "WindowSeq":
        """Index reflection j -> -j."""
        return WindowSeq(-self.hi, -self.lo, self.values[::-1])

    def shifted(self, s: int) -> "WindowSeq":
        """(S^s x)_j = x_{j-s}; window grows to keep the origin inside."""
        lo, hi = min(self.lo + s, 0), max(self.hi + s, 0)
        out = np.zeros(hi - lo + 1, dtype=complex)
        out[self.lo + s - lo: self.hi + s - lo + 1] = self.values
        return WindowSeq(lo, hi, out)

    def __add__(self, other: "WindowSeq") -> "WindowSeq":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return WindowSeq(lo, hi, self.as_range(lo, hi) + other.as_range(lo, hi))

    def __sub__(self, other: "WindowSeq") -> "WindowSeq":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return WindowSeq(lo, hi, self.as_range(lo, hi) - other.as_range(lo, hi))

    def __mul__(self, scalar) -> "WindowSeq":
        return WindowSeq(self.lo, self.hi, self.values * scalar)

    __rmul__ = __mul__

    def norm_l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True)
class WeightGrid:
    """Nonnegative weight sampled on the midpoint grid, plus an optional
    exact coefficient table (set when the weight was built from one)."""

    samples: np.ndarray
    coeffs: Optional[WindowSeq] = None

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        _check_grid_size(s.size)
        if not np.all(np.isfinite(s)):
            raise PreconditionError("non-finite weight samples")
        neg = s < 0.0
        if np.any(neg):
            scale = float(np.max(np.abs(s))) or 1.0
            if float(s.min()) < -1e-12 * scale:
                raise PreconditionError("weight samples must be nonnegative "
                                        "(min %.3g)" % s.min())
            s = np.where(neg, 0.0, s)  # roundoff-negative values near zeros
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def M(self) -> int:
        return self.samples.size

    def nodes(self) -> np.ndarray:
        return grid_nodes(self.M)

    def integral(self) -> float:
        """Quadrature of the normalized Lebesgue integral of the weight."""
        return float(self.samples.mean())


def _analysis_phase(M: int) -> np.ndarray:
    n = np.concatenate([np.arange(0, M // 2), np.arange(-M // 2, 0)])
    return np.exp(1j * np.pi * n * (1.0 - 1.0 / M))


def analyze_samples_full(samples: np.ndarray) -> np.ndarray:
    """Quadrature Fourier coefficients of a sample array for every
    resolvable frequency, as a centered array c[j + M/2] = hhat(j),
    j in [-M/2, M/2)."""
    s = np.asarray(samples)
    M = s.size
    _check_grid_size(M)
    c = np.fft.fft(s) / M * _analysis_phase(M)
    half = M // 2
    return c[np.arange(-half, half) % M]


def analyze(grid: WeightGrid, N: int) -> WindowSeq:
    """Quadrature Fourier coefficients hhat(n) = (1/M) sum_m h(t_m) e^{-i n t_m}
    for |n| <= N.

    Exact for trigonometric polynomials of degree <= M/2 - N; the
    precondition N < M/4 keeps a wide aliasing margin.
    """
    M = grid.M
    if not N < M // 4:
        raise ResolutionError("N = %d too large for grid M = %d (need N < M/4)" % (N, M))
    full = analyze_samples_full(grid.samples)
    half = M // 2
    return WindowSeq(-N, N, full[half - N: half + N + 1])


def synthesize_complex(coeffs: WindowSeq, M: int) -> np.ndarray:
    """samples[m] = sum_n coeffs(n) e^{i n t_m} on the midpoint grid."""
    _check_grid_size(M)
    if coeffs.hi - coeffs.lo + 1 > M:
        raise ResolutionError("coefficient window wider than grid")
    b = np.zeros(M, dtype=complex)
    idx = coeffs.indices()
    b[idx % M] = coeffs.values
    b *= np.conj(_analysis_phase(M))
    return M * np.fft.ifft(b)


def hermitian_symmetric(coeffs: WindowSeq, tol: float = 1e-12) -> bool:
    idx = coeffs.indices()
    scale = max(float(np.max(np.abs(coeffs.values))), 1e-300)
    gap = np.abs(coeffs.at(-idx) - np.conj(coeffs.values))
    return bool(np.max(gap) <= tol * scale)


def synthesize(coeffs: WindowSeq, M: int) -> WeightGrid:
    """Real synthesis of a Hermitian-symmetric coefficient table into a
    WeightGrid; raises ConjugateSymmetryError otherwise."""
    if not hermitian_symmetric(coeffs):
        raise ConjugateSymmetryError("coefficient table is not Hermitian-symmetric")
    samples = synthesize_complex(coeffs, M)
    return WeightGrid(samples.real, coeffs=coeffs)


@dataclass(frozen=True)
class GramMatrix:
    """Gram matrix G[n, m] = hhat(n - m) of the system (z^n), |n| <= N,
    in L^2 of the weight with coefficient table hhat."""

    N: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2 * self.N + 1, 2 * self.N + 1):
            raise PreconditionError("Gram shape mismatch")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def hermitian(self) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=1e-12))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def gram(coeffs: WindowSeq, N: int) -> GramMatrix:
    """Toeplitz Gram matrix on the window [-N, N] from a coefficient table.

    The table must cover |n| <= 2N; entries beyond the stored window are
    taken as exact zeros only when the table was built with that meaning
    (use WindowSeq.pad_to to make it explicit).
    """
    if coeffs.hi < 2 * N or coeffs.lo > -2 * N:
        raise InsufficientRangeError("gram on [-%d, %d] needs coefficients for |n| <= %d"
                                     % (N, N, 2 * N))
    idx = np.arange(-N, N + 1)
    lag = idx[:, None] - idx[None, :]
    return GramMatrix(N, coeffs.at(lag))


def toeplitz_form(x: np.ndarray, table: WindowSeq) -> float:
    """Quadratic form sum_{a,b} conj(x_a) table(a-b) x_b for x given on a
    contiguous index range, evaluated with FFT autocorrelation.

    For a weight table this is the squared L^2(w) norm of the polynomial
    with coefficients x.  The table must cover lags |d| <= len(x) - 1.
    """
    x = np.asarray(x, dtype=complex)
    n = x.size
    if table.hi < n - 1 or table.lo > -(n - 1):
        raise InsufficientRangeError("table covers lags [%d, %d], need |d| <= %d"
                                     % (table.lo, table.hi, n - 1))
    L = 1
    while L < 2 * n:
        L *= 2
    f = np.fft.fft(x, L)
    ac = np.fft.ifft(f * np.conj(f))  # ac[d] = sum_a x_{a+d} conj(x_a)
    d = np.arange(1, n)
    tpos = table.at(d)
    s = complex(table.at(0)) * ac[0] + np.sum(np.conj(tpos) * ac[d] + tpos * np.conj(ac[d]))
    return float(s.real)


def convolve(a: WindowSeq, b: WindowSeq) -> WindowSeq:
    """Exact full linear convolution; the window is the sum of windows."""
    vals = fftconvolve(a.values, b.values)
    return WindowSeq(a.lo + b.lo, a.hi + b.hi, vals)


def convolve_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return fftconvolve(a, b)
