"""Hidden spectrum for discrete quasi-periodic measures.

The measure nu = sum_k c_k delta_{zeta^k} (zeta not a root of unity,
c_k > 0 summable with bounded ratios) identifies L^2(T, nu) with a
weighted space of holomorphic coefficients, and its Fourier multipliers
are exactly lambda_n = phi(zeta^n) for pointwise multipliers phi of the
dual space.  The visible spectrum clos{lambda_n} is the curve phi(T);
the full spectrum is phi of the closed disc.  Everything here probes
that picture with certified finite computations: eigenvector residuals,
finite-section smallest singular values (monotone in the window by
construction), winding numbers, and the growth of inverse-multiplier
compressions.

Truncated sections of the shift are nilpotent, so eigenvalues of
truncations are never used as spectral evidence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np
import scipy.linalg as sla
from numpy.polynomial import polynomial as npoly

from .seqcore import (OnCurveError, PreconditionError,
                      QuadratureResolutionError)
from .multipliers import MultiplierSpec

GOLDEN_ANGLE = 2.0 * np.pi * (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SymbolSpec:
    """Polynomial symbol phi with ascending coefficients phi_hat(0..deg)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           tuple(complex(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return npoly.polyval(np.asarray(z, dtype=complex),
                             np.asarray(self.coeffs, dtype=complex))

    def on_circle(self, M: int = 1 << 12) -> np.ndarray:
        t = np.linspace(0.0, 2.0 * np.pi, M, endpoint=False)
        return self(np.exp(1j * t))

    def preimage_count(self, z: complex) -> int:
        """Number of roots of phi(w) = z inside the open unit disc
        (companion-matrix root oracle)."""
        c = np.asarray(self.coeffs, dtype=complex).copy()
        c[0] -= z
        if np.allclose(c, 0.0):
            raise PreconditionError("phi is identically z")
        roots = np.roots(c[::-1])
        return int(np.sum(np.abs(roots) < 1.0))

    def lipschitz_bound(self) -> float:
        """Lipschitz constant of t -> phi(e^{it}) via sum |phi_hat(m)| m."""
        m = np.arange(len(self.coeffs))
        return float(np.sum(np.abs(np.asarray(self.coeffs)) * m))


@dataclass(frozen=True)
class NuMeasure:
    """nu = sum_{k>=0} c_k delta_{zeta^k} with the golden-ratio angle and
    c_k = (k+1)^{-2} by default.

    The default family evaluates the Gram entries nu_hat(n) =
    sum_k c_k zeta^{kn} exactly through the dilogarithm
    (nu_hat(n) = Li_2(zeta^n)/zeta^n); custom coefficient arrays use the
    truncated sum and carry the truncation in the entries.
    """

    zeta_angle: float = GOLDEN_ANGLE
    c: Optional[np.ndarray] = None
    K: int = 2048
    exact_family: bool = True
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.c is None:
            k = np.arange(self.K + 1, dtype=float)
            object.__setattr__(self, "c", (k + 1.0) ** -2.0)
        else:
            c = np.asarray(self.c, dtype=float)
            if np.any(c <= 0) or not np.all(np.isfinite(c)):
                raise PreconditionError("masses c_k must be positive and finite")
            object.__setattr__(self, "c", c.copy())
            object.__setattr__(self, "K", c.size - 1)
            object.__setattr__(self, "exact_family", False)
        ratios = self.c[:-1] / self.c[1:]
        object.__setattr__(self, "_cache", dict(self._cache))
        self._cache["ratio_sup"] = float(ratios.max())

    @classmethod
    def from_fraction_angle(cls, frac: Fraction, **kw) -> "NuMeasure":
        """Rational angles are roots of unity and are rejected up to
        denominator 10^6 (the hidden-spectrum picture needs zeta^k != 1)."""
        frac = Fraction(frac)
        if frac.denominator <= 10 ** 6:
            raise PreconditionError(
                "zeta = e^{2 pi i %s} is a root of unity of order %d"
                % (frac, frac.denominator))
        return cls(zeta_angle=2.0 * np.pi * float(frac), **kw)

    @property
    def zeta(self) -> complex:
        return complex(np.exp(1j * self.zeta_angle))

    def ratio_sup(self) -> float:
        return self._cache["ratio_sup"]

    def dual_radius_proxy(self, m: Optional[int] = None) -> float:
        """sup_k (c_{k+m}/c_k)^{1/(2m)} at a large lag m; the spectral
        picture phi(closed disc) presumes this proxy is ~ 1."""
        if m is None:
            m = max(self.K // 2, 1)
        ratios = self.c[m:] / self.c[:-m]
        return float(np.max(ratios) ** (1.0 / (2.0 * m)))

    def nu_hat(self, nmax: int) -> np.ndarray:
        """Centered table of nu_hat(n) = sum_k c_k zeta^{kn}, |n| <= nmax."""
        key = ("nu_hat", nmax)
        if key in self._cache:
            return self._cache[key]
        out = np.empty(2 * nmax + 1, dtype=complex)
        if self.exact_family:
            with mpmath.workdps(25):
                ang = mpmath.mpf(float(self.zeta_angle))
                for n in range(0, nmax + 1):
                    if n == 0:
                        v = mpmath.pi ** 2 / 6
                    else:
                        z = mpmath.e ** (1j * ang * n)
                        v = mpmath.polylog(2, z) / z
                    out[nmax + n] = complex(v)
                    out[nmax - n] = complex(v).conjugate()
        else:
            k = np.arange(self.c.size)
            for n in range(0, nmax + 1):
                v = complex(np.sum(self.c * np.exp(1j * self.zeta_angle * k * n)))
                out[nmax + n] = v
                out[nmax - n] = v.conjugate()
        self._cache[key] = out
        return out

    def gram(self, N: int) -> np.ndarray:
        """Gram of (z^n), |n| <= N, in L^2(nu): G[a, b] = nu_hat(n_b - n_a)."""
        tab = self.nu_hat(2 * N)
        idx = np.arange(-N, N + 1)
        return tab[(idx[None, :] - idx[:, None]) + 2 * N]


def symbol_multiplier(phi: SymbolSpec, nu: NuMeasure) -> MultiplierSpec:
    """The Fourier multiplier lambda_n = phi(zeta^n) of L^2(nu)."""
    return MultiplierSpec.symbol(phi.coeffs, nu.zeta_angle)


def eigen_residual(phi: SymbolSpec, nu: NuMeasure, z: complex, K: int = 200):
    """Residual ||(T_lambda - phi(z)) f_z|| / ||f_z|| in l^2_a(c) for the
    truncated eigenvector f_z = (z^k)_{k=0..K}.

    T_lambda acts as sum_m phi_hat(m) (left shift)^m; the residual is
    pure truncation and must sit below the tail bound computed from |z|
    and c (tests pin that first).
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise PreconditionError("|z| must be < 1 for f_z to lie in the space")
    if K > nu.K:
        raise PreconditionError("truncation K exceeds the stored mass array")
    c = nu.c[:K + 1]
    f = z ** np.arange(K + 1)
    norm2 = float(np.sum(c * np.abs(f) ** 2))
    if abs(z) ** (2 * K) * c[-1] >= 1e-16 * norm2:
        raise PreconditionError("K too small for a certified truncation tail")
    Tf = np.zeros(K + 1, dtype=complex)
    for m, cm in enumerate(phi.coeffs):
        if cm != 0.0:
            shifted = np.concatenate([f[m:], np.zeros(m, dtype=complex)])
            Tf += cm * shifted
    r = Tf - phi(z) * f
    return float(np.sqrt(np.sum(c * np.abs(r) ** 2) / norm2))


def _gen_smallest_sv(V: np.ndarray, lam: np.ndarray, z: complex) -> float:
    M = lam - z
    A = (np.conj(M)[:, None] * V) * M[None, :]
    w = sla.eigh(A, V, eigvals_only=True)
    return float(np.sqrt(max(w[0], 0.0)))


def _gen_largest_sv(V: np.ndarray, lam: np.ndarray) -> float:
    A = (np.conj(lam)[:, None] * V) * lam[None, :]
    w = sla.eigh(A, V, eigvals_only=True)
    return float(np.sqrt(max(w[-1], 0.0)))


def _conditioned_window(nu: NuMeasure, N: int, cond_limit: float = 1e15) -> int:
    while N >= 4:
        V = nu.gram(N)
        ev = np.linalg.eigvalsh(V)
        if ev[0] > 0 and ev[-1] / ev[0] <= cond_limit:
            return N
        warnings.warn("Gram condition %.2g beyond %.2g at N=%d; reducing window"
                      % (ev[-1] / max(ev[0], 1e-300), cond_limit, N))
        N = (3 * N) // 4
    raise QuadratureResolutionError("no well-conditioned window found")


def resolvent_probe(phi: SymbolSpec, nu: NuMeasure, z: complex, N_list):
    """Smallest singular value of the compression of (T_lambda - z) to
    span{z^n : |n| <= N} in L^2(nu), per N.

    The values are monotone nonincreasing in N (nested spans) and
    separate z inside phi(closed disc) (decay to 0) from z outside
    (stabilization away from 0).
    """
    out = []
    for N in N_list:
        N_eff = _conditioned_window(nu, int(N))
        V = nu.gram(N_eff)
        idx = np.arange(-N_eff, N_eff + 1)
        lam = phi(np.exp(1j * nu.zeta_angle * idx))
        out.append((N_eff, _gen_smallest_sv(V, lam, complex(z))))
    return out


def winding_number(phi: SymbolSpec, z: complex, grid_size: int = 1 << 16) -> int:
    """Winding number of phi - z around 0 by the discrete argument
    principle on `grid_size` points."""
    t = np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)
    f = phi(np.exp(1j * t)) - complex(z)
    if float(np.min(np.abs(f))) < 1e-8:
        raise OnCurveError("probe point is within 1e-8 of the curve")
    inc = np.angle(np.roll(f, -1) / f)
    total = float(np.sum(inc)) / (2.0 * np.pi)
    nearest = int(np.rint(total))
    if abs(total - nearest) >= 0.1:
        raise QuadratureResolutionError(
            "accumulated rounding %.3g in the winding sum" % abs(total - nearest))
    return nearest


def slp_failure_demo(nu: NuMeasure, N_list, phi: Optional[SymbolSpec] = None):
    """Compression norms of the forward multiplier (zeta^n), the inverse
    multiplier (zeta^{-n}), and a unimodular constant, per N.

    The forward norms stay bounded by sup sqrt(c_k/c_{k+1}); the inverse
    norms grow without bound -- the quantitative face of the hidden
    spectrum (0 lies in the spectrum although inf_n |lambda_n| = 1).
    """
    rows = []
    for N in N_list:
        N_eff = _conditioned_window(nu, int(N))
        V = nu.gram(N_eff)
        idx = np.arange(-N_eff, N_eff + 1)
        fwd = np.exp(1j * nu.zeta_angle * idx)
        rows.append({
            "N": N_eff,
            "forward": _gen_largest_sv(V, fwd),
            "inverse": _gen_largest_sv(V, np.conj(fwd)),
            "constant": _gen_largest_sv(V, np.full(idx.size, 1j)),
        })
    growth = rows[-1]["inverse"] / rows[0]["inverse"] if rows else float("nan")
    return {"rows": rows, "inverse_growth": growth,
            "forward_bound": np.sqrt(nu.ratio_sup())}


def visible_spectrum_gap(phi: SymbolSpec, nu: NuMeasure, nmax: int = 10 ** 4) -> float:
    """Upper bound on the Hausdorff distance from phi(T) to the visible
    set {phi(zeta^n) : |n| <= nmax}: (max angular gap) x (Lipschitz
    bound); equidistribution of the golden rotation makes this small."""
    n = np.arange(-nmax, nmax + 1)
    ang = np.sort(np.mod(n * nu.zeta_angle, 2.0 * np.pi))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * np.pi]]))
    return float(np.max(gaps)) * phi.lipschitz_bound()
