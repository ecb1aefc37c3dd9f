"""Dirichlet eigenproblem on [1, N]: spectra, localization, gap statistics.

Eigenvalues come from LAPACK's Sturm-sequence bisection (stebz) with
inverse iteration (stein) for the vectors; interval counts used by the
density-of-states and Wegner machinery are exact integer Sturm counts
computed directly (negative-pivot count of the shifted LDL^T), vectorized
over phases and energies.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cocycle import (
    CocycleParams,
    dirichlet_det_E_batch,
    e,
    monodromy_lognorm_multi,
    potential_eval,
    potential_eval_dx,
)
from .errors import DomainError

__all__ = [
    "DirichletSpectrum",
    "LocalizationProfile",
    "GapStats",
    "WegnerCurve",
    "dirichlet_diagonal",
    "sturm_count",
    "dirichlet_spectrum",
    "characteristic_consistency",
    "localization",
    "min_gap_stats",
    "wegner_count",
    "rellich_velocity",
]


@dataclass(frozen=True)
class DirichletSpectrum:
    """Sorted spectrum of H_[1,N](x) with optional orthonormal vectors."""

    N: int
    x: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    gaps: np.ndarray


@dataclass(frozen=True)
class LocalizationProfile:
    center: int                 # 1-based site index of max |psi|
    qs: np.ndarray              # dyadic window half-widths
    mass_outside: np.ndarray    # tail l^2 mass beyond each window
    decay_rate: float           # fitted exponential rate of the tail


@dataclass(frozen=True)
class GapStats:
    N: int
    x_grid: int
    min_gaps: np.ndarray        # per-phase minimal gap
    quantiles: dict
    small_gap_fractions: dict   # delta -> fraction with min gap < exp(-N^delta)


@dataclass(frozen=True)
class WegnerCurve:
    N: int
    E: float
    H_values: np.ndarray
    fractions: np.ndarray
    slope: float | None         # d log(fraction) / dH over the nonzero range
    slope_times_log_sq: float | None


def dirichlet_diagonal(params: CocycleParams, x: float, N: int,
                       sites=None) -> np.ndarray:
    """Diagonal V(e(x + k w)), k = 1..N (or the given site array), as reals."""
    ks = np.arange(1, N + 1) if sites is None else np.asarray(sites)
    vals = potential_eval(params.potential, e(x) * params.rotations(ks))
    if np.max(np.abs(vals.imag)) > 1e-9 * max(1.0, np.max(np.abs(vals.real))):
        raise DomainError("potential is not real on the unit circle")
    return vals.real.astype(float)


def sturm_count(diag: np.ndarray, shift, offdiag_sq: float = 1.0) -> np.ndarray:
    """Number of eigenvalues < shift of tridiag(diag, -1) via Sturm pivots.

    ``diag`` may have any leading batch shape (..., N); ``shift`` broadcasts
    against the batch shape.  Exact integer counts.
    """
    diag = np.asarray(diag, dtype=float)
    shift = np.asarray(shift, dtype=float)
    n = diag.shape[-1]
    d = diag[..., 0] - shift
    d = np.where(d == 0.0, -1e-300, d)
    count = (d < 0.0).astype(np.int64)
    for k in range(1, n):
        d = diag[..., k] - shift - offdiag_sq / d
        d = np.where(d == 0.0, -1e-300, d)
        count += d < 0.0
    return count


def _dense_fallback(diag: np.ndarray, want_vectors: bool):
    h = np.diag(diag) + np.diag(-np.ones(len(diag) - 1), 1) \
        + np.diag(-np.ones(len(diag) - 1), -1)
    if want_vectors:
        return scipy.linalg.eigh(h)
    return scipy.linalg.eigh(h, eigvals_only=True), None


def dirichlet_spectrum(params: CocycleParams, x: float, N: int,
                       want_vectors: bool = False) -> DirichletSpectrum:
    """Spectrum of the tridiagonal H_[1,N](x) (diagonal V, off-diagonal -1).

    Bisection to absolute tolerance 1e-12; inverse iteration for vectors.
    Near-degenerate clusters that defeat inverse iteration escalate to a
    dense solve (the Dirichlet spectrum is simple, finite precision isn't).
    """
    if N < 1:
        raise DomainError("window length must be >= 1")
    diag = dirichlet_diagonal(params, x, N)
    if N == 1:
        w = diag.copy()
        v = np.ones((1, 1)) if want_vectors else None
        return DirichletSpectrum(N=1, x=x, eigenvalues=w, eigenvectors=v,
                                 gaps=np.empty(0))
    off = -np.ones(N - 1)
    if want_vectors:
        try:
            w, v = scipy.linalg.eigh_tridiagonal(diag, off, tol=1e-12,
                                                 lapack_driver="stebz")
            ortho = np.max(np.abs(v.T @ v - np.eye(N)))
            if ortho > 1e-10 or np.min(np.diff(w)) < 1e-10:
                w, v = _dense_fallback(diag, True)
        except np.linalg.LinAlgError:
            w, v = _dense_fallback(diag, True)
    else:
        w = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True,
                                          tol=1e-12, lapack_driver="stebz")
        v = None
    order = np.argsort(w)
    w = w[order]
    if v is not None:
        v = v[:, order]
    return DirichletSpectrum(N=N, x=x, eigenvalues=w, eigenvectors=v,
                             gaps=np.diff(w))


def characteristic_consistency(spectrum: DirichletSpectrum,
                               params: CocycleParams,
                               lyap_grid: int = 32):
    """How small the determinant is at the computed eigenvalues.

    Returns (max_ratio, per-eigenvalue log gaps) where each log gap is
    log|f_[1,N](e(x), E_j)| - N L_N(E_j); eigenvalues of the assembled
    matrix must be near-zeros of the recursion determinant.
    """
    N, x = spectrum.N, spectrum.x
    la, _ = dirichlet_det_E_batch(params, complex(e(x)), 1, N,
                                  spectrum.eigenvalues)
    xs = np.arange(lyap_grid) / lyap_grid
    lognorms = monodromy_lognorm_multi(params, N, xs, spectrum.eigenvalues)
    nl = np.mean(lognorms, axis=1)
    log_gaps = la - nl
    return float(np.exp(np.max(log_gaps))), log_gaps


def localization(spectrum: DirichletSpectrum, j: int) -> LocalizationProfile:
    """Tail-mass ladder of eigenvector j around its localization center."""
    if spectrum.eigenvectors is None:
        raise DomainError("spectrum was computed without eigenvectors")
    psi = spectrum.eigenvectors[:, j]
    nu = int(np.argmax(np.abs(psi))) + 1
    qs, masses = [], []
    q = 1
    sites = np.arange(1, spectrum.N + 1)
    while q <= spectrum.N:
        outside = np.abs(sites - nu) > q
        qs.append(q)
        masses.append(float(np.sum(np.abs(psi[outside]) ** 2)))
        q *= 2
    qs = np.array(qs)
    masses = np.array(masses)
    usable = masses > 1e-280
    if np.count_nonzero(usable) >= 2:
        slope = np.polyfit(qs[usable], np.log(masses[usable]), 1)[0]
        rate = -float(slope)
    else:
        rate = math.inf
    return LocalizationProfile(center=nu, qs=qs, mass_outside=masses,
                               decay_rate=rate)


def min_gap_stats(params: CocycleParams, N: int, x_grid: int,
                  window: tuple | None = None) -> GapStats:
    """Minimal-gap statistics of the Dirichlet spectrum over a phase grid."""
    if N < 2:
        raise DomainError("need N >= 2 for gaps")
    min_gaps = np.empty(x_grid)
    for i in range(x_grid):
        spec = dirichlet_spectrum(params, i / x_grid, N)
        w = spec.eigenvalues
        if window is not None:
            w = w[(w >= window[0]) & (w <= window[1])]
        min_gaps[i] = np.min(np.diff(w)) if len(w) >= 2 else np.inf
    finite = min_gaps[np.isfinite(min_gaps)]
    if np.any(finite <= 0.0):
        raise DomainError("Dirichlet spectrum produced a nonpositive gap")
    quantiles = {q: float(np.quantile(finite, q))
                 for q in (0.01, 0.05, 0.25, 0.5)}
    fractions = {delta: float(np.mean(finite < math.exp(-N ** delta)))
                 for delta in (0.3, 0.5, 0.7)}
    return GapStats(N=N, x_grid=x_grid, min_gaps=min_gaps,
                    quantiles=quantiles, small_gap_fractions=fractions)


def wegner_count(params: CocycleParams, N: int, E: float, H_ladder,
                 x_grid: int) -> WegnerCurve:
    """Phase-measure of dist(sp H_N(x), E) < exp(-H) over an H ladder."""
    H_ladder = np.asarray(H_ladder, dtype=float)
    if np.any(H_ladder < 1.0):
        raise DomainError("H values must be >= 1")
    diags = np.stack([dirichlet_diagonal(params, i / x_grid, N)
                      for i in range(x_grid)])
    fractions = np.empty(len(H_ladder))
    for idx, H in enumerate(H_ladder):
        h = math.exp(-H)
        hit = sturm_count(diags, E + h) - sturm_count(diags, E - h)
        fractions[idx] = float(np.mean(hit > 0))
    pos = fractions > 0.0
    if np.count_nonzero(pos) >= 2:
        slope = float(np.polyfit(H_ladder[pos], np.log(fractions[pos]), 1)[0])
        slope_norm = slope * math.log(N) ** 2
    else:
        slope, slope_norm = None, None
    return WegnerCurve(N=N, E=E, H_values=H_ladder, fractions=fractions,
                       slope=slope, slope_times_log_sq=slope_norm)


def rellich_velocity(params: CocycleParams, x: float, N: int, j: int,
                     fd_step: float = 1e-6) -> float:
    """d/dx of the j-th Dirichlet eigenvalue via first-order perturbation.

    Cross-checked against a centered finite difference of the spectrum;
    disagreement beyond 1e-3 relative attaches a numerical-instability
    warning (the value returned is the perturbation-theory one).
    """
    spec = dirichlet_spectrum(params, x, N, want_vectors=True)
    psi = spec.eigenvectors[:, j]
    dv = potential_eval_dx(params.potential,
                           e(x) * params.rotations(np.arange(1, N + 1)))
    if np.max(np.abs(dv.imag)) > 1e-9 * max(1.0, np.max(np.abs(dv.real))):
        raise DomainError("potential derivative is not real on the circle")
    velocity = float(np.sum(np.abs(psi) ** 2 * dv.real))

    up = dirichlet_spectrum(params, x + fd_step, N).eigenvalues[j]
    dn = dirichlet_spectrum(params, x - fd_step, N).eigenvalues[j]
    fd = (up - dn) / (2.0 * fd_step)
    scale = max(abs(velocity), abs(fd), 1e-12 * float(np.max(np.abs(dv.real))),
                1e-300)
    if abs(velocity - fd) / scale > 1e-3:
        warnings.warn(
            f"Hellmann-Feynman velocity {velocity:.6e} and finite difference "
            f"{fd:.6e} disagree beyond 1e-3", RuntimeWarning)
    return velocity
