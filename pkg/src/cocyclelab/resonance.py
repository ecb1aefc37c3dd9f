"""Resultants of monic polynomials and double-resonance separation scans.

The Sylvester-determinant path exists to validate the resultant algebra
on synthetic polynomials; Dirichlet determinants are never converted to
coefficients (numerically hostile), their zero sets come from the
argument-principle machinery and distances are measured directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .cocycle import CocycleParams, det_evaluator, e
from .errors import DomainError
from .zeros import locate_zeros_in_disk

__all__ = [
    "MonicPolynomial",
    "SeparationField",
    "sylvester_resultant",
    "shifted_resultant_poly",
    "shifted_resultant_coefficients",
    "double_resonance_scan",
]


@dataclass(frozen=True)
class MonicPolynomial:
    """z^k + c_{k-1} z^{k-1} + ... + c_0 with the leading 1 implicit."""

    coefficients: tuple  # (c_0, c_1, ..., c_{k-1})

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coefficients)
        if len(cs) < 1:
            raise DomainError("degree must be >= 1")
        object.__setattr__(self, "coefficients", cs)

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    @classmethod
    def from_roots(cls, roots) -> "MonicPolynomial":
        cs = np.polynomial.polynomial.polyfromroots(np.asarray(roots, complex))
        return cls(tuple(cs[:-1]))

    def all_coeffs_desc(self) -> np.ndarray:
        """(1, c_{k-1}, ..., c_0), highest degree first."""
        return np.concatenate(([1.0 + 0j], np.asarray(self.coefficients)[::-1]))

    def shifted(self, eta: complex) -> "MonicPolynomial":
        """p(z + eta) via a Taylor shift of the coefficients."""
        full = np.concatenate((np.asarray(self.coefficients), [1.0 + 0j]))
        k = self.degree
        out = np.zeros(k + 1, dtype=complex)
        # binomial expansion of each power of (z + eta)
        for j in range(k + 1):
            c = full[j]
            if c == 0:
                continue
            pow_eta = 1.0 + 0j
            for i in range(j, -1, -1):
                out[i] += c * math.comb(j, i) * pow_eta
                pow_eta *= eta
        return MonicPolynomial(tuple(out[:-1]))

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones_like(z)
        for c in self.all_coeffs_desc()[1:]:
            out = out * z + c
        return out


def _log_scaled_det(m: np.ndarray) -> complex:
    """Determinant by pivoted elimination with row rescaling in log scale."""
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    log_scale = 0.0
    phase = 1.0 + 0j
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            return 0.0 + 0j
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            phase = -phase
        p = a[col, col]
        ap = abs(p)
        log_scale += math.log(ap)
        phase *= p / ap
        a[col + 1:, col:] -= np.outer(a[col + 1:, col] / p, a[col, col:])
    return math.exp(log_scale) * phase


def sylvester_resultant(f: MonicPolynomial, g: MonicPolynomial) -> complex:
    """det of the Sylvester matrix; equals prod_{i,j} (zeta_i - eta_j)."""
    k, m = f.degree, g.degree
    n = k + m
    s = np.zeros((n, n), dtype=complex)
    fc = f.all_coeffs_desc()
    gc = g.all_coeffs_desc()
    for r in range(m):
        s[r, r:r + k + 1] = fc
    for r in range(k):
        s[m + r, r:r + m + 1] = gc
    return _log_scaled_det(s)


def shifted_resultant_poly(f: MonicPolynomial, g: MonicPolynomial,
                           eta_samples) -> np.ndarray:
    """chi(eta) = Res(f(. + eta), g(.)) evaluated at the given samples.

    chi is monic of degree k*m in (-eta); the leading behavior
    chi(eta)/(-eta)^{km} -> 1 is what the separation machinery rests on.
    """
    etas = np.asarray(eta_samples, dtype=complex)
    return np.array([sylvester_resultant(f.shifted(eta), g)
                     for eta in etas.ravel()]).reshape(etas.shape)


def shifted_resultant_coefficients(f: MonicPolynomial,
                                   g: MonicPolynomial) -> np.ndarray:
    """Coefficients (b_0, ..., b_{km}) of chi(eta), by FFT interpolation
    on a circle of unit radius."""
    n = f.degree * g.degree + 1
    etas = np.exp(2j * np.pi * np.arange(n) / n)
    vals = shifted_resultant_poly(f, g, etas)
    return np.fft.fft(vals) / n


@dataclass(frozen=True)
class SeparationField:
    """Distances between the two zero sets over an (omega, E) grid."""

    omega_grid: np.ndarray
    energy_grid: np.ndarray
    distances: np.ndarray          # shape (len(omega), len(E)); inf = vacuous
    tau_ladder: np.ndarray
    sublevel_measures: np.ndarray  # estimated mes{(omega,E): d < tau}
    cell_area: float
    params: dict


def double_resonance_scan(params_template: CocycleParams, l1: int, l2: int,
                          t: int, x0: float, omega_grid, energy_grid,
                          r: float, tau_ladder=None,
                          budget_per_cell: int = 200_000) -> SeparationField:
    """Separation of zeros of f_[1,l1](., w, E) from f_[1,l2](. e(t w), w, E).

    For each (omega, E) cell the two zero sets inside D(e(x0), r) are
    located and their set distance recorded; +inf marks vacuous separation
    (an empty zero set).  Sub-level measures are grid-cell estimates and
    carry the cell resolution; nothing below one cell is claimed.
    """
    if t <= l1:
        raise DomainError("shift t must exceed the window length l1")
    omega_grid = np.asarray(omega_grid, dtype=float)
    energy_grid = np.asarray(energy_grid, dtype=float)
    if tau_ladder is None:
        tau_ladder = np.array([1e-6, 1e-5, 1e-4, 1e-3, 1e-2])
    tau_ladder = np.asarray(tau_ladder, dtype=float)
    center = complex(e(x0))
    dists = np.empty((len(omega_grid), len(energy_grid)))
    for i, om in enumerate(omega_grid):
        base = replace(params_template, omega=float(om), omega_pq=None)
        for j, en in enumerate(energy_grid):
            p = base.with_energy(float(en))
            ev1 = det_evaluator(p, 1, l1)
            ev2 = det_evaluator(p, 1, l2, shift=t)
            z1, _, inc1 = locate_zeros_in_disk(ev1, center, r,
                                               budget=budget_per_cell)
            z2, _, inc2 = locate_zeros_in_disk(ev2, center, r,
                                               budget=budget_per_cell)
            if inc1 or inc2:
                warnings.warn(f"zero location incomplete at cell ({i},{j})",
                              RuntimeWarning)
            if not z1 or not z2:
                dists[i, j] = math.inf
                continue
            a1 = np.asarray(z1)
            a2 = np.asarray(z2)
            dists[i, j] = float(np.min(np.abs(a1[:, None] - a2[None, :])))
    d_om = (omega_grid[-1] - omega_grid[0]) / max(len(omega_grid) - 1, 1)
    d_en = (energy_grid[-1] - energy_grid[0]) / max(len(energy_grid) - 1, 1)
    cell = d_om * d_en if d_om * d_en > 0 else 0.0
    measures = np.array([float(np.mean(dists < tau)) for tau in tau_ladder])
    measures *= (omega_grid[-1] - omega_grid[0]) * (energy_grid[-1] - energy_grid[0]) \
        if cell > 0 else 1.0
    return SeparationField(omega_grid=omega_grid, energy_grid=energy_grid,
                           distances=dists, tau_ladder=tau_ladder,
                           sublevel_measures=measures, cell_area=cell,
                           params={"l1": l1, "l2": l2, "t": t, "x0": x0,
                                   "r": r})
