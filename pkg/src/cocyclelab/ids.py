"""Integrated density of states: counting, moduli of continuity, the
Thouless link to the Lyapunov exponent, and concatenation-term bounds.

N_N(E) is the phase average of (1/N) #{Dirichlet eigenvalues < E}.  Counts
come from exact Sturm pivots (O(N) per phase/energy, no eigenvector work);
for very fine energy grids an equivalent eigenvalue-list mode assembles
each phase's spectrum once and bisects.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cocycle import CocycleParams, dirichlet_det, e, window_lognorm_scans
from .errors import DomainError, ResolutionError
from .spectra import dirichlet_diagonal, sturm_count
import scipy.linalg

__all__ = [
    "IdsTable",
    "ConcatenationProfile",
    "HolderReport",
    "LipschitzReport",
    "ThoulessRow",
    "CountBound",
    "ids_table",
    "holder_scan",
    "lipschitz_scan",
    "thouless_integral",
    "thouless_check",
    "concatenation_profile",
    "count_bound_check",
]


@dataclass(frozen=True)
class IdsTable:
    """Monotone map E -> N(E) on an energy grid with sample metadata."""

    energy_grid: np.ndarray
    values: np.ndarray
    N: int
    x_samples: int
    counting_mode: str
    std_errors: np.ndarray | None = None

    def __post_init__(self):
        if np.any(np.diff(self.energy_grid) <= 0):
            raise DomainError("energy grid must be strictly increasing")
        if np.any(np.diff(self.values) < 0):
            raise DomainError("IDS values must be nondecreasing")

    def resolution(self) -> float:
        return float(np.max(np.diff(self.energy_grid)))

    def at(self, energies) -> np.ndarray:
        """Linear interpolation, clamped to [0, 1] outside the grid."""
        return np.interp(energies, self.energy_grid, self.values,
                         left=0.0, right=1.0)


@dataclass(frozen=True)
class ConcatenationProfile:
    """log W_{N,k} = log(||M_[1,k]|| ||M_[k+1,N]|| / ||M_[1,N]||), k=1..N."""

    ks: np.ndarray
    log_w: np.ndarray
    x: float
    E: float
    eta: float
    N: int


@dataclass(frozen=True)
class HolderReport:
    etas: np.ndarray
    sup_moduli: np.ndarray
    exponent: float
    flagged: bool


@dataclass(frozen=True)
class LipschitzReport:
    eta: float
    quantile: float
    max_ratio: float
    unrestricted_max_ratio: float


@dataclass(frozen=True)
class ThoulessRow:
    E: float
    integral: float
    lyapunov: float
    residual: float


@dataclass(frozen=True)
class CountBound:
    lhs: int
    rhs: float
    window: tuple
    slack: float


def ids_table(params: CocycleParams, N: int, x_grid: int, energy_grid,
              counting_mode: str = "exact-sturm") -> IdsTable:
    """Phase-averaged finite-volume IDS on the given energy grid."""
    energy_grid = np.asarray(energy_grid, dtype=float)
    if np.any(np.diff(energy_grid) <= 0):
        raise DomainError("energy grid must be sorted strictly increasing")
    diags = np.stack([dirichlet_diagonal(params, i / x_grid, N)
                      for i in range(x_grid)])
    if counting_mode == "exact-sturm":
        counts = sturm_count(diags[:, None, :], energy_grid[None, :]) / N
        values = counts.mean(axis=0)
        stderr = counts.std(axis=0) / math.sqrt(x_grid)
    elif counting_mode == "eigenvalue-list":
        acc = np.zeros(len(energy_grid))
        acc_sq = np.zeros(len(energy_grid))
        off = -np.ones(N - 1)
        for i in range(x_grid):
            w = scipy.linalg.eigh_tridiagonal(diags[i], off, eigvals_only=True,
                                              lapack_driver="stebz")
            c = np.searchsorted(w, energy_grid, side="left") / N
            acc += c
            acc_sq += c * c
        values = acc / x_grid
        var = np.maximum(acc_sq / x_grid - values ** 2, 0.0)
        stderr = np.sqrt(var / x_grid)
    else:
        raise DomainError(f"unknown counting mode {counting_mode!r}")
    return IdsTable(energy_grid=energy_grid, values=values, N=N,
                    x_samples=x_grid, counting_mode=counting_mode,
                    std_errors=stderr)


def holder_scan(table: IdsTable, eta_ladder, k0: int | None = None) -> HolderReport:
    """Sup modulus N(E+eta) - N(E-eta) per eta, with a log-log exponent fit."""
    etas = np.asarray(eta_ladder, dtype=float)
    h = table.resolution()
    if np.any(etas < h):
        raise ResolutionError("eta below the energy-grid resolution")
    sups = np.empty(len(etas))
    E = table.energy_grid
    for i, eta in enumerate(etas):
        sups[i] = float(np.max(table.at(E + eta) - table.at(E - eta)))
    exponent = float(np.polyfit(np.log(etas), np.log(sups), 1)[0])
    flagged = k0 is not None and exponent < 1.0 / (2 * k0) - 0.15
    return HolderReport(etas=etas, sup_moduli=sups, exponent=exponent,
                        flagged=flagged)


def lipschitz_scan(table: IdsTable, eta: float, q: float) -> LipschitzReport:
    """Max increment ratio after trimming the worst q-fraction of energies.

    The trimmed energies stand in for the non-constructive exceptional set:
    the quantile is always reported, never silently applied.
    """
    if not (0.0 < q < 0.2):
        raise DomainError("quantile must lie in (0, 0.2)")
    if eta < table.resolution():
        raise ResolutionError("eta below the energy-grid resolution")
    E = table.energy_grid
    ratios = (table.at(E + eta) - table.at(E - eta)) / eta
    cut = np.quantile(ratios, 1.0 - q)
    kept = ratios[ratios <= cut]
    return LipschitzReport(eta=eta, quantile=q,
                           max_ratio=float(np.max(kept)),
                           unrestricted_max_ratio=float(np.max(ratios)))


def thouless_integral(table: IdsTable, E: float) -> float:
    """int log|E - E'| dN(E') by Stieltjes summation over table increments.

    The cell containing E contributes dN * (log(h/2) - 1), exact for a
    locally uniform dN, which removes the first-order singularity bias.
    """
    grid = table.energy_grid
    vals = table.values
    dN = np.diff(vals)
    mids = 0.5 * (grid[1:] + grid[:-1])
    widths = np.diff(grid)
    total = 0.0
    inside = (E >= grid[0]) & (E < grid[-1])
    sing = np.searchsorted(grid, E, side="right") - 1 if inside else -1
    for i in range(len(dN)):
        if dN[i] == 0.0:
            continue
        if i == sing:
            total += dN[i] * (math.log(widths[i] / 2.0) - 1.0)
        else:
            total += dN[i] * math.log(abs(E - mids[i]))
    if inside and 0 <= sing < len(dN) and dN[sing] == 0.0:
        warnings.warn("energy falls in a cell with vanishing IDS increment",
                      RuntimeWarning)
    return total


def thouless_check(table: IdsTable, E_list, lyap) -> list[ThoulessRow]:
    """Residuals of L(E) = int log|E-E'| dN(E') against a Lyapunov source.

    ``lyap`` is a callable E -> LyapunovEstimate (typically finite_lyapunov
    with matched parameters).
    """
    if len(table.energy_grid) < 256:
        raise DomainError("need at least 256 energy grid points")
    rows = []
    for E in E_list:
        integral = thouless_integral(table, float(E))
        L = lyap(float(E)).value
        rows.append(ThoulessRow(E=float(E), integral=integral, lyapunov=L,
                                residual=integral - L))
    return rows


def concatenation_profile(params: CocycleParams, x: float, N: int, E: float,
                          eta: float) -> ConcatenationProfile:
    """All N concatenation terms at E + i eta in log scale, two sweeps."""
    if eta <= 0:
        raise DomainError("eta must be positive")
    p = params.with_energy(E + 1j * eta)
    prefix, suffix = window_lognorm_scans(p, complex(e(x)), N)
    ks = np.arange(1, N + 1)
    log_w = prefix + suffix[1:] - prefix[N - 1]
    return ConcatenationProfile(ks=ks, log_w=log_w, x=x, E=E, eta=eta, N=N)


def count_bound_check(params: CocycleParams, x: float, N: int, E: float,
                      eta: float) -> CountBound:
    """Eigenvalue count in (E-eta, E+eta) against 4 eta sum_k W_{N,k}.

    The counting window [a, N-b+1] maximizes |f_[a', N-b'+1]| over
    a', b' in {1, 2}; the inequality is asserted, not just reported.
    """
    if eta <= 0:
        raise DomainError("eta must be positive")
    p = params.with_energy(E + 1j * eta)
    z = complex(e(x))
    best, best_ab = -math.inf, (1, 1)
    for a in (1, 2):
        for b in (1, 2):
            lm = dirichlet_det(p, z, a, N - b + 1).log_magnitude()
            if lm > best:
                best, best_ab = lm, (a, b)
    a, b = best_ab
    diag = dirichlet_diagonal(params, x, N, sites=np.arange(a, N - b + 2))
    lhs = int(sturm_count(diag, E + eta) - sturm_count(diag, E - eta))

    prof = concatenation_profile(params, x, N, E, eta)
    m = float(np.max(prof.log_w))
    rhs = 4.0 * eta * math.exp(m) * float(np.sum(np.exp(prof.log_w - m)))
    if lhs > rhs * (1.0 + 1e-6):
        raise AssertionError(
            f"concatenation count bound violated: {lhs} > {rhs}")
    return CountBound(lhs=lhs, rhs=rhs, window=(a, N - b + 1),
                      slack=rhs / max(lhs, 1))
