"""Finite-volume Lyapunov exponents and avalanche-principle machinery.

The finite-volume exponent is the phase average

    L_n(y, E) = (1/n) <log ||M_n(e(x+iy), E)||>_x

taken over a deterministic equispaced grid (the integrand is 1-periodic,
so equispaced quadrature converges fast; a sample standard error is
reported regardless).  The avalanche principle compares a long product of
large, pairwise non-cancelling 2x2 matrices with its pair/singleton
telescoping; `ap_check` measures the defect, `ap_extrapolate` uses the
induced length-doubling identity  L_N ~ 2 L_{2l} - L_l  to reach large N
cheaply, cross-validating against the direct average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import (
    CocycleParams,
    dirichlet_det_batch,
    e,
    monodromy_lognorm_grid,
)
from .errors import DomainError, RegimeError
from .scaledmat import ScaledMatrix2, log_abs_det, log_norm, mat_mul, normalize

__all__ = [
    "LyapunovEstimate",
    "ApReport",
    "ApExtrapolation",
    "UniformUpperReport",
    "LdtPoint",
    "finite_lyapunov",
    "ap_check",
    "ap_extrapolate",
    "uniform_upper_check",
    "ldt_measure",
]

# operations requiring a hyperbolic regime refuse to run below this
POSITIVE_REGIME_FLOOR = 0.05


@dataclass(frozen=True)
class LyapunovEstimate:
    n: int
    value: float
    grid_size: int
    y: float
    std_error: float


@dataclass(frozen=True)
class ApReport:
    """Measured avalanche-principle defect for one chain of factors."""

    n: int
    mu: float
    hypothesis_large: bool
    hypothesis_diff: bool
    lhs_rhs_gap: float | None
    bound: float
    c_implied: float | None
    max_collapse: float


@dataclass(frozen=True)
class ApExtrapolation:
    """2 L_{2l} - L_l together with its direct cross-validation at N."""

    n: int
    value: float
    grid_size: int
    y: float
    std_error: float
    ell: int
    direct_value: float
    difference: float
    tolerance: float


@dataclass(frozen=True)
class UniformUpperReport:
    n: int
    grid_size: int
    max_deviation: float
    mean_deviation: float
    ratio_to_log_sq: float


@dataclass(frozen=True)
class LdtPoint:
    n: int
    delta: float
    grid_size: int
    fraction: float
    predicted: float
    use_determinant: bool


def _y_cap(params: CocycleParams) -> float:
    # keep e(x+iy) inside the annulus of half-width rho0/2
    return math.log1p(params.potential.width / 2.0) / (2.0 * math.pi)


def finite_lyapunov(params: CocycleParams, n: int, grid: int,
                    y: float = 0.0) -> LyapunovEstimate:
    """Equal-weight grid average of (1/n) log ||M_n|| with standard error."""
    if grid < 8:
        raise DomainError("need at least 8 grid phases")
    if abs(y) > _y_cap(params):
        raise DomainError("imaginary phase offset leaves the annulus of analyticity")
    xs = np.arange(grid) / grid
    vals = monodromy_lognorm_grid(params, n, xs, y=y) / n
    value = float(np.mean(vals))
    std_error = float(np.std(vals) / math.sqrt(grid))
    return LyapunovEstimate(n=n, value=value, grid_size=grid, y=y,
                            std_error=std_error)


AP_ACCEPT_CONSTANT = 10.0


def ap_check(factors: list[ScaledMatrix2], mu_floor: float) -> ApReport:
    """Verify the avalanche-principle hypotheses and measure the defect.

    Factors with |det| > 1 are rescaled by |det|^(-1/2) first; the defect
    is exactly invariant under per-factor scalar rescaling, so this only
    affects the hypothesis checks, as it should.
    """
    if not factors:
        raise DomainError("empty factor chain")
    rescaled = []
    for a in factors:
        lad = log_abs_det(a)
        if lad > 0.0:
            rescaled.append(ScaledMatrix2(a.mantissa, a.log_scale - 0.5 * lad))
        else:
            rescaled.append(a)
    n = len(rescaled)
    log_norms = np.array([log_norm(a) for a in rescaled])
    mu = float(mu_floor)
    hypothesis_large = bool(np.min(log_norms) >= math.log(mu)) and mu > n

    pair_log_norms = np.empty(n - 1)
    for j in range(n - 1):
        pair_log_norms[j] = log_norm(mat_mul(rescaled[j + 1], rescaled[j]))
    collapse = log_norms[1:] + log_norms[:-1] - pair_log_norms
    max_collapse = float(np.max(collapse)) if n > 1 else 0.0
    hypothesis_diff = bool(max_collapse < 0.5 * math.log(mu)) if n > 1 else True

    bound = AP_ACCEPT_CONSTANT * n / mu
    if not (hypothesis_large and hypothesis_diff):
        return ApReport(n=n, mu=mu, hypothesis_large=hypothesis_large,
                        hypothesis_diff=hypothesis_diff, lhs_rhs_gap=None,
                        bound=bound, c_implied=None, max_collapse=max_collapse)

    prod = rescaled[0]
    for a in rescaled[1:]:
        prod = mat_mul(a, prod)
    gap = abs(log_norm(prod) + float(np.sum(log_norms[1:-1]))
              - float(np.sum(pair_log_norms)))
    return ApReport(n=n, mu=mu, hypothesis_large=True, hypothesis_diff=True,
                    lhs_rhs_gap=gap, bound=bound, c_implied=gap * mu / n,
                    max_collapse=max_collapse)


def ap_extrapolate(params: CocycleParams, ell: int, N: int, grid: int,
                   y: float = 0.0,
                   regime_floor: float = POSITIVE_REGIME_FLOOR) -> ApExtrapolation:
    """Length-doubling extrapolation 2 L_{2l} - L_l, cross-checked at N."""
    if ell < 32:
        raise DomainError("extrapolation base scale must be >= 32")
    if N < ell * ell:
        raise DomainError("target scale must be >= ell^2")
    l_ell = finite_lyapunov(params, ell, grid, y=y)
    if l_ell.value <= regime_floor:
        raise RegimeError(
            f"Lyapunov estimate {l_ell.value:.4f} at scale {ell} is below "
            f"the positive-regime floor {regime_floor}")
    l_2ell = finite_lyapunov(params, 2 * ell, grid, y=y)
    value = 2.0 * l_2ell.value - l_ell.value
    std_error = math.sqrt(4.0 * l_2ell.std_error ** 2 + l_ell.std_error ** 2)
    direct = finite_lyapunov(params, N, grid, y=y)
    difference = abs(value - direct.value)
    tolerance = max(5.0 * std_error, 10.0 * ell / N)
    return ApExtrapolation(n=N, value=value, grid_size=grid, y=y,
                           std_error=std_error, ell=ell,
                           direct_value=direct.value, difference=difference,
                           tolerance=tolerance)


def uniform_upper_check(params: CocycleParams, N: int, grid: int,
                        y: float = 0.0) -> UniformUpperReport:
    """Max grid deviation of log||M_N(x)|| above N L_N, and its log^2 ratio."""
    xs = np.arange(grid) / grid
    lognorms = monodromy_lognorm_grid(params, N, xs, y=y)
    mean = float(np.mean(lognorms))
    max_dev = float(np.max(lognorms) - mean)
    mean_dev = float(np.mean(lognorms - mean))
    return UniformUpperReport(n=N, grid_size=grid, max_deviation=max_dev,
                              mean_deviation=mean_dev,
                              ratio_to_log_sq=max_dev / math.log(N) ** 2)


def ldt_measure(params: CocycleParams, n: int, delta: float, grid: int,
                use_determinant: bool = False) -> LdtPoint:
    """Fraction of grid phases deviating from n L_n by more than delta*n."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    xs = np.arange(grid) / grid
    lognorms = monodromy_lognorm_grid(params, n, xs)
    center = float(np.mean(lognorms))
    if use_determinant:
        la, _ = dirichlet_det_batch(params, e(xs), 1, n)
        devs = np.abs(la - center)
    else:
        devs = np.abs(lognorms - center)
    fraction = float(np.mean(devs > delta * n))
    return LdtPoint(n=n, delta=delta, grid_size=grid, fraction=fraction,
                    predicted=math.exp(-delta * n),
                    use_determinant=use_determinant)
