import math

import numpy as np
import pytest

from cocyclelab.cocycle import CocycleParams, TrigPotential, am_potential
from cocyclelab.errors import RegimeError
from cocyclelab.harness.experiments import _random_hyperbolic_chain
from cocyclelab.lyapunov import (
    ap_check,
    ap_extrapolate,
    finite_lyapunov,
    ldt_measure,
    uniform_upper_check,
)
from cocyclelab.scaledmat import normalize


def constant_params(c: float) -> CocycleParams:
    pot = TrigPotential(coupling=c, coeffs={0: 1.0}, degree=0)
    return CocycleParams(potential=pot, omega=np.sqrt(2.0) % 1.0, energy=0.0)


def constant_cocycle_log_norm_rate(c: float):
    """Exact asymptotics of (1/n) log||A^n|| for A = [[c, -1], [1, 0]]:
    log|mu_+| plus log||P_+||/n, P_+ the spectral projection."""
    mu_p = (c + math.sqrt(c * c - 4.0)) / 2.0
    mu_m = (c - math.sqrt(c * c - 4.0)) / 2.0
    a = np.array([[c, -1.0], [1.0, 0.0]])
    proj = (a - mu_m * np.eye(2)) / (mu_p - mu_m)
    return math.log(abs(mu_p)), math.log(np.linalg.norm(proj, 2))


def test_free_case_is_zero(free):
    for n, grid in ((10, 8), (100, 16)):
        est = finite_lyapunov(free, n, grid)
        assert abs(est.value) <= 1e-12


def test_constant_hyperbolic_closed_form():
    # E = 0, V = 3 gives the constant matrix [[3, -1], [1, 0]]; the exact
    # finite-n value carries a log||P_+||/n eigenprojection term (~1.5e-3
    # at n = 200), so the limit itself is only reached to that order
    p = constant_params(3.0)
    est = finite_lyapunov(p, 200, 8)
    lim, logp = constant_cocycle_log_norm_rate(3.0)
    assert abs(est.value - (lim + logp / 200.0)) <= 1e-9
    assert abs(est.value - lim) <= 2e-3
    assert est.std_error <= 1e-12  # no phase dependence


def test_am_supercritical_value(am4):
    # at an energy inside the spectrum the exponent equals log(coupling/2);
    # recomputed from a long product, not assumed
    from cocyclelab.spectra import dirichlet_spectrum
    w = dirichlet_spectrum(am4, 0.123, 512).eigenvalues
    E = float(w[len(w) // 2])
    est = finite_lyapunov(am4.with_energy(E), 4096, 128)
    assert abs(est.value - math.log(2.0)) <= 0.02


def test_ap_check_commuting_chain():
    m = normalize(np.diag([math.exp(10.0), math.exp(-10.0)]),
                  log_abs_det_raw=0.0)
    rep = ap_check([m] * 10, mu_floor=math.exp(10.0))
    assert rep.hypothesis_large and rep.hypothesis_diff
    # exact telescoping: any nonzero gap is pure rounding
    assert rep.lhs_rhs_gap <= 10 * 10 * math.exp(-10.0)


def test_ap_check_designed_cancellation():
    rng = np.random.default_rng(2)
    a = _random_hyperbolic_chain(rng, 1)[0]
    a_inv = normalize(np.linalg.inv(a.mantissa), -a.log_scale,
                      log_abs_det_raw=-a.log_det_mantissa)
    chain = [a, a_inv, a, a_inv]
    rep = ap_check(chain, mu_floor=math.exp(18.0))
    assert not rep.hypothesis_diff
    assert rep.lhs_rhs_gap is None


def test_ap_check_random_chains_defect():
    rng = np.random.default_rng(77)
    mu = math.exp(20.0)
    for _ in range(20):
        n = int(rng.integers(2, 120))
        rep = ap_check(_random_hyperbolic_chain(rng, n), mu_floor=mu)
        assert rep.hypothesis_large and rep.hypothesis_diff
        assert rep.lhs_rhs_gap <= 10.0 * n / mu


def test_ap_extrapolate_constant_cocycle_exact():
    p = constant_params(3.0)
    r = ap_extrapolate(p, 32, 1024, 8)
    lim, _ = constant_cocycle_log_norm_rate(3.0)
    # the 1/n eigenprojection terms cancel in 2 L_{2l} - L_l
    assert abs(r.value - lim) <= 1e-10


def test_ap_extrapolate_am(am4):
    r = ap_extrapolate(am4, 64, 4096, 512)
    assert r.difference <= 5e-3
    assert r.difference <= r.tolerance


def test_ap_extrapolate_subcritical_regime_error():
    p = CocycleParams(potential=am_potential(0.5), omega=np.sqrt(2.0) % 1.0,
                      energy=0.0)
    with pytest.raises(RegimeError):
        ap_extrapolate(p, 64, 4096, 64)


def test_uniform_upper_constant_cocycle():
    p = constant_params(3.0)
    for N in (64, 256):
        rep = uniform_upper_check(p, N, 64)
        assert rep.max_deviation <= 1.0


def test_uniform_upper_growth_slower_than_sqrt(am4):
    devs = {N: uniform_upper_check(am4, N, 512).max_deviation
            for N in (256, 512, 1024, 2048)}
    assert devs[2048] / devs[256] < (2048 / 256) ** 0.5
    # centering: the mean deviation vanishes by construction
    assert abs(uniform_upper_check(am4, 256, 64).mean_deviation) <= 1e-9


def test_ldt_constant_cocycle_no_deviation():
    p = constant_params(3.0)
    for delta in (0.01, 0.1, 1.0):
        assert ldt_measure(p, 128, delta, 256).fraction == 0.0


def test_ldt_exponential_decay(am4):
    n, grid = 512, 4096
    deltas = np.array([1, 2, 3, 4, 5, 6]) / n
    fracs = np.array([ldt_measure(am4, n, d, grid).fraction for d in deltas])
    pos = fracs > 0
    assert np.count_nonzero(pos) >= 3
    slope = np.polyfit(deltas[pos] * n, np.log(fracs[pos]), 1)[0]
    assert slope < -0.3


def test_ldt_zero_beyond_sup_deviation(am4):
    # consistency: no grid point deviates (two-sidedly) beyond the measured
    # sup of |log||M_n|| - n L_n| on the same grid
    from cocyclelab.cocycle import monodromy_lognorm_grid
    n, grid = 256, 512
    lognorms = monodromy_lognorm_grid(am4, n, np.arange(grid) / grid)
    sup_dev = np.max(np.abs(lognorms - np.mean(lognorms)))
    pt = ldt_measure(am4, n, (sup_dev + 0.5) / n, grid)
    assert pt.fraction == 0.0


def test_ldt_determinant_variant(am4):
    pt = ldt_measure(am4, 256, 8 / 256, 1024, use_determinant=True)
    assert 0.0 <= pt.fraction < 0.2


def test_subadditivity(am4):
    grid = 4096
    n = m = 32
    l_n = finite_lyapunov(am4, n, grid).value
    l_2n = finite_lyapunov(am4, n + m, grid).value
    assert (n + m) * l_2n <= n * l_n + m * l_n + 1e-3


def test_rate_of_convergence(am4):
    # n |L_2n - L_n| stays bounded with a stable constant across energies
    for E in (0.0, 1.5, -2.7):
        p = am4.with_energy(E)
        for n in (128, 256, 512):
            ln = finite_lyapunov(p, n, 1024).value
            l2n = finite_lyapunov(p, 2 * n, 1024).value
            assert n * abs(l2n - ln) <= 20.0


def test_y_lipschitz(am4):
    n, grid = 256, 1024
    ys = (0.0, 0.004, 0.008)
    vals = [finite_lyapunov(am4, n, grid, y=y).value for y in ys]
    for (y1, v1), (y2, v2) in zip(zip(ys, vals), list(zip(ys, vals))[1:]):
        assert abs(v2 - v1) <= 10.0 * abs(y2 - y1)
