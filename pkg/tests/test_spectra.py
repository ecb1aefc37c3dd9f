import math

import numpy as np
import pytest

from cocyclelab.cocycle import e, potential_eval, potential_eval_dx
from cocyclelab.errors import DomainError
from cocyclelab.spectra import (
    characteristic_consistency,
    dirichlet_diagonal,
    dirichlet_spectrum,
    localization,
    min_gap_stats,
    rellich_velocity,
    sturm_count,
    wegner_count,
)


def test_free_laplacian_closed_form(free):
    sp = dirichlet_spectrum(free, 0.3, 100)
    exact = -2.0 * np.cos(np.arange(1, 101) * np.pi / 101.0)
    assert np.max(np.abs(sp.eigenvalues - np.sort(exact))) <= 1e-10


def test_single_site(am4):
    sp = dirichlet_spectrum(am4, 0.21, 1)
    want = potential_eval(am4.potential, complex(e(0.21)) * complex(am4.rotations(1)))
    assert abs(sp.eigenvalues[0] - want.real) < 1e-14


def test_cubic_against_companion_oracle(am4):
    x = 0.1
    d = dirichlet_diagonal(am4, x, 3)
    # char poly of tridiag(d, -1): expand in E and take numpy roots
    # f(E) = (d1-E)(d2-E)(d3-E) - (d1-E) - (d3-E)
    p1 = np.polynomial.Polynomial([d[0], -1.0])
    p2 = np.polynomial.Polynomial([d[1], -1.0])
    p3 = np.polynomial.Polynomial([d[2], -1.0])
    f = p1 * p2 * p3 - p1 - p3
    roots = np.sort(f.roots().real)
    sp = dirichlet_spectrum(am4, x, 3)
    assert np.max(np.abs(sp.eigenvalues - roots)) <= 1e-9


def test_eigenpair_residuals_and_orthonormality(am4):
    sp = dirichlet_spectrum(am4, 0.37, 160, want_vectors=True)
    n = sp.N
    h = (np.diag(dirichlet_diagonal(am4, 0.37, n))
         - np.diag(np.ones(n - 1), 1) - np.diag(np.ones(n - 1), -1))
    res = np.max(np.abs(h @ sp.eigenvectors - sp.eigenvectors * sp.eigenvalues))
    scale = np.linalg.norm(h, 2) + np.max(np.abs(sp.eigenvalues))
    assert res <= 1e-10 * scale
    assert np.max(np.abs(sp.eigenvectors.T @ sp.eigenvectors - np.eye(n))) <= 1e-10


def test_characteristic_consistency_free(free):
    ratio, _ = characteristic_consistency(dirichlet_spectrum(free, 0.0, 10),
                                          free)
    assert ratio <= 1e-8


def test_characteristic_consistency_am(am4):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(16):
        sp = dirichlet_spectrum(am4, float(rng.uniform()), 100)
        ratio, _ = characteristic_consistency(sp, am4)
        worst = max(worst, ratio)
    assert worst <= 1e-6


def test_eigenvalue_perturbation_raises_determinant(am4):
    from cocyclelab.cocycle import dirichlet_det_E_batch
    sp = dirichlet_spectrum(am4, 0.3, 100)
    E = sp.eigenvalues[40]
    z = complex(e(0.3))
    la, _ = dirichlet_det_E_batch(am4, z, 1, 100, [E, E + 1e-3])
    assert la[1] - la[0] >= math.log(100.0)  # simple zeros: |f| rises fast


def test_localization_extended_free_states(free):
    sp = dirichlet_spectrum(free, 0.0, 64, want_vectors=True)
    prof = localization(sp, 30)
    q_idx = int(np.searchsorted(prof.qs, 16))
    assert prof.mass_outside[q_idx] >= 0.2  # sine waves do not localize
    assert prof.mass_outside[0] <= 1.0
    assert np.all(np.diff(prof.mass_outside) <= 1e-15)


def test_localization_am_tail_bound(am4):
    # tail mass beyond 50 sites below exp(-50 gamma / 4) for >= 90% of
    # eigenvectors once the worst 5% of gaps are discarded
    gamma = math.log(2.0)
    sp = dirichlet_spectrum(am4, 0.1234, 400, want_vectors=True)
    gap_mins = np.minimum(np.append(sp.gaps, np.inf),
                          np.insert(sp.gaps, 0, np.inf))
    cut = np.quantile(gap_mins[np.isfinite(gap_mins)], 0.05)
    sites = np.arange(1, 401)
    passes = total = 0
    for j in range(400):
        if gap_mins[j] < cut:
            continue
        total += 1
        prof = localization(sp, j)
        mass = np.sum(np.abs(sp.eigenvectors[:, j])[np.abs(sites - prof.center) > 50] ** 2)
        passes += mass <= math.exp(-50.0 * gamma / 4.0)
    assert passes >= 0.9 * total


def test_min_gap_free_closed_form(free):
    st = min_gap_stats(free, 50, 4)
    exact = -2.0 * np.cos(np.arange(1, 51) * np.pi / 51.0)
    want = np.min(np.diff(np.sort(exact)))
    assert np.max(np.abs(st.min_gaps - want)) <= 1e-10


def test_min_gap_am_quantiles(am4):
    st = min_gap_stats(am4, 100, 256)
    assert np.all(st.min_gaps > 0.0)
    assert st.small_gap_fractions[0.5] <= 0.1


def test_wegner_outside_hull(am4):
    curve = wegner_count(am4, 64, 12.0, [1, 3, 5], 64)
    assert np.all(curve.fractions == 0.0)


def test_wegner_free_even_case(free):
    # N even: the spectrum stays a fixed cosine gap away from E = 0
    exact_gap = 2.0 * abs(math.cos(4 * math.pi / 9.0))
    curve = wegner_count(free, 8, 0.0, [2, 5, 9], 16)
    assert math.exp(-2.0) < exact_gap  # sanity on the chosen ladder
    assert np.all(curve.fractions == 0.0)


def test_wegner_decay_slope(am4):
    curve = wegner_count(am4, 128, 0.37, list(range(3, 13)), 2048)
    assert curve.slope is not None and curve.slope < 0.0
    assert abs(curve.slope) >= 1.0 / math.log(128) ** 2


def test_rellich_free_is_flat(free):
    assert rellich_velocity(free, 0.3, 20, 7) == 0.0


def test_rellich_single_site_closed_form(am4):
    got = rellich_velocity(am4, 0.11, 1, 0)
    want = potential_eval_dx(am4.potential,
                             complex(e(0.11)) * complex(am4.rotations(1))).real
    assert abs(got - want) <= 1e-4 * max(1.0, abs(want))


def test_rellich_matches_finite_difference(am4):
    sp = dirichlet_spectrum(am4, 0.2, 60)
    for j in (5, 30, 55):
        hf = rellich_velocity(am4, 0.2, 60, j)
        up = dirichlet_spectrum(am4, 0.2 + 1e-6, 60).eigenvalues[j]
        dn = dirichlet_spectrum(am4, 0.2 - 1e-6, 60).eigenvalues[j]
        fd = (up - dn) / 2e-6
        assert abs(hf - fd) <= 1e-4 * max(abs(hf), abs(fd), 1.0)
    assert sp.N == 60


def test_rellich_small_velocity_fraction(am4):
    # velocities rarely dip below exp(-N^0.3)
    N, x_grid = 100, 64
    thresh = math.exp(-N ** 0.3)
    small = total = 0
    dv_cache = {}
    for i in range(x_grid):
        x = i / x_grid
        sp = dirichlet_spectrum(am4, x, N, want_vectors=True)
        dv = potential_eval_dx(am4.potential,
                               e(x) * am4.rotations(np.arange(1, N + 1))).real
        vel = (np.abs(sp.eigenvectors) ** 2).T @ dv
        small += int(np.sum(np.abs(vel) < thresh))
        total += N
        dv_cache[i] = dv
    assert small / total <= 0.05


def test_interlacing(am4):
    # strict in exact arithmetic, but localized states make interlacing
    # differences exponentially small, far below eigenvalue accuracy
    sp_full = dirichlet_spectrum(am4, 0.41, 200)
    sp_sub = dirichlet_spectrum(am4, 0.41, 199)
    w, v = sp_full.eigenvalues, sp_sub.eigenvalues
    tol = 1e-10 * (2.0 + np.max(np.abs(w)))
    assert np.all(w[:-1] <= v + tol) and np.all(v <= w[1:] + tol)


def test_trace_identity(am4):
    for N in (10, 100):
        sp = dirichlet_spectrum(am4, 0.29, N)
        diag = dirichlet_diagonal(am4, 0.29, N)
        assert abs(np.sum(sp.eigenvalues) - np.sum(diag)) <= 1e-9 * N


def test_weyl_comparison_window_counts(am4):
    # counts in an interval change by at most the number of removed sites
    N = 120
    diag = dirichlet_diagonal(am4, 0.05, N)
    for (a, b) in ((2, 1), (2, 2), (1, 2)):
        sub = diag[a - 1: N - b + 1]
        for E in (-2.0, 0.0, 1.5):
            full = int(sturm_count(diag, E + 0.5) - sturm_count(diag, E - 0.5))
            wind = int(sturm_count(sub, E + 0.5) - sturm_count(sub, E - 0.5))
            assert abs(full - wind) <= 2 + (a - 1) + (b - 1)


def test_sturm_count_matches_eigenvalue_list(am4):
    diag = dirichlet_diagonal(am4, 0.17, 64)
    sp = dirichlet_spectrum(am4, 0.17, 64)
    for E in np.linspace(-6.5, 6.5, 23):
        assert int(sturm_count(diag, E)) == int(np.sum(sp.eigenvalues < E))


def test_spectrum_input_validation(am4):
    with pytest.raises(DomainError):
        dirichlet_spectrum(am4, 0.0, 0)
