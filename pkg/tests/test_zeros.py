import math

import numpy as np
import pytest

from cocyclelab.cocycle import det_evaluator, e
from cocyclelab.errors import DomainError
from cocyclelab.zeros import (
    ZeroSet,
    count_zeros_disk,
    count_zeros_rect,
    equidistribution_stats,
    jensen_average,
    locate_zeros,
    locate_zeros_in_disk,
    log_abs_evaluator,
    per_disk_count,
    star_discrepancy,
    zero_separation,
)


def root_evaluator(roots):
    roots = np.asarray(roots, complex)

    def ev(zs):
        zs = np.asarray(zs, complex)
        la = np.zeros(zs.shape)
        ph = np.ones(zs.shape, complex)
        for r in roots:
            d = zs - r
            a = np.abs(d)
            ok = a > 0
            la = np.where(ok, la + np.log(np.where(ok, a, 1.0)), -np.inf)
            ph = np.where(ok, ph * d / np.where(ok, a, 1.0), 0.0)
        return la, ph

    return ev


def make_zeroset(points, mults=None, rho=0.5):
    points = np.asarray(points, complex)
    if mults is None:
        mults = np.ones(len(points), dtype=int)
    return ZeroSet(zeros=points, residuals=np.zeros(len(points)),
                   multiplicities=np.asarray(mults, dtype=int),
                   window=(0, 0.0, 0.0), rho=rho, total_count=int(sum(mults)),
                   box_counts=(), incomplete=False)


def test_count_zeros_disk_single_root():
    ev = root_evaluator([0.3 + 0.2j])
    assert count_zeros_disk(ev, 0.3 + 0.2j, 0.05) == 1
    assert count_zeros_disk(ev, 2.0, 0.5) == 0


def test_count_zeros_disk_free_determinant_constant(free):
    # V = 0 at fixed non-eigenvalue E: f is constant in z, no zeros anywhere
    p = free.with_energy(0.5)
    ev = det_evaluator(p, 1, 32)
    assert count_zeros_disk(ev, 1.3, 0.1) == 0


def test_count_zeros_disk_degenerate_zero_function(free):
    # V = 0 at an exact eigenvalue: f vanishes identically in z
    E = -2.0 * math.cos(math.pi * 3.0 / 33.0)
    ev = det_evaluator(free.with_energy(E), 1, 32)
    with pytest.raises(DomainError):
        count_zeros_disk(ev, 1.0, 0.05)


def test_global_census_degree_count(am4):
    # f_N z^{N k0} is a polynomial of degree 2 N k0 with nonzero ends, so
    # the annulus census must find exactly 2 N zeros for the cosine case
    N = 70
    ev = det_evaluator(am4.with_energy(0.0), 1, N)
    total = count_zeros_disk(ev, 0.0, 1.2, n0=512) - count_zeros_disk(
        ev, 0.0, 0.8, n0=512)
    assert total == 2 * N


def test_count_conservation_under_subdivision():
    rng = np.random.default_rng(3)
    roots = rng.uniform(-1, 1, 9) + 1j * rng.uniform(-1, 1, 9)
    ev = root_evaluator(roots)
    x0, y0, w, h = -1.05, -1.03, 2.1, 2.08
    parent = count_zeros_rect(ev, x0, y0, w, h)
    quads = (count_zeros_rect(ev, x0, y0, w / 2, h / 2)
             + count_zeros_rect(ev, x0 + w / 2, y0, w / 2, h / 2)
             + count_zeros_rect(ev, x0, y0 + h / 2, w / 2, h / 2)
             + count_zeros_rect(ev, x0 + w / 2, y0 + h / 2, w / 2, h / 2))
    assert parent == len(roots) == quads


def test_locate_synthetic_quartic():
    ev = root_evaluator([1.0, -1.0, 1j, -1j])
    zs, ms, incomplete = locate_zeros_in_disk(ev, 0j, 1.5)
    assert not incomplete
    got = np.sort_complex(np.round(np.asarray(zs), 12))
    assert np.allclose(got, np.sort_complex(np.array([1, -1, 1j, -1j])),
                       atol=1e-12)
    assert ms == [1, 1, 1, 1]


def test_locate_zero_planted_at_eigenvalue(am4):
    # E equal to a Dirichlet eigenvalue at phase x makes z = e(x) a zero
    from cocyclelab.spectra import dirichlet_spectrum
    E = float(dirichlet_spectrum(am4, 0.0, 40).eigenvalues[17])
    ev = det_evaluator(am4.with_energy(E), 1, 40)
    zs, ms, _ = locate_zeros_in_disk(ev, 1.0 + 0j, 1e-3)
    assert len(zs) == 1
    assert abs(zs[0] - 1.0) <= 1e-9


def test_locate_zeros_annulus_census(am4):
    zs = locate_zeros(am4, 70, 0.0, 0.2)
    assert zs.total_count == 140
    assert zs.count() == 140
    assert not zs.incomplete
    assert sum(zs.box_counts) == zs.total_count
    assert np.max(zs.residuals) <= 1e-8
    assert np.max(np.abs(np.abs(zs.zeros) - 1.0)) <= 0.1


def test_zeroset_conjugation_symmetry(am4):
    zs = locate_zeros(am4, 48, 1.9, 0.2)
    pts = zs.zeros
    partner = 1.0 / np.conj(pts)
    d = np.min(np.abs(pts[:, None] - partner[None, :]), axis=0)
    assert np.max(d) <= 1e-8


def test_locate_zeros_rho_cap(am4):
    with pytest.raises(DomainError):
        locate_zeros(am4, 16, 0.0, 0.4)  # width/2 = 0.25


def test_jensen_single_interior_zero():
    ev = root_evaluator([0.31 + 0.17j])
    J = jensen_average(log_abs_evaluator(ev), 0.3 + 0.2j, 0.1, 0.02)
    assert abs(J.scaled() - 1.0) <= 5e-3
    assert J.value >= -1e-9


def test_jensen_harmonic_input_vanishes():
    J = jensen_average(lambda zs: np.asarray(zs).real, 0.5, 0.3, 0.1)
    assert abs(J.value) <= 1e-10


def test_jensen_sandwich_random_polynomials():
    rng = np.random.default_rng(11)
    for _ in range(25):
        k = int(rng.integers(1, 8))
        roots = rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)
        r1 = float(rng.uniform(0.2, 0.5))
        r2 = r1 * float(rng.uniform(0.08, 0.25))  # r2 <= r1/4
        z0 = complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2))
        ev = root_evaluator(roots)
        J = jensen_average(log_abs_evaluator(ev), z0, r1, r2)
        lo = int(np.sum(np.abs(roots - z0) <= r1 - r2))
        hi = int(np.sum(np.abs(roots - z0) <= r1 + r2))
        assert lo - 0.02 <= J.scaled() <= hi + 0.02


def test_jensen_sandwich_on_determinant(am4):
    p = am4.with_energy(0.0)
    ev = det_evaluator(p, 1, 70)
    z0 = complex(e(0.2))
    J = jensen_average(log_abs_evaluator(ev), z0, 0.05, 0.01)
    lo = count_zeros_disk(ev, z0, 0.04)
    hi = count_zeros_disk(ev, z0, 0.06)
    assert lo - 0.05 <= J.scaled() <= hi + 0.05


def test_zero_separation_quartic():
    zs = make_zeroset([1.0, -1.0, 1j, -1j])
    rep = zero_separation(zs)
    assert abs(rep.min_distance - math.sqrt(2.0)) <= 1e-12


def test_zero_separation_am_figure_case(am4):
    zs = locate_zeros(am4, 70, 0.0, 0.2)
    rep = zero_separation(zs)
    assert rep.min_distance > math.exp(-math.sqrt(70.0))


def test_near_double_zero_scan_flags_exception(am4):
    # scanning E reveals energies whose zero sets nearly collide, showing
    # the exceptional set is nonempty
    N = 16
    seps = {}
    for E in np.linspace(-1.0, 1.0, 9):
        zs = locate_zeros(am4, N, float(E), 0.2)
        if zs.count() >= 2:
            seps[float(E)] = zero_separation(zs).min_distance
    vals = np.array(sorted(seps.values()))
    assert vals[0] < 0.5 * np.median(vals)


def test_per_disk_counts():
    n = 140
    ring = np.exp(2j * np.pi * np.arange(n) / n)
    zs = make_zeroset(ring)
    half_spacing = abs(ring[1] - ring[0]) / 2.0
    assert per_disk_count(zs, half_spacing) == 1
    assert per_disk_count(zs, 2.5) == n
    cluster = make_zeroset([0.0, 1e-6, 1e-6j, 0.5])
    assert per_disk_count(cluster, 1e-5) == 3
    assert per_disk_count(make_zeroset([0.1], mults=[3]), 1e-9) == 3


def test_per_disk_stability_under_energy_perturbation(am4):
    a = locate_zeros(am4, 40, 0.7, 0.2)
    b = locate_zeros(am4, 40, 0.7 + 1e-10, 0.2)
    for r0 in (1e-4, 1e-3, 1e-2):
        assert per_disk_count(a, r0) == per_disk_count(b, r0)


def test_equidistribution_stats():
    n = 140
    ring = np.exp(2j * np.pi * (np.arange(n) + 0.13) / n)
    st = equidistribution_stats(make_zeroset(ring))
    assert st.angular_discrepancy <= 2.0 / math.sqrt(n) * math.log(n)
    assert st.radial_quantiles[1.0] <= 1e-12


def test_star_discrepancy_extremes():
    u = (np.arange(100) + 0.5) / 100.0
    assert star_discrepancy(u) <= 0.5 / 100 + 1e-12
    assert star_discrepancy(np.full(10, 0.5)) >= 0.45
