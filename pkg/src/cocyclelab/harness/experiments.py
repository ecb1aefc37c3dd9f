"""The experiment catalog: named, reproducible recipes over the library.

Each experiment consumes a resolved config (see config.py), writes CSV /
JSON / SVG artifacts into the run directory, and leaves hashing to the
manifest writer.  Randomness (only sampling order and adversarial draws)
flows from the config seed; the numerics themselves are deterministic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import ids as ids_mod
from .. import lyapunov as lya
from .. import resonance as reso
from .. import spectra as spec_mod
from .. import zeros as zeros_mod
from ..cocycle import CocycleParams, det_evaluator, e
from ..errors import DomainError
from .config import ConfigError, build_params
from .io import RunContext, write_csv, write_json, write_text
from .svg import heatmap, scatter_annulus

__all__ = ["EXPERIMENTS", "run_experiment", "catalog"]


@dataclass(frozen=True)
class ExperimentDef:
    name: str
    description: str
    checks: str                    # the quantitative statement it probes
    param_docs: dict


def _pmap(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _params(resolved: dict, energy=0.0) -> CocycleParams:
    return build_params(resolved, energy=energy)


def _knob(resolved: dict, key: str, default):
    return resolved.get("params", {}).get(key, default)


def _energy_list(resolved: dict, default):
    es = _knob(resolved, "energies", default)
    return [float(x) for x in es]


def _hull(params: CocycleParams) -> float:
    return 2.0 + params.potential.sup_norm_real()


# ----------------------------------------------------------------- lyapunov

def run_lyapunov_sweep(resolved, ctx):
    p = _params(resolved)
    n = int(_knob(resolved, "n", 1024))
    grid = int(_knob(resolved, "grid", 256))
    y = float(_knob(resolved, "y", 0.0))
    hull = _hull(p)
    count = int(_knob(resolved, "energy_count", 65))
    energies = _energy_list(resolved, list(np.linspace(-hull, hull, count)))
    rows = []
    for E in energies:
        est = lya.finite_lyapunov(p.with_energy(E), n, grid, y=y)
        rows.append((est.n, E, 0.0, est.y, est.value, est.std_error))
    write_csv(ctx, "lyapunov.csv",
              ["n", "E_re", "E_im", "y", "L_n", "std_error"], rows)


def run_ldt(resolved, ctx):
    p = _params(resolved, energy=float(_knob(resolved, "energy", 0.0)))
    n = int(_knob(resolved, "n", 512))
    grid = int(_knob(resolved, "grid", 4096))
    deltas = [float(d) for d in _knob(resolved, "deltas",
                                      [0.01, 0.02, 0.04, 0.08, 0.16])]
    use_det = bool(_knob(resolved, "use_determinant", False))
    rows = []
    for d in deltas:
        pt = lya.ldt_measure(p, n, d, grid, use_determinant=use_det)
        rows.append((n, d, pt.fraction, pt.predicted))
    write_csv(ctx, "ldt.csv", ["n", "delta", "fraction", "predicted"], rows)


def _random_hyperbolic_chain(rng, n, lo=20.0, hi=25.0):
    from ..scaledmat import normalize
    out = []
    for _ in range(n):
        a, b = rng.uniform(0.0, 1.0, 2)
        s = rng.uniform(lo, hi)
        ra = np.array([[math.cos(2 * math.pi * a), -math.sin(2 * math.pi * a)],
                       [math.sin(2 * math.pi * a), math.cos(2 * math.pi * a)]])
        rb = np.array([[math.cos(2 * math.pi * b), -math.sin(2 * math.pi * b)],
                       [math.sin(2 * math.pi * b), math.cos(2 * math.pi * b)]])
        # SL(2) up to the carried scale: det of the raw product is e^{-2s}
        out.append(normalize(ra @ np.diag([1.0, math.exp(-2 * s)]) @ rb, s,
                             log_abs_det_raw=-2.0 * s))
    return out


def run_ap_check(resolved, ctx):
    rng = np.random.default_rng(int(resolved["seed"]))
    chains = int(_knob(resolved, "chains", 100))
    n = int(_knob(resolved, "chain_length", 100))
    mu = math.exp(float(_knob(resolved, "log_mu", 20.0)))
    rows = []
    worst = 0.0
    for i in range(chains):
        rep = lya.ap_check(_random_hyperbolic_chain(rng, n), mu_floor=mu)
        if rep.lhs_rhs_gap is not None:
            worst = max(worst, rep.c_implied)
        rows.append((i, rep.n, rep.mu, rep.hypothesis_large,
                     rep.hypothesis_diff,
                     rep.lhs_rhs_gap if rep.lhs_rhs_gap is not None else "",
                     rep.bound))
    write_csv(ctx, "ap_check.csv",
              ["chain", "n", "mu", "large_ok", "diff_ok", "gap", "bound"],
              rows)
    write_json(ctx, "ap_summary.json",
               {"chains": chains, "max_implied_constant": worst,
                "accept_constant": lya.AP_ACCEPT_CONSTANT})


def run_ap_extrapolate(resolved, ctx):
    p = _params(resolved)
    ell = int(_knob(resolved, "ell", 64))
    N = int(_knob(resolved, "N", 4096))
    grid = int(_knob(resolved, "grid", 512))
    energies = _energy_list(resolved, [0.0, 1.0, -1.0, 2.0, -2.0])
    rows = []
    for E in energies:
        r = lya.ap_extrapolate(p.with_energy(E), ell, N, grid)
        rows.append((E, ell, N, r.value, r.direct_value, r.difference,
                     r.tolerance))
    write_csv(ctx, "ap_extrapolate.csv",
              ["E", "ell", "N", "extrapolated", "direct", "difference",
               "tolerance"], rows)


def run_uniform_upper(resolved, ctx):
    p = _params(resolved, energy=float(_knob(resolved, "energy", 0.0)))
    grid = int(_knob(resolved, "grid", 512))
    Ns = [int(n) for n in _knob(resolved, "N_sweep", [256, 512, 1024, 2048])]
    rows = []
    for N in Ns:
        rep = lya.uniform_upper_check(p, N, grid)
        rows.append((N, grid, rep.max_deviation, rep.ratio_to_log_sq))
    write_csv(ctx, "uniform_upper.csv",
              ["N", "grid", "max_deviation", "ratio_to_log_sq"], rows)


# ------------------------------------------------------------------ spectra

def run_gaps(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 100))
    x_grid = int(_knob(resolved, "x_grid", 256))
    st = spec_mod.min_gap_stats(p, N, x_grid)
    write_csv(ctx, "min_gaps.csv", ["x_index", "min_gap"],
              list(enumerate(st.min_gaps)))
    write_json(ctx, "gaps_summary.json",
               {"N": N, "x_grid": x_grid, "quantiles": st.quantiles,
                "small_gap_fractions": st.small_gap_fractions})


def run_wegner(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 128))
    E = float(_knob(resolved, "energy", 0.37))
    x_grid = int(_knob(resolved, "x_grid", 2048))
    ladder = [float(h) for h in _knob(resolved, "H_ladder",
                                      [3, 4, 5, 6, 7, 8, 9, 10, 11, 12])]
    curve = spec_mod.wegner_count(p, N, E, ladder, x_grid)
    write_csv(ctx, "wegner.csv", ["H", "fraction"],
              list(zip(curve.H_values, curve.fractions)))
    write_json(ctx, "wegner_summary.json",
               {"N": N, "E": E, "x_grid": x_grid, "slope": curve.slope,
                "slope_times_log_sq": curve.slope_times_log_sq})


def run_localization(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 400))
    x = float(_knob(resolved, "x", 0.1234))
    discard_q = float(_knob(resolved, "discard_gap_quantile", 0.05))
    lyap_n = int(_knob(resolved, "lyap_n", 2048))
    sp = spec_mod.dirichlet_spectrum(p, x, N, want_vectors=True)
    gap_mins = np.minimum(np.append(sp.gaps, np.inf),
                          np.insert(sp.gaps, 0, np.inf))
    cut = np.quantile(gap_mins[np.isfinite(gap_mins)], discard_q)
    rows = []
    rates = []
    for j in range(N):
        if gap_mins[j] < cut:
            continue
        prof = spec_mod.localization(sp, j)
        rates.append(prof.decay_rate)
        for q, m in zip(prof.qs, prof.mass_outside):
            rows.append((j, sp.eigenvalues[j], prof.center, q, m))
    gamma = lya.finite_lyapunov(
        p.with_energy(float(np.median(sp.eigenvalues))), lyap_n, 64).value
    write_csv(ctx, "localization.csv",
              ["j", "E_j", "center", "Q", "tail_mass"], rows)
    write_json(ctx, "localization_summary.json",
               {"N": N, "x": x, "discard_gap_quantile": discard_q,
                "median_decay_rate": float(np.median(rates)),
                "lyapunov_at_median_energy": gamma})


def run_rellich(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 100))
    x_grid = int(_knob(resolved, "x_grid", 64))
    js = _knob(resolved, "j_list", None)
    rows = []
    for i in range(x_grid):
        x = i / x_grid
        sp = spec_mod.dirichlet_spectrum(p, x, N, want_vectors=True)
        idxs = range(N) if js is None else [int(j) for j in js]
        dv = None
        for j in idxs:
            psi = sp.eigenvectors[:, j]
            if dv is None:
                from ..cocycle import potential_eval_dx
                dv = potential_eval_dx(
                    p.potential, e(x) * p.rotations(np.arange(1, N + 1))).real
            rows.append((x, j, sp.eigenvalues[j],
                         float(np.sum(np.abs(psi) ** 2 * dv))))
    write_csv(ctx, "rellich.csv", ["x", "j", "E_j", "velocity"], rows)


# ---------------------------------------------------------------------- ids

def run_ids(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 512))
    x_grid = int(_knob(resolved, "x_grid", 128))
    hull = _hull(p) + 0.5
    count = int(_knob(resolved, "energy_count", 2048))
    lo = float(_knob(resolved, "energy_min", -hull))
    hi = float(_knob(resolved, "energy_max", hull))
    mode = _knob(resolved, "counting_mode", "exact-sturm")
    table = ids_mod.ids_table(p, N, x_grid, np.linspace(lo, hi, count),
                              counting_mode=mode)
    write_csv(ctx, "ids.csv", ["E", "N_of_E", "stderr"],
              zip(table.energy_grid, table.values, table.std_errors))
    return table


def run_holder(resolved, ctx):
    table = run_ids(resolved, ctx)
    etas = [float(x) for x in _knob(resolved, "etas",
                                    [2e-3, 5e-3, 1e-2, 2e-2, 5e-2])]
    k0 = _knob(resolved, "k0", None)
    rep = ids_mod.holder_scan(table, etas, k0=k0)
    write_csv(ctx, "holder.csv", ["eta", "sup_modulus"],
              zip(rep.etas, rep.sup_moduli))
    write_json(ctx, "holder_summary.json",
               {"exponent": rep.exponent, "flagged": rep.flagged, "k0": k0})


def run_lipschitz(resolved, ctx):
    table = run_ids(resolved, ctx)
    eta = float(_knob(resolved, "eta", 5e-3))
    q = float(_knob(resolved, "quantile", 0.05))
    rep = ids_mod.lipschitz_scan(table, eta, q)
    write_json(ctx, "lipschitz_summary.json",
               {"eta": rep.eta, "quantile": rep.quantile,
                "max_ratio": rep.max_ratio,
                "unrestricted_max_ratio": rep.unrestricted_max_ratio})


def run_thouless(resolved, ctx):
    p = _params(resolved)
    table = run_ids(resolved, ctx)
    energies = _energy_list(resolved, [-3.7, -2.5, -1.2, 0.0, 0.9, 1.8, 2.9,
                                       3.8])
    lyap_n = int(_knob(resolved, "lyap_n", table.N))
    lyap_grid = int(_knob(resolved, "lyap_grid", 128))

    def lyap(E):
        return lya.finite_lyapunov(p.with_energy(E), lyap_n, lyap_grid)

    rows = ids_mod.thouless_check(table, energies, lyap)
    write_csv(ctx, "thouless.csv", ["E", "integral", "lyapunov", "residual"],
              [(r.E, r.integral, r.lyapunov, r.residual) for r in rows])


def run_concat_bound(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 256))
    eta = float(_knob(resolved, "eta", 1.0 / 256))
    count = int(_knob(resolved, "count", 32))
    rng = np.random.default_rng(int(resolved["seed"]))
    hull = _hull(p)
    rows = []
    for _ in range(count):
        x = float(rng.uniform())
        E = float(rng.uniform(-hull, hull))
        cb = ids_mod.count_bound_check(p, x, N, E, eta)
        rows.append((x, E, cb.lhs, cb.rhs, cb.window[0], cb.window[1]))
    write_csv(ctx, "concat_bound.csv",
              ["x", "E", "count", "bound", "a", "b_end"], rows)
    write_json(ctx, "concat_bound_summary.json",
               {"N": N, "eta": eta, "cases": count, "all_hold": True})


# -------------------------------------------------------------------- zeros

def run_zeros_figure(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 70))
    rho = float(_knob(resolved, "rho", 0.2))
    budget = int(_knob(resolved, "budget", 4_000_000))
    energies = _energy_list(resolved, [0.0, 1.2])
    census = []
    for E in energies:
        zs = zeros_mod.locate_zeros(p, N, E, rho, budget=budget)
        tag = f"E{E:+.3f}".replace("+", "p").replace("-", "m").replace(".", "_")
        write_csv(ctx, f"zeros_{tag}.csv",
                  ["re", "im", "residual", "multiplicity"],
                  [(z.real, z.imag, r, m) for z, r, m in
                   zip(zs.zeros, zs.residuals, zs.multiplicities)])
        stats = zeros_mod.equidistribution_stats(zs)
        write_text(ctx, f"zeros_{tag}.svg",
                   scatter_annulus(zs.zeros, rho,
                                   title=f"N={N} E={E:+.3f} "
                                         f"count={zs.count()}"))
        census.append({"E": E, "total_count": zs.total_count,
                       "located": zs.count(),
                       "angular_discrepancy": stats.angular_discrepancy,
                       "radial_quantiles": stats.radial_quantiles,
                       "incomplete": zs.incomplete})
    write_json(ctx, "zeros_census.json", {"N": N, "rho": rho,
                                          "census": census})


def run_jensen(resolved, ctx):
    rng = np.random.default_rng(int(resolved["seed"]))
    synth = int(_knob(resolved, "synthetic_cases", 100))
    results = []
    violations = 0
    for _ in range(synth):
        k = int(rng.integers(1, 7))
        roots = rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)
        r1 = float(rng.uniform(0.2, 0.5))
        r2 = r1 * float(rng.uniform(0.1, 0.24))
        z0 = complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        ev = _root_evaluator(roots)
        J = zeros_mod.jensen_average(zeros_mod.log_abs_evaluator(ev), z0,
                                     r1, r2)
        lo = int(np.sum(np.abs(roots - z0) <= r1 - r2))
        hi = int(np.sum(np.abs(roots - z0) <= r1 + r2))
        ok = lo - 0.02 <= J.scaled() <= hi + 0.02
        violations += not ok
        results.append({"scaled": J.scaled(), "nu_lo": lo, "nu_hi": hi,
                        "ok": bool(ok)})
    p = _params(resolved, energy=float(_knob(resolved, "energy", 0.0)))
    N = int(_knob(resolved, "N", 70))
    ev = det_evaluator(p, 1, N)
    z0 = complex(e(float(_knob(resolved, "x0", 0.2))))
    r1, r2 = float(_knob(resolved, "r1", 0.05)), float(_knob(resolved, "r2", 0.01))
    J = zeros_mod.jensen_average(zeros_mod.log_abs_evaluator(ev), z0, r1, r2)
    lo = zeros_mod.count_zeros_disk(ev, z0, r1 - r2)
    hi = zeros_mod.count_zeros_disk(ev, z0, r1 + r2)
    write_json(ctx, "jensen_summary.json",
               {"synthetic_cases": synth, "violations": violations,
                "determinant_case": {"N": N, "scaled": J.scaled(),
                                     "nu_lo": lo, "nu_hi": hi}})


def _root_evaluator(roots):
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


def run_separation(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 70))
    rho = float(_knob(resolved, "rho", 0.2))
    energies = _energy_list(resolved, list(np.linspace(-1.5, 1.5, 8)))
    rows = []
    for E in energies:
        zs = zeros_mod.locate_zeros(p, N, E, rho)
        rep = zeros_mod.zero_separation(zs)
        rows.append((E, rep.min_distance,
                     math.exp(-N ** 0.3), math.exp(-N ** 0.5)))
    write_csv(ctx, "separation.csv",
              ["E", "min_distance", "thresh_delta_0_3", "thresh_delta_0_5"],
              rows)


def run_per_disk(resolved, ctx):
    p = _params(resolved)
    N = int(_knob(resolved, "N", 70))
    rho = float(_knob(resolved, "rho", 0.2))
    a_ladder = [float(a) for a in _knob(resolved, "A_ladder", [1.5, 2.0, 3.0])]
    energies = _energy_list(resolved, list(np.linspace(-1.8, 1.8, 16)))
    k0 = p.potential.degree
    out = []
    worst = 0
    for E in energies:
        zs = zeros_mod.locate_zeros(p, N, E, rho)
        per_a = {}
        for A in a_ladder:
            r0 = math.exp(-math.log(N) ** A)
            c = zeros_mod.per_disk_count(zs, r0)
            per_a[f"A={A}"] = c
            worst = max(worst, c)
        out.append({"E": E, "counts": per_a})
    write_json(ctx, "per_disk.json",
               {"N": N, "k0": k0, "bound_2k0": 2 * k0, "worst": worst,
                "cases": out})


def run_resonance_scan(resolved, ctx):
    p = _params(resolved)
    l1 = int(_knob(resolved, "l1", 24))
    l2 = int(_knob(resolved, "l2", 24))
    t = int(_knob(resolved, "t", 200))
    x0 = float(_knob(resolved, "x0", 0.0))
    r = float(_knob(resolved, "r", 0.05))
    om_lo = float(_knob(resolved, "omega_min", 0.38))
    om_hi = float(_knob(resolved, "omega_max", 0.45))
    om_n = int(_knob(resolved, "omega_count", 8))
    e_lo = float(_knob(resolved, "energy_min", -1.0))
    e_hi = float(_knob(resolved, "energy_max", 1.0))
    e_n = int(_knob(resolved, "energy_count", 8))
    field = reso.double_resonance_scan(
        p, l1, l2, t, x0, np.linspace(om_lo, om_hi, om_n),
        np.linspace(e_lo, e_hi, e_n), r)
    rows = []
    for i, om in enumerate(field.omega_grid):
        for j, en in enumerate(field.energy_grid):
            rows.append((om, en, field.distances[i, j]))
    write_csv(ctx, "resonance_field.csv", ["omega", "E", "distance"], rows)
    logd = np.where(np.isfinite(field.distances),
                    np.log10(np.maximum(field.distances, 1e-300)), np.nan)
    write_text(ctx, "resonance_field.svg",
               heatmap(logd, field.omega_grid, field.energy_grid,
                       title=f"log10 zero-set distance l1={l1} t={t}"))
    write_json(ctx, "resonance_summary.json",
               {"tau_ladder": field.tau_ladder,
                "sublevel_measures": field.sublevel_measures,
                "cell_area": field.cell_area, "params": field.params})


EXPERIMENTS = {
    "lyapunov-sweep": ExperimentDef(
        "lyapunov-sweep",
        "Finite-volume Lyapunov exponent over an energy grid",
        "L_n(E) = <(1/n) log||M_n||> with standard errors",
        {"n": "window length", "grid": "phase grid size",
         "energies": "explicit energy list", "energy_count": "grid size",
         "y": "imaginary phase offset"}),
    "ldt": ExperimentDef(
        "ldt", "Large-deviation measure of log||M_n|| around n L_n",
        "fraction{ |log||M_n(x)|| - n L_n| > delta n } decays ~ exp(-c delta n)",
        {"n": "window length", "grid": "phase grid", "deltas": "delta ladder",
         "use_determinant": "measure the determinant instead of the norm"}),
    "ap-check": ExperimentDef(
        "ap-check", "Avalanche-principle defect on random hyperbolic chains",
        "|log||prod A|| + sum_mid log||A_j|| - sum log||A_{j+1}A_j||| <= C n/mu",
        {"chains": "number of chains", "chain_length": "factors per chain",
         "log_mu": "log of the minimal factor norm"}),
    "ap-extrapolate": ExperimentDef(
        "ap-extrapolate", "Length-doubling Lyapunov extrapolation",
        "L_N ~ 2 L_{2l} - L_l, cross-validated against the direct average",
        {"ell": "base scale", "N": "target scale", "grid": "phase grid",
         "energies": "energy list"}),
    "uniform-upper": ExperimentDef(
        "uniform-upper", "Sup over phases of log||M_N|| minus N L_N",
        "sup_x log||M_N(x)|| - N L_N grows like a power of log N",
        {"N_sweep": "window lengths", "grid": "phase grid",
         "energy": "spectral parameter"}),
    "ids": ExperimentDef(
        "ids", "Integrated density of states table",
        "N_N(E) = <(1/N) #{eigenvalues < E}>_x, monotone in [0,1]",
        {"N": "volume", "x_grid": "phase samples", "energy_count": "grid",
         "counting_mode": "exact-sturm | eigenvalue-list"}),
    "holder": ExperimentDef(
        "holder", "Holder modulus scan of the IDS",
        "sup_E N(E+eta)-N(E-eta) ~ eta^alpha with alpha near 1/(2 k0)",
        {"etas": "eta ladder", "k0": "potential degree for the flag"}),
    "lipschitz": ExperimentDef(
        "lipschitz", "Trimmed Lipschitz ratio of the IDS",
        "off a small trimmed set, (N(E+eta)-N(E-eta))/eta stays bounded",
        {"eta": "increment", "quantile": "discard fraction"}),
    "thouless": ExperimentDef(
        "thouless", "Lyapunov exponent against the IDS log-potential",
        "L(E) = int log|E-E'| dN(E') (residuals at sample energies)",
        {"energies": "sample energies", "lyap_n": "Lyapunov window"}),
    "gaps": ExperimentDef(
        "gaps", "Minimal-gap statistics of Dirichlet spectra",
        "gaps stay positive; small-gap fraction vs exp(-N^delta) ladder",
        {"N": "volume", "x_grid": "phase samples"}),
    "wegner": ExperimentDef(
        "wegner", "Phase measure of near-resonances with a fixed energy",
        "mes{x: dist(sp H_N(x), E) < exp(-H)} decays in H",
        {"N": "volume", "energy": "target energy", "H_ladder": "H values",
         "x_grid": "phase samples"}),
    "localization": ExperimentDef(
        "localization", "Eigenvector tail masses around localization centers",
        "tail mass beyond Q sites decays like exp(-Q gamma / 4)",
        {"N": "volume", "x": "phase", "discard_gap_quantile":
            "trimmed fraction of near-degenerate eigenvalues"}),
    "rellich": ExperimentDef(
        "rellich", "Phase velocity of Dirichlet eigenvalue branches",
        "dE_j/dx by first-order perturbation; small-velocity fractions",
        {"N": "volume", "x_grid": "phase samples", "j_list": "branches"}),
    "zeros-figure": ExperimentDef(
        "zeros-figure", "Determinant zeros in the complexified phase annulus",
        "2 N k0 zeros concentrate near |z|=1, angularly equidistributed",
        {"N": "window length", "energies": "energy list", "rho":
            "annulus half-width", "budget": "evaluation budget"}),
    "jensen": ExperimentDef(
        "jensen", "Jensen disk-average sandwich of zero counts",
        "nu(r1-r2) <= 4 r1^2/r2^2 J <= nu(r1+r2)",
        {"synthetic_cases": "random polynomial cases", "N": "window",
         "x0": "disk center phase", "r1": "outer radius", "r2": "inner"}),
    "separation": ExperimentDef(
        "separation", "Minimal distance between determinant zeros",
        "min pairwise distance against the exp(-N^delta) ladder",
        {"N": "window length", "energies": "energy list"}),
    "per-disk": ExperimentDef(
        "per-disk", "Max zero count in small disks",
        "no disk of radius exp(-(log N)^A) holds more than 2 k0 zeros",
        {"N": "window length", "A_ladder": "radius exponents",
         "energies": "energy list"}),
    "resonance-scan": ExperimentDef(
        "resonance-scan", "Double-resonance zero-set separation field",
        "dist(Z(f_l1), Z(f_l2 shifted by t w)) stays above a threshold off "
        "a small (omega, E) set",
        {"l1": "first window", "l2": "second window", "t": "shift",
         "omega_count": "grid", "energy_count": "grid", "r": "disk radius"}),
    "concat-bound": ExperimentDef(
        "concat-bound", "Eigenvalue count against concatenation-term sums",
        "#{sp H cap (E-eta, E+eta)} <= 4 eta sum_k W_{N,k}, hard assert",
        {"N": "volume", "eta": "half-width", "count": "random cases"}),
}

_RUNNERS = {
    "lyapunov-sweep": run_lyapunov_sweep,
    "ldt": run_ldt,
    "ap-check": run_ap_check,
    "ap-extrapolate": run_ap_extrapolate,
    "uniform-upper": run_uniform_upper,
    "ids": run_ids,
    "holder": run_holder,
    "lipschitz": run_lipschitz,
    "thouless": run_thouless,
    "gaps": run_gaps,
    "wegner": run_wegner,
    "localization": run_localization,
    "rellich": run_rellich,
    "zeros-figure": run_zeros_figure,
    "jensen": run_jensen,
    "separation": run_separation,
    "per-disk": run_per_disk,
    "resonance-scan": run_resonance_scan,
    "concat-bound": run_concat_bound,
}


def catalog() -> dict:
    return {name: {"description": d.description, "checks": d.checks,
                   "params": d.param_docs}
            for name, d in sorted(EXPERIMENTS.items())}


def run_experiment(resolved: dict, ctx: RunContext):
    name = resolved["experiment"]
    if name not in _RUNNERS:
        raise ConfigError(f"unknown experiment {name!r}; "
                          f"known: {', '.join(sorted(_RUNNERS))}")
    _RUNNERS[name](resolved, ctx)
