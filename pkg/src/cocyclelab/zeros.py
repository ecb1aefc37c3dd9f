"""Zeros of Dirichlet determinants in the complexified phase variable.

Everything here works with log-scale pointwise evaluation only: an
*evaluator* is a callable mapping an ndarray of complex points to a pair
``(log_abs, unit_phase)``.  Coefficient extraction is never used (the
Laurent coefficients of a length-N determinant span exp(+-gamma N) and
are numerically hostile); zero counts come from the argument principle
with adaptive phase tracking, locations from quadtree subdivision plus
Newton refinement, and Jensen disk-averages sandwich the counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import CocycleParams, det_evaluator
from .errors import (
    BudgetExceeded,
    ContourInstability,
    DomainError,
    QuadratureError,
)

__all__ = [
    "ZeroSet",
    "JensenAverage",
    "SeparationReport",
    "EquidistributionStats",
    "count_zeros_disk",
    "count_zeros_rect",
    "locate_zeros",
    "locate_zeros_in_disk",
    "jensen_average",
    "log_abs_evaluator",
    "zero_separation",
    "per_disk_count",
    "equidistribution_stats",
    "star_discrepancy",
]


@dataclass(frozen=True)
class ZeroSet:
    """Located zeros with refinement residuals and multiplicities."""

    zeros: np.ndarray
    residuals: np.ndarray
    multiplicities: np.ndarray
    window: tuple
    rho: float
    total_count: int
    box_counts: tuple
    incomplete: bool

    def count(self) -> int:
        return int(np.sum(self.multiplicities))


@dataclass(frozen=True)
class JensenAverage:
    z0: complex
    r1: float
    r2: float
    value: float

    def scaled(self) -> float:
        """4 r1^2/r2^2 J, the quantity sandwiched by zero counts."""
        return 4.0 * self.r1 ** 2 / self.r2 ** 2 * self.value


@dataclass(frozen=True)
class SeparationReport:
    min_distance: float
    nn_distances: np.ndarray
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray


@dataclass(frozen=True)
class EquidistributionStats:
    radial_quantiles: dict
    angular_discrepancy: float
    count: int


class _Budget:
    """Mutable evaluation budget shared across one location run."""

    def __init__(self, limit: int):
        self.limit = int(limit)
        self.used = 0

    def spend(self, n: int):
        self.used += int(n)
        if self.used > self.limit:
            raise BudgetExceeded(
                f"zero location budget of {self.limit} evaluations exhausted")


def _wrap(d):
    return (d + np.pi) % (2.0 * np.pi) - np.pi


_MAX_TURN = np.pi / 4.0


def _winding_path(ev, path, n0: int = 64, max_points: int = 16384,
                  budget: _Budget | None = None) -> float:
    """Total argument increment / 2 pi along a closed path.

    ``path`` maps parameters in [0, 1) to points on the curve.  Segments
    whose phase increment exceeds pi/4 are bisected until the turn bound
    holds everywhere, which pins the winding without unwrapping ambiguity.
    """
    ts = np.arange(n0) / n0
    pts = path(ts)
    la, ph = ev(pts)
    if budget is not None:
        budget.spend(len(ts))
    if np.all(la == -np.inf):
        raise DomainError("evaluator vanishes on the whole contour")
    if np.any(~np.isfinite(la)):
        raise ContourInstability("exact zero on the contour sample")
    args = np.angle(ph)
    while True:
        d = _wrap(np.diff(args, append=args[:1]))
        bad = np.abs(d) > _MAX_TURN
        if not np.any(bad):
            break
        if len(ts) >= max_points:
            raise ContourInstability(
                "contour refinement exceeded the per-contour point budget")
        gaps = np.diff(ts, append=ts[:1] + 1.0)
        new_ts = (ts[bad] + 0.5 * gaps[bad]) % 1.0
        new_pts = path(new_ts)
        new_la, new_ph = ev(new_pts)
        if budget is not None:
            budget.spend(len(new_ts))
        if np.any(~np.isfinite(new_la)):
            raise ContourInstability("exact zero on the refined contour")
        ts = np.concatenate([ts, new_ts])
        args = np.concatenate([args, np.angle(new_ph)])
        order = np.argsort(ts)
        ts = ts[order]
        args = args[order]
    return float(np.sum(d) / (2.0 * np.pi))


def _snap(w: float) -> int | None:
    k = round(w)
    return int(k) if abs(w - k) < 0.25 else None


def count_zeros_disk(ev, z0: complex, r: float, n0: int = 64,
                     budget: _Budget | None = None) -> int:
    """Zeros inside D(z0, r) by the argument principle.

    The radius is nudged by up to 1e-10 (relative) and the base sampling
    doubled up to three times before giving up on an unstable contour.
    """
    z0 = complex(z0)
    last_err = None
    for attempt in range(4):
        rr = r * (1.0 + 1e-10 * attempt)
        path = lambda ts, rr=rr: z0 + rr * np.exp(2j * np.pi * ts)
        try:
            w = _winding_path(ev, path, n0=n0 * 2 ** attempt, budget=budget)
        except ContourInstability as err:
            last_err = err
            continue
        k = _snap(w)
        if k is not None:
            return k
        last_err = ContourInstability(f"winding {w} is not near an integer")
    raise last_err


def _rect_path(x0, y0, w, h):
    per = 2.0 * (w + h)
    c1 = w / per
    c2 = (w + h) / per
    c3 = (2 * w + h) / per

    def path(ts):
        ts = np.asarray(ts)
        pts = np.empty(ts.shape, dtype=complex)
        m = ts < c1
        pts[m] = x0 + ts[m] * per + 1j * y0
        m = (ts >= c1) & (ts < c2)
        pts[m] = x0 + w + 1j * (y0 + (ts[m] - c1) * per)
        m = (ts >= c2) & (ts < c3)
        pts[m] = x0 + w - (ts[m] - c2) * per + 1j * (y0 + h)
        m = ts >= c3
        pts[m] = x0 + 1j * (y0 + h - (ts[m] - c3) * per)
        return pts

    return path


def count_zeros_rect(ev, x0: float, y0: float, w: float, h: float,
                     n0: int = 32, budget: _Budget | None = None) -> int:
    """Zeros inside an axis-aligned rectangle, argument principle again."""
    last_err = None
    for attempt in range(4):
        pad = 1e-10 * max(w, h) * attempt
        path = _rect_path(x0 - pad, y0 - pad, w + 2 * pad, h + 2 * pad)
        try:
            wind = _winding_path(ev, path, n0=n0 * 2 ** attempt, budget=budget)
        except ContourInstability as err:
            last_err = err
            continue
        k = _snap(wind)
        if k is not None:
            return k
        last_err = ContourInstability(f"winding {wind} is not near an integer")
    raise last_err


def _scaled_ratio(la_num, ph_num, la_den, ph_den) -> complex:
    """exp(la_num - la_den) * ph_num / ph_den, safe in log scale."""
    if ph_den == 0:
        raise ZeroDivisionError
    return math.exp(la_num - la_den) * ph_num / ph_den


def _newton_refine(ev, z: complex, scale: float,
                   budget: _Budget | None = None):
    """Newton iteration on a log-scale evaluator; derivative by central
    differences with step 1e-7 * current scale."""
    step_scale = scale
    for _ in range(80):
        h = 1e-7 * max(step_scale, abs(z) * 1e-9, 1e-300)
        pts = np.array([z, z + h, z - h], dtype=complex)
        la, ph = ev(pts)
        if budget is not None:
            budget.spend(3)
        if not np.isfinite(la[0]):
            return z, True  # landed exactly on the zero
        common = max(la[1], la[2])
        if not np.isfinite(common):
            return z, False
        diff = (math.exp(la[1] - common) * ph[1]
                - math.exp(la[2] - common) * ph[2])
        if diff == 0:
            return z, False
        log_fp = common + math.log(abs(diff)) - math.log(2.0 * h)
        ph_fp = diff / abs(diff)
        try:
            delta = -_scaled_ratio(la[0], ph[0], log_fp, ph_fp)
        except (OverflowError, ZeroDivisionError):
            return z, False
        z = z + delta
        step_scale = abs(delta)
        if step_scale < 1e-15 * (1.0 + abs(z)):
            return z, True
    return z, False


def _residual(ev, z: complex, probe: float = 1e-4,
              budget: _Budget | None = None) -> float:
    """|f(z)| relative to the max of |f| on a small circle around z."""
    ring = z + probe * np.exp(2j * np.pi * np.arange(16) / 16.0)
    la_ring, _ = ev(ring)
    la_z, _ = ev(np.array([z], dtype=complex))
    if budget is not None:
        budget.spend(17)
    top = float(np.max(la_ring))
    if not np.isfinite(la_z[0]):
        return 0.0
    return math.exp(float(la_z[0]) - top)


def _split_fraction(x0: float, y0: float, size: float) -> float:
    # deterministic pseudo-random split point keeps zeros off box edges
    s = math.sin(12.9898 * x0 + 78.233 * y0 + 37.719 * size) * 43758.5453
    return 0.45 + 0.1 * (s - math.floor(s))


def _split_box(ev, x0, y0, w, h, c_parent, budget):
    """Split a box and count each child independently.

    Child counts are each snap-verified, so a sum mismatch against the
    parent can only mean a zero sat on a child edge and some contour got
    perturbed across it; retrying with a different interior split point
    resolves that.  After the retries the measured child counts win (the
    parent count is the one that saw the zero closest to its boundary).
    """
    for attempt in range(3):
        fx = _split_fraction(x0 + 0.61 * attempt, y0, max(w, h))
        fy = _split_fraction(y0 + 0.61 * attempt, x0, max(w, h))
        xs = (x0, x0 + w * fx)
        ys = (y0, y0 + h * fy)
        ws = (w * fx, w * (1 - fx))
        hs = (h * fy, h * (1 - fy))
        children = [(xs[ix], ys[iy], ws[ix], hs[iy])
                    for ix in range(2) for iy in range(2)]
        counts = [count_zeros_rect(ev, *child, budget=budget)
                  for child in children]
        if sum(counts) == c_parent:
            break
    return [(child, c) for child, c in zip(children, counts) if c > 0]


def _locate_in_boxes(ev, boxes, budget: _Budget, newton_size: float,
                     min_box: float):
    """Subdivision driver: returns (zeros, mults, per-root-box counts,
    incomplete flag)."""
    zeros: list[complex] = []
    mults: list[int] = []
    root_counts = []
    incomplete = False
    stack = []
    for i, (x0, y0, w, h) in enumerate(boxes):
        try:
            c = count_zeros_rect(ev, x0, y0, w, h, budget=budget)
        except BudgetExceeded:
            incomplete = True
            root_counts.append(-1)
            continue
        root_counts.append(c)
        if c > 0:
            stack.append((x0, y0, w, h, c))
    try:
        while stack:
            x0, y0, w, h, c = stack.pop()
            size = max(w, h)
            if c == 1 and size <= newton_size:
                z, ok = _newton_refine(ev, complex(x0 + 0.5 * w, y0 + 0.5 * h),
                                       size, budget=budget)
                margin = 2.0 * size
                inside = (x0 - margin <= z.real <= x0 + w + margin
                          and y0 - margin <= z.imag <= y0 + h + margin)
                if ok and inside:
                    zeros.append(z)
                    mults.append(1)
                    continue
                if size <= min_box:
                    zeros.append(complex(x0 + 0.5 * w, y0 + 0.5 * h))
                    mults.append(c)
                    continue
            elif size <= min_box:
                zeros.append(complex(x0 + 0.5 * w, y0 + 0.5 * h))
                mults.append(c)
                continue
            for (cx, cy, cw, ch), cc in _split_box(ev, x0, y0, w, h, c,
                                                   budget):
                stack.append((cx, cy, cw, ch, cc))
    except BudgetExceeded:
        incomplete = True
    return zeros, mults, root_counts, incomplete


def _merge_close(zeros, mults, tol: float):
    merged_z: list[complex] = []
    merged_m: list[int] = []
    for z, m in zip(zeros, mults):
        for i, zz in enumerate(merged_z):
            if abs(z - zz) < tol:
                merged_m[i] += m
                break
        else:
            merged_z.append(z)
            merged_m.append(m)
    return merged_z, merged_m


def locate_zeros(params: CocycleParams, N: int, E: complex, rho: float,
                 budget: int = 4_000_000, newton_size: float = 2e-2,
                 min_box: float = 1e-11) -> ZeroSet:
    """All zeros of f_[1,N](., E) in the annulus 1-rho < |z| < 1+rho.

    Quadtree subdivision by argument-principle counts; single-zero boxes
    hand over to Newton, clusters below the minimal box size are reported
    with their multiplicity.  The global count is the winding difference
    between the two bounding circles.
    """
    if rho >= params.potential.width / 2.0:
        raise DomainError("annulus exceeds half the analyticity width")
    ev = det_evaluator(params.with_energy(E), 1, N)
    bud = _Budget(budget)
    outer = count_zeros_disk(ev, 0.0, 1.0 + rho, n0=256, budget=bud)
    inner = count_zeros_disk(ev, 0.0, 1.0 - rho, n0=256, budget=bud)
    total = outer - inner

    side = max(rho / 2.0, 0.02)
    lim = 1.0 + rho
    m = int(math.ceil(2.0 * lim / side))
    origin = -lim - 0.31 * side  # irrationally offset grid dodges symmetry
    boxes = []
    for i in range(m + 1):
        for j in range(m + 1):
            x0 = origin + i * side
            y0 = origin + j * side
            rmax = max(abs(complex(cx, cy))
                       for cx in (x0, x0 + side) for cy in (y0, y0 + side))
            # nearest point of the box to the origin, by clamping
            px = min(max(0.0, x0), x0 + side)
            py = min(max(0.0, y0), y0 + side)
            rmin = abs(complex(px, py))
            if rmin <= 1.0 + rho and rmax >= 1.0 - rho:
                boxes.append((x0, y0, side, side))
    zeros, mults, root_counts, incomplete = _locate_in_boxes(
        ev, boxes, bud, newton_size, min_box)
    zeros, mults = _merge_close(zeros, mults, 1e-9)
    keep = [i for i, z in enumerate(zeros)
            if 1.0 - rho < abs(z) < 1.0 + rho]
    zs = np.array([zeros[i] for i in keep], dtype=complex)
    ms = np.array([mults[i] for i in keep], dtype=int)
    res = np.array([_residual(ev, z, budget=None) for z in zs])
    return ZeroSet(zeros=zs, residuals=res, multiplicities=ms,
                   window=(N, params.omega, complex(E)), rho=rho,
                   total_count=total,
                   box_counts=tuple(c for c in root_counts if c > 0),
                   incomplete=incomplete)


def locate_zeros_in_disk(ev, center: complex, radius: float,
                         budget: int = 500_000, newton_size: float | None = None,
                         min_box: float = 1e-11):
    """Zeros of an arbitrary evaluator inside D(center, radius).

    Returns (zeros, multiplicities, incomplete).  Used by the resonance
    scans; the annulus-specific wrapping lives in :func:`locate_zeros`.
    """
    bud = _Budget(budget)
    if newton_size is None:
        newton_size = radius / 4.0
    box = (center.real - radius, center.imag - radius,
           2.0 * radius, 2.0 * radius)
    zeros, mults, _, incomplete = _locate_in_boxes(
        ev, [box], bud, newton_size, min_box)
    zeros, mults = _merge_close(zeros, mults, 1e-9)
    keep = [i for i, z in enumerate(zeros) if abs(z - center) <= radius]
    return ([zeros[i] for i in keep], [mults[i] for i in keep], incomplete)


def log_abs_evaluator(ev):
    """Adapt a (log_abs, phase) evaluator into a log-magnitude function."""

    def u(zs):
        la, _ = ev(np.asarray(zs, dtype=complex))
        return la

    return u


def _overlap_area(t: np.ndarray, r1: float, r2: float) -> np.ndarray:
    """Area of D(0, r1) intersect D(t, r2) as a function of center distance."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    full = t <= r1 - r2
    out[full] = np.pi * r2 ** 2
    gone = t >= r1 + r2
    out[gone] = 0.0
    mid = ~(full | gone)
    tt = t[mid]
    a1 = np.arccos(np.clip((tt ** 2 + r2 ** 2 - r1 ** 2) / (2 * tt * r2), -1, 1))
    a2 = np.arccos(np.clip((tt ** 2 + r1 ** 2 - r2 ** 2) / (2 * tt * r1), -1, 1))
    s = np.sqrt(np.maximum((-tt + r1 + r2) * (tt + r1 - r2)
                           * (tt - r1 + r2) * (tt + r1 + r2), 0.0))
    out[mid] = r2 ** 2 * a1 + r1 ** 2 * a2 - 0.5 * s
    return out


def _fix_nonfinite(u, pts, vals, nudge: float):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        vals = vals.copy()
        vals[bad] = u(pts[bad] + nudge * (1.0 + 1.0j))
        vals[~np.isfinite(vals)] = -745.0  # still a zero: log of smallest double
    return vals


def jensen_average(u, z0: complex, r1: float, r2: float,
                   quadrature_n: int = 16) -> JensenAverage:
    """Double disk-average J(u, z0, r1, r2) by product quadrature.

    Averaging u over D(z, r2) and then z over D(z0, r1) convolves the two
    disk indicators, so the double average minus the single one reduces
    exactly to a radial integral of circle averages of u over the band
    r1-r2 <= |z-z0| <= r1+r2 against the circle-overlap kernel (the flat
    parts cancel).  The rule used is composite two-point Gauss in the band
    radius times equispaced angles with per-radius offsets.  Two
    refinements must agree to 1e-3 * max(1, |J|), else a precision error
    is raised.  Samples that hit a zero of the underlying function exactly
    are nudged.
    """
    if not (0.0 < r2 < r1):
        raise DomainError("need 0 < r2 < r1")
    z0 = complex(z0)

    def compute(n_t, m):
        edges = np.linspace(r1 - r2, r1 + r2, n_t + 1)
        g = 1.0 / math.sqrt(3.0)
        mids = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * np.diff(edges)
        ts = np.concatenate([mids - half * g, mids + half * g])
        wts = np.concatenate([half, half])
        kern = _overlap_area(ts, r1, r2) / (np.pi ** 2 * r1 ** 2 * r2 ** 2)
        flat = np.where(ts < r1, 1.0 / (np.pi * r1 ** 2), 0.0)
        wrad = 2.0 * np.pi * ts * (kern - flat)
        offs = (np.arange(len(ts)) * 0.381966) % 1.0
        th = (np.arange(m)[None, :] + offs[:, None]) / m
        pts = z0 + ts[:, None] * np.exp(2j * np.pi * th)
        flt = pts.ravel()
        vals = u(flt)
        vals = _fix_nonfinite(u, flt, vals, 1e-12 * r2)
        circ = vals.reshape(pts.shape).mean(axis=1)
        return float(np.sum(wts * wrad * circ))

    n = max(4, quadrature_n)
    j1 = compute(4 * n, 8 * n)
    j2 = compute(8 * n, 16 * n)
    if abs(j1 - j2) > 1e-3 * max(1.0, abs(j2)):
        raise QuadratureError(
            f"Jensen quadrature refinements disagree: {j1} vs {j2}")
    return JensenAverage(z0=z0, r1=float(r1), r2=float(r2), value=j2)


def zero_separation(zs: ZeroSet) -> SeparationReport:
    """Exact minimal pairwise distance and a nearest-neighbor histogram."""
    pts = zs.zeros
    if len(pts) < 2:
        raise DomainError("need at least two zeros")
    d = np.abs(pts[:, None] - pts[None, :])
    np.fill_diagonal(d, np.inf)
    nn = d.min(axis=1)
    counts, edges = np.histogram(np.log10(nn), bins=16)
    return SeparationReport(min_distance=float(d.min()), nn_distances=nn,
                            histogram_counts=counts, histogram_edges=edges)


def per_disk_count(zs: ZeroSet, r0: float) -> int:
    """Exact max number of zeros in any disk of radius r0.

    The optimal disk either is centered at a zero or has two zeros on its
    boundary, so scanning point centers plus pairwise circumcenters is
    exhaustive.  Multiplicities are counted with weight.
    """
    pts = zs.zeros
    w = zs.multiplicities.astype(int)
    if len(pts) == 0:
        return 0
    tol = r0 * (1.0 + 1e-9)
    best = 0
    centers = list(pts)
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            dz = pts[j] - pts[i]
            d = abs(dz)
            if d > 2.0 * r0 or d == 0.0:
                continue
            mid = 0.5 * (pts[i] + pts[j])
            half = math.sqrt(max(r0 * r0 - 0.25 * d * d, 0.0))
            perp = 1j * dz / d
            centers.append(mid + half * perp)
            centers.append(mid - half * perp)
    for c in centers:
        best = max(best, int(np.sum(w[np.abs(pts - c) <= tol])))
    return best


def star_discrepancy(u: np.ndarray) -> float:
    """Star discrepancy of points in [0,1) against the uniform measure."""
    u = np.sort(np.asarray(u, dtype=float))
    n = len(u)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def equidistribution_stats(zs: ZeroSet) -> EquidistributionStats:
    """Radial deviation quantiles and angular star discrepancy."""
    pts = np.repeat(zs.zeros, zs.multiplicities)
    if len(pts) < 10:
        raise DomainError("need at least 10 zeros for statistics")
    radial = np.abs(np.abs(pts) - 1.0)
    quants = {q: float(np.quantile(radial, q)) for q in (0.5, 0.9, 1.0)}
    angles = np.mod(np.angle(pts) / (2.0 * np.pi), 1.0)
    return EquidistributionStats(radial_quantiles=quants,
                                 angular_discrepancy=star_discrepancy(angles),
                                 count=len(pts))
