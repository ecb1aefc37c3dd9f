"""Potentials, transfer matrices, monodromies and Dirichlet determinants.

Conventions used throughout the package:

* ``e(x) = exp(2*pi*i*x)``; the complexified phase variable is
  ``z = e(x + i*y)`` so that ``|z| = exp(-2*pi*y)``.
* the one-step matrix at phase w is ``A(w) = [[V(w)-E, -1], [1, 0]]``,
* the monodromy over the window ``[a, b]`` is the ordered product
  ``M_[a,b](z) = A(z e(b w)) ... A(z e(a w))`` (site index decreasing
  left to right),
* the Dirichlet determinant ``f_[a,b]`` is det(H_[a,b] - E) for the
  tridiagonal operator with diagonal ``V(z e(k w))``, k = a..b, and
  off-diagonal -1, with the boundary conventions ``f_[a,a-1] = 1`` and
  ``f_[a,a-2] = 0``.

The entries of the monodromy are Dirichlet determinants of sub-windows:

    M_[a,b] = [[ f_[a,b],   -f_[a+1,b]   ],
               [ f_[a,b-1], -f_[a+1,b-1] ]]

which is tested numerically rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, PoleError
from .scaledmat import (
    IDENTITY,
    ScaledComplex,
    ScaledMatrix2,
    mat_mul,
    normalize,
)

__all__ = [
    "e",
    "TrigPotential",
    "am_potential",
    "zero_potential",
    "CocycleParams",
    "ImpuritySpec",
    "potential_eval",
    "potential_eval_dx",
    "one_step",
    "monodromy",
    "window_monodromy",
    "dirichlet_det",
    "dirichlet_det_batch",
    "det_evaluator",
    "impurity_monodromy",
    "green_entry",
    "monodromy_lognorm_grid",
    "window_lognorm_scans",
]


def e(x):
    """exp(2*pi*i*x), the standard unit-circle embedding of the phase."""
    return np.exp(2j * np.pi * np.asarray(x, dtype=complex))


@dataclass(frozen=True)
class TrigPotential:
    """Trigonometric polynomial potential  V(z) = coupling * sum_k c_k z^k.

    Coefficients satisfy c_{-k} = conj(c_k) so that V is real on |z| = 1.
    ``width`` is the half-width rho_0 of the annulus 1-rho_0 < |z| < 1+rho_0
    on which evaluations are considered in-domain.
    """

    coupling: float
    coeffs: dict = field(default_factory=dict)
    degree: int = 1
    width: float = 0.5

    def __post_init__(self):
        cleaned = {}
        for k, v in self.coeffs.items():
            k = int(k)
            v = complex(v)
            if -k in cleaned:
                if abs(np.conj(cleaned[-k]) - v) > 1e-12 * max(1.0, abs(v)):
                    raise DomainError(
                        f"coefficients at +-{abs(k)} violate conjugate symmetry"
                    )
                continue
            cleaned[k] = v
        full = {}
        for k, v in cleaned.items():
            full[k] = v
            full[-k] = np.conj(v)
        if full and max(abs(k) for k in full) > self.degree:
            raise DomainError("coefficient index exceeds declared degree")
        if self.degree < 0:
            raise DomainError("degree must be nonnegative")
        if not (0 < self.width < 1):
            raise DomainError("width must lie in (0, 1)")
        object.__setattr__(self, "coeffs", full)

    def coeff_array(self) -> np.ndarray:
        """Coefficients as an array indexed by k + degree."""
        c = np.zeros(2 * self.degree + 1, dtype=complex)
        for k, v in self.coeffs.items():
            c[k + self.degree] = v
        return c

    def sup_norm_real(self) -> float:
        """Upper bound for |V| on the unit circle: coupling * sum |c_k|."""
        return abs(self.coupling) * float(
            sum(abs(v) for v in self.coeffs.values())
        )


def am_potential(coupling: float = 4.0, width: float = 0.5) -> TrigPotential:
    """coupling * cos(2 pi x), the classic single-cosine potential."""
    return TrigPotential(coupling=coupling, coeffs={1: 0.5, -1: 0.5},
                         degree=1, width=width)


def zero_potential(width: float = 0.5) -> TrigPotential:
    """The free case V = 0 (coupling 0 on the cosine)."""
    return TrigPotential(coupling=0.0, coeffs={1: 0.5, -1: 0.5},
                         degree=1, width=width)


def potential_eval(p: TrigPotential, z):
    """Evaluate coupling * sum_k c_k z^k; domain error at z = 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("potential evaluation at z = 0 (negative powers)")
    out = np.zeros_like(z)
    for k, v in p.coeffs.items():
        out = out + v * z ** k
    return p.coupling * out


def potential_eval_dx(p: TrigPotential, z):
    """d/dx of V(z e(x)) at x = 0, i.e. 2 pi i * coupling * sum_k k c_k z^k."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("potential evaluation at z = 0 (negative powers)")
    out = np.zeros_like(z)
    for k, v in p.coeffs.items():
        out = out + k * v * z ** k
    return 2j * np.pi * p.coupling * out


@dataclass(frozen=True)
class CocycleParams:
    """Frequency, spectral parameter and potential of one cocycle family.

    ``omega_pq = (p, q)`` switches on the exact rational mode: rotation
    phases are then computed with integer arithmetic mod q, which keeps
    the phase sequence exactly periodic.
    """

    potential: TrigPotential
    omega: float
    energy: complex = 0.0
    omega_pq: tuple | None = None

    def __post_init__(self):
        if self.omega_pq is not None:
            p, q = self.omega_pq
            if q <= 0 or math.gcd(int(p), int(q)) != 1:
                raise DomainError("rational frequency must be p/q in lowest terms")
            object.__setattr__(self, "omega", (int(p) % int(q)) / int(q))

    @classmethod
    def rational(cls, potential, p: int, q: int, energy: complex = 0.0):
        return cls(potential=potential, omega=p / q, energy=energy,
                   omega_pq=(int(p), int(q)))

    def with_energy(self, energy: complex) -> "CocycleParams":
        return replace(self, energy=energy)

    def rotations(self, ks) -> np.ndarray:
        """e(k * omega) for an array of integer step counts k."""
        ks = np.asarray(ks)
        if self.omega_pq is not None:
            p, q = self.omega_pq
            return e((ks.astype(np.int64) * int(p) % int(q)) / int(q))
        return e(np.mod(ks * self.omega, 1.0))


@dataclass(frozen=True)
class ImpuritySpec:
    """Strictly increasing impurity positions within a window [1, n]."""

    positions: tuple

    def __post_init__(self):
        pos = tuple(int(k) for k in self.positions)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise DomainError("impurity positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.positions)


def one_step(params: CocycleParams, z) -> ScaledMatrix2:
    """The matrix [[V(z)-E, -1], [1, 0]]; unimodular by construction."""
    v = complex(potential_eval(params.potential, z))
    raw = np.array([[v - params.energy, -1.0], [1.0, 0.0]], dtype=complex)
    return normalize(raw)


_IMPURITY = np.array([[-1.0, 0.0], [0.0, 0.0]], dtype=complex)

_RENORM_EVERY = 8


def _window_product(params: CocycleParams, z, a: int, b: int) -> ScaledMatrix2:
    """Ordered product A(z e(b w)) ... A(z e(a w)); identity for b < a."""
    if b < a:
        return IDENTITY
    z = complex(z)
    rot = params.rotations(np.arange(a, b + 1))
    vals = potential_eval(params.potential, z * rot) - params.energy
    m = np.eye(2, dtype=complex)
    ls = 0.0
    for i, v in enumerate(vals):
        m = np.array([[v * m[0, 0] - m[1, 0], v * m[0, 1] - m[1, 1]],
                      [m[0, 0], m[0, 1]]])
        if i % _RENORM_EVERY == _RENORM_EVERY - 1:
            s = float(np.max(np.abs(m)))
            if s > 0.0:
                m /= s
                ls += math.log(s)
    # each one-step factor has determinant exactly 1, so the raw product
    # here has |det| = exp(-2 ls) independent of the entries
    return normalize(m, ls, log_abs_det_raw=-2.0 * ls)


def window_monodromy(params: CocycleParams, z, a: int, b: int) -> ScaledMatrix2:
    """Monodromy over the site window [a, b] at base phase z."""
    return _window_product(params, z, a, b)


def monodromy(params: CocycleParams, z, n: int) -> ScaledMatrix2:
    """M_n(z) = A(z e(n w)) ... A(z e(w)) for n >= 1."""
    if n < 1:
        raise DomainError("monodromy length must be >= 1")
    return _window_product(params, z, 1, n)


def dirichlet_det_batch(params: CocycleParams, zs, a: int, b: int,
                        shift: int = 0):
    """f_[a,b](z e(shift*w)) for an array of z, in log scale.

    Returns (log_abs, unit_phase) arrays; entries with f = 0 carry
    log_abs = -inf and unit_phase = 0.  The three-term recursion is
    renormalized every few steps so arbitrarily long windows stay finite.
    """
    zs = np.asarray(zs, dtype=complex)
    f1 = np.ones(zs.shape, dtype=complex)   # f_{k}
    f0 = np.zeros(zs.shape, dtype=complex)  # f_{k-1}
    ls = np.zeros(zs.shape, dtype=float)
    if b >= a:
        ks = np.arange(a, b + 1)
        rot = params.rotations(ks + shift)
        for i, r in enumerate(rot):
            v = potential_eval(params.potential, zs * r) - params.energy
            f1, f0 = v * f1 - f0, f1
            if i % _RENORM_EVERY == _RENORM_EVERY - 1:
                m = np.maximum(np.abs(f1), np.abs(f0))
                m = np.where(m > 0.0, m, 1.0)
                ls += np.log(m)
                f1 /= m
                f0 /= m
    elif b == a - 2:
        f1 = f0.copy()  # convention f_[a,a-2] = 0
    elif b < a - 2:
        raise DomainError("window end before start-2 has no convention")
    mag = np.abs(f1)
    ok = mag > 0.0
    log_abs = np.where(ok, ls + np.log(np.where(ok, mag, 1.0)), -np.inf)
    phase = np.where(ok, f1 / np.where(ok, mag, 1.0), 0.0)
    return log_abs, phase


def dirichlet_det(params: CocycleParams, z, a: int, b: int) -> ScaledComplex:
    """The Dirichlet determinant f_[a,b](z) as a ScaledComplex."""
    if b < a - 2:
        raise DomainError("window end before start-2 has no convention")
    la, ph = dirichlet_det_batch(params, np.array([z], dtype=complex), a, b)
    if ph[0] == 0:
        return ScaledComplex(0j, 0.0)
    return ScaledComplex(complex(ph[0]), float(la[0]))


def det_evaluator(params: CocycleParams, a: int, b: int,
                  shift: int = 0) -> Callable:
    """A vectorized log-scale evaluator z -> (log|f|, unit phase).

    This is the interface consumed by the zero-counting machinery.
    """

    def evaluate(zs):
        return dirichlet_det_batch(params, zs, a, b, shift=shift)

    return evaluate


def impurity_monodromy(params: CocycleParams, z, n: int,
                       spec: ImpuritySpec) -> ScaledMatrix2:
    """Monodromy over [1, n] with [[-1,0],[0,0]] replacing sites k_1..k_t.

    The upper-left entry factors exactly into the product of the Dirichlet
    determinants of the complementary windows [1,k_1-1], [k_1+1,k_2-1], ...,
    [k_t+1,n].
    """
    pos = spec.positions
    if len(pos) == 0:
        return monodromy(params, z, n)
    if pos[0] < 1 or pos[-1] > n:
        raise DomainError("impurity positions must lie in [1, n]")
    acc = _window_product(params, z, 1, pos[0] - 1)
    for i in range(len(pos)):
        acc = mat_mul(normalize(_IMPURITY), acc)
        hi = pos[i + 1] - 1 if i + 1 < len(pos) else n
        blk = _window_product(params, z, pos[i] + 1, hi)
        acc = mat_mul(blk, acc)
    return acc


def green_entry(params: CocycleParams, x: float, N: int, j: int, k: int,
                eta: float) -> float:
    """log |G_N(j,k)| for the resolvent of H_[1,N] at energy E + i eta.

    Cramer's rule for the tridiagonal resolvent gives
    |G(j,k)| = |f_[1,j-1]| |f_[k+1,N]| / |f_[1,N]| for j <= k (the
    off-diagonal cofactor is a product of unit-magnitude entries).
    """
    if not (1 <= j <= k <= N):
        raise DomainError("need 1 <= j <= k <= N")
    p = params.with_energy(params.energy + 1j * eta)
    z = complex(e(x))
    denom = dirichlet_det(p, z, 1, N)
    if denom.is_zero:
        raise PoleError("f_[1,N] vanishes exactly at this energy")
    top = dirichlet_det(p, z, 1, j - 1)
    bot = dirichlet_det(p, z, k + 1, N)
    return top.log_magnitude() + bot.log_magnitude() - denom.log_magnitude()


def _grid_phases(xs, y: float) -> np.ndarray:
    return e(np.asarray(xs, dtype=float) + 1j * y)


def monodromy_lognorm_grid(params: CocycleParams, n: int, xs,
                           y: float = 0.0) -> np.ndarray:
    """log ||M_n(e(x+iy))|| for an array of phases x, vectorized.

    One pass of the transfer recursion over the whole grid; the four
    matrix entries are carried as separate arrays with a shared running
    log factor, renormalized every few steps.
    """
    zs = _grid_phases(xs, y)
    m11 = np.ones(zs.shape, dtype=complex)
    m12 = np.zeros(zs.shape, dtype=complex)
    m21 = np.zeros(zs.shape, dtype=complex)
    m22 = np.ones(zs.shape, dtype=complex)
    ls = np.zeros(zs.shape, dtype=float)
    rot = params.rotations(np.arange(1, n + 1))
    for i, r in enumerate(rot):
        v = potential_eval(params.potential, zs * r) - params.energy
        n11 = v * m11 - m21
        n12 = v * m12 - m22
        m21, m22 = m11, m12
        m11, m12 = n11, n12
        if i % _RENORM_EVERY == _RENORM_EVERY - 1:
            m = np.abs(m11)
            np.maximum(m, np.abs(m12), out=m)
            np.maximum(m, np.abs(m21), out=m)
            np.maximum(m, np.abs(m22), out=m)
            m = np.where(m > 0.0, m, 1.0)
            ls += np.log(m)
            m11 /= m
            m12 /= m
            m21 /= m
            m22 /= m
    t = (np.abs(m11) ** 2 + np.abs(m12) ** 2
         + np.abs(m21) ** 2 + np.abs(m22) ** 2)
    d = np.abs(m11 * m22 - m12 * m21) ** 2
    disc = np.maximum(t * t - 4.0 * d, 0.0)
    smax = np.sqrt(0.5 * (t + np.sqrt(disc)))
    return ls + np.log(smax)


def dirichlet_det_E_batch(params: CocycleParams, z, a: int, b: int,
                          energies):
    """f_[a,b](z) over an array of energies, in log scale.

    Same recursion as :func:`dirichlet_det_batch` but vectorized over the
    spectral parameter at a fixed phase.
    """
    energies = np.asarray(energies, dtype=complex)
    z = complex(z)
    f1 = np.ones(energies.shape, dtype=complex)
    f0 = np.zeros(energies.shape, dtype=complex)
    ls = np.zeros(energies.shape, dtype=float)
    if b >= a:
        rot = params.rotations(np.arange(a, b + 1))
        vals = potential_eval(params.potential, z * rot)
        for i, vk in enumerate(vals):
            f1, f0 = (vk - energies) * f1 - f0, f1
            if i % _RENORM_EVERY == _RENORM_EVERY - 1:
                m = np.maximum(np.abs(f1), np.abs(f0))
                m = np.where(m > 0.0, m, 1.0)
                ls += np.log(m)
                f1 /= m
                f0 /= m
    mag = np.abs(f1)
    ok = mag > 0.0
    log_abs = np.where(ok, ls + np.log(np.where(ok, mag, 1.0)), -np.inf)
    phase = np.where(ok, f1 / np.where(ok, mag, 1.0), 0.0)
    return log_abs, phase


def monodromy_lognorm_multi(params: CocycleParams, n: int, xs, energies,
                            y: float = 0.0) -> np.ndarray:
    """log ||M_n|| on the product grid energies x phases, shape (E, X)."""
    zs = _grid_phases(xs, y)[None, :]
    energies = np.asarray(energies, dtype=complex)[:, None]
    shape = (energies.shape[0], zs.shape[1])
    m11 = np.ones(shape, dtype=complex)
    m12 = np.zeros(shape, dtype=complex)
    m21 = np.zeros(shape, dtype=complex)
    m22 = np.ones(shape, dtype=complex)
    ls = np.zeros(shape, dtype=float)
    rot = params.rotations(np.arange(1, n + 1))
    for i, r in enumerate(rot):
        v = potential_eval(params.potential, zs * r) - energies
        n11 = v * m11 - m21
        n12 = v * m12 - m22
        m21, m22 = m11, m12
        m11, m12 = n11, n12
        if i % _RENORM_EVERY == _RENORM_EVERY - 1:
            m = np.abs(m11)
            np.maximum(m, np.abs(m12), out=m)
            np.maximum(m, np.abs(m21), out=m)
            np.maximum(m, np.abs(m22), out=m)
            m = np.where(m > 0.0, m, 1.0)
            ls += np.log(m)
            m11 /= m
            m12 /= m
            m21 /= m
            m22 /= m
    t = (np.abs(m11) ** 2 + np.abs(m12) ** 2
         + np.abs(m21) ** 2 + np.abs(m22) ** 2)
    d = np.abs(m11 * m22 - m12 * m21) ** 2
    disc = np.maximum(t * t - 4.0 * d, 0.0)
    smax = np.sqrt(0.5 * (t + np.sqrt(disc)))
    return ls + np.log(smax)


def window_lognorm_scans(params: CocycleParams, z, N: int):
    """log ||M_[1,k]|| for k=1..N and log ||M_[k+1,N]|| for k=0..N.

    Returns (prefix, suffix): prefix[k-1] = log||M_[1,k]||;
    suffix[k] = log||M_[k+1,N]|| with suffix[N] = 0 (empty product).
    One forward and one backward sweep, O(N) total.
    """
    z = complex(z)
    rot = params.rotations(np.arange(1, N + 1))
    vals = potential_eval(params.potential, z * rot) - params.energy

    prefix = np.empty(N, dtype=float)
    m = np.eye(2, dtype=complex)
    ls = 0.0
    from .scaledmat import op_norm_2x2
    for i in range(N):
        v = vals[i]
        m = np.array([[v * m[0, 0] - m[1, 0], v * m[0, 1] - m[1, 1]],
                      [m[0, 0], m[0, 1]]])
        s = float(np.max(np.abs(m)))
        if s > 0.0:
            m /= s
            ls += math.log(s)
        prefix[i] = ls + math.log(op_norm_2x2(m))

    suffix = np.empty(N + 1, dtype=float)
    suffix[N] = 0.0
    m = np.eye(2, dtype=complex)
    ls = 0.0
    for k in range(N, 0, -1):
        v = vals[k - 1]
        # append A_k on the right: M -> M @ A_k
        m = np.array([[v * m[0, 0] + m[0, 1], -m[0, 0]],
                      [v * m[1, 0] + m[1, 1], -m[1, 0]]])
        s = float(np.max(np.abs(m)))
        if s > 0.0:
            m /= s
            ls += math.log(s)
        suffix[k - 1] = ls + math.log(op_norm_2x2(m))
    return prefix, suffix
