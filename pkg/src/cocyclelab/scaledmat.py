"""Overflow-proof complex 2x2 matrix arithmetic in log scale.

Long transfer-matrix products grow like exp(gamma*N); a raw product of
doubles overflows near N ~ 700 for coupling 4.  Every cocycle product in
this package therefore flows through :class:`ScaledMatrix2`: a mantissa
matrix with max entry magnitude 1 together with a real log-scale factor.
Scalar quantities (determinant values) use :class:`ScaledComplex`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ScaledMatrix2",
    "ScaledComplex",
    "normalize",
    "scaled_from_value",
    "mat_mul",
    "mat_vec_struct",
    "log_norm",
    "log_abs_det",
    "op_norm_2x2",
]


def op_norm_2x2(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 complex matrix, in closed form.

    sigma_max^2 is the larger root of s^2 - T s + D = 0 with
    T = ||m||_F^2 and D = |det m|^2.
    """
    t = abs(m[0, 0]) ** 2 + abs(m[0, 1]) ** 2 + abs(m[1, 0]) ** 2 + abs(m[1, 1]) ** 2
    d = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]) ** 2
    disc = t * t - 4.0 * d
    if disc < 0.0:  # rounding; exact value is >= 0
        disc = 0.0
    return math.sqrt(0.5 * (t + math.sqrt(disc)))


@dataclass(frozen=True)
class ScaledMatrix2:
    """A 2x2 complex matrix stored as exp(log_scale) * mantissa.

    Invariants: mantissa has max entry magnitude exactly 1 (up to rounding)
    unless the matrix is zero, in which case mantissa == 0 and log_scale == 0.

    log_det_mantissa carries log|det(mantissa)| through products.  It
    cannot be recovered from the mantissa once the matrix is strongly
    hyperbolic (the subtraction cancels below double precision), but it
    is exactly multiplicative, so tracking it keeps unimodularity checks
    meaningful for arbitrarily long products.
    """

    mantissa: np.ndarray
    log_scale: float
    log_det_mantissa: float = -math.inf

    def to_dense(self) -> np.ndarray:
        """Represented matrix as a plain array; overflows for large scales."""
        return math.exp(self.log_scale) * self.mantissa

    @property
    def is_zero(self) -> bool:
        return not np.any(self.mantissa)


@dataclass(frozen=True)
class ScaledComplex:
    """A complex value stored as exp(log_abs) * phase with |phase| ~ 1."""

    phase: complex
    log_abs: float

    @property
    def is_zero(self) -> bool:
        return self.phase == 0

    def log_magnitude(self) -> float:
        """log |value|; -inf for the zero value."""
        if self.phase == 0:
            return -math.inf
        return self.log_abs + math.log(abs(self.phase))

    def to_complex(self) -> complex:
        return math.exp(self.log_abs) * self.phase


def scaled_from_value(value: complex, carried_log: float = 0.0) -> ScaledComplex:
    """Normalize a raw complex value into a ScaledComplex."""
    if value != value:  # NaN
        raise DomainError("NaN value cannot be normalized")
    a = abs(value)
    if a == 0.0:
        return ScaledComplex(0j, 0.0)
    return ScaledComplex(value / a, carried_log + math.log(a))


def normalize(raw: np.ndarray, carried_log: float = 0.0,
              log_abs_det_raw: float | None = None) -> ScaledMatrix2:
    """Normalize a raw 2x2 matrix carrying an external log factor.

    The result represents exp(carried_log) * raw.  Any NaN entry is a
    domain error; the zero matrix maps to mantissa 0, log_scale 0.
    ``log_abs_det_raw`` supplies log|det raw| when the caller knows it
    exactly (otherwise it is computed from the entries, which is fine
    for matrices that are not strongly hyperbolic).
    """
    raw = np.asarray(raw, dtype=complex)
    if raw.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {raw.shape}")
    if np.any(np.isnan(raw)):
        raise DomainError("NaN entry in matrix")
    scale = float(np.max(np.abs(raw)))
    if scale == 0.0:
        return ScaledMatrix2(np.zeros((2, 2), dtype=complex), 0.0)
    if not math.isfinite(scale):
        raise DomainError("non-finite entry in matrix")
    if log_abs_det_raw is None:
        det = abs(raw[0, 0] * raw[1, 1] - raw[0, 1] * raw[1, 0])
        log_abs_det_raw = math.log(det) if det > 0.0 else -math.inf
    ls = math.log(scale)
    return ScaledMatrix2(raw / scale, carried_log + ls,
                         log_abs_det_raw - 2.0 * ls)


IDENTITY = ScaledMatrix2(np.eye(2, dtype=complex), 0.0, 0.0)


def mat_mul(a: ScaledMatrix2, b: ScaledMatrix2) -> ScaledMatrix2:
    """Product of represented matrices, renormalized once.

    The determinant carry uses det(AB) = det(A) det(B), which is exact in
    log scale and immune to the cancellation that a direct evaluation on
    the product mantissa would suffer.
    """
    return normalize(a.mantissa @ b.mantissa, a.log_scale + b.log_scale,
                     log_abs_det_raw=a.log_det_mantissa + b.log_det_mantissa)


def mat_vec_struct(a: ScaledMatrix2, v: np.ndarray, carried_log: float = 0.0):
    """Apply the represented matrix to a 2-vector, returning (vector, log)."""
    w = a.mantissa @ np.asarray(v, dtype=complex)
    s = float(np.max(np.abs(w)))
    if s == 0.0:
        return np.zeros(2, dtype=complex), 0.0
    return w / s, carried_log + a.log_scale + math.log(s)


def log_norm(m: ScaledMatrix2) -> float:
    """log of the operator norm of the represented matrix."""
    if m.is_zero:
        raise DomainError("log_norm of the zero matrix")
    return m.log_scale + math.log(op_norm_2x2(m.mantissa))


def log_abs_det(m: ScaledMatrix2) -> float:
    """log |det| of the represented matrix; -inf for singular ones."""
    return 2.0 * m.log_scale + m.log_det_mantissa
