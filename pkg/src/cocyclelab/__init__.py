"""Numerical laboratory for one-dimensional quasi-periodic Schrodinger
cocycles and finite-volume Dirichlet problems."""

from .scaledmat import (
    ScaledMatrix2,
    ScaledComplex,
    normalize,
    mat_mul,
    log_norm,
    log_abs_det,
)
from .cocycle import (
    e,
    TrigPotential,
    am_potential,
    zero_potential,
    CocycleParams,
    ImpuritySpec,
    potential_eval,
    potential_eval_dx,
    one_step,
    monodromy,
    window_monodromy,
    dirichlet_det,
    det_evaluator,
    impurity_monodromy,
    green_entry,
)

__version__ = "0.1.0"
