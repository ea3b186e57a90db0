"""
Coercion of raw inputs into the toolkit's vector types.

Every public operator runs its arguments through one of these helpers, so the
rest of the code can assume float64 arrays that satisfy the type invariants.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray

from core.exceptions import InvalidInputError

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]

SIMPLEX_TOL = 1e-9


def as_score_vector(z: ArrayLike, name: str = "z") -> Vector:
    arr = np.asarray(z, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 2:
        raise InvalidInputError(f"{name} must have at least 2 entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def as_temperature(lam: float, name: str = "lambda") -> float:
    try:
        value = float(lam)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name} must be a real number") from exc
    if not np.isfinite(value) or value <= 0.0:
        raise InvalidInputError(f"{name} must be finite and > 0, got {value}")
    return value


def as_generalized_temperature(lams: ArrayLike, n: int) -> Vector:
    arr = np.asarray(lams, dtype=np.float64)
    if arr.shape != (n,):
        raise InvalidInputError(f"expected {n} inverse temperatures, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise InvalidInputError("every per-strategy inverse temperature must be finite and > 0")
    return arr


def as_mixed_strategy(
    x: ArrayLike,
    name: str = "x",
    tol: float = SIMPLEX_TOL,
    interior: bool = False,
) -> Vector:
    """
    Validate simplex membership within ``tol`` and renormalize.

    Negative entries down to ``-tol`` are clipped to zero before the
    renormalization. With ``interior=True`` every component must be > 0.
    """
    arr = as_score_vector(x, name)
    if np.any(arr < -tol):
        raise InvalidInputError(f"{name} has negative entries beyond tolerance {tol}")
    if abs(arr.sum() - 1.0) > tol:
        raise InvalidInputError(f"{name} does not sum to 1 within tolerance {tol}")
    arr = np.clip(arr, 0.0, None)
    arr = arr / arr.sum()
    if interior and np.any(arr <= 0.0):
        raise InvalidInputError(f"{name} must lie in the interior of the simplex")
    return arr


def as_payoff_vector(u: ArrayLike, n: int, name: str = "u") -> Vector:
    arr = as_score_vector(u, name)
    if arr.size != n:
        raise InvalidInputError(f"{name} has length {arr.size}, expected {n}")
    return arr
