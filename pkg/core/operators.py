"""
Softmax / log-sum-exp operator pair.

All evaluations are shifted by the vector max, which is exact because
lse(z + c*1) = lse(z) + c and the softmax is invariant along 1. Batched
variants operate row-wise on (N, n) arrays and skip input validation; they
back the property checks and the integrators.
"""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special

from core.exceptions import InvalidInputError
from core.validation import (
    Matrix,
    Vector,
    as_generalized_temperature,
    as_mixed_strategy,
    as_score_vector,
    as_temperature,
)

EULER_GAMMA = float(np.euler_gamma)


def vecmax(z: ArrayLike) -> tuple[float, int]:
    """Largest entry and its index; ties go to the lowest index."""
    arr = as_score_vector(z)
    idx = int(np.argmax(arr))
    return float(arr[idx]), idx


def argmax_set(z: ArrayLike, tol: float = 0.0) -> list[int]:
    """Indices of every simplex vertex maximizing x'z, i.e. all i with z_i >= max(z) - tol."""
    arr = as_score_vector(z)
    return [int(i) for i in np.flatnonzero(arr >= arr.max() - tol)]


def lse(z: ArrayLike, lam: float = 1.0) -> float:
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    return float(batch_lse(arr[np.newaxis, :], lam)[0])


def softmax(z: ArrayLike, lam: float = 1.0) -> Vector:
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    return batch_softmax(arr[np.newaxis, :], lam)[0]


def log_softmax(z: ArrayLike, lam: float = 1.0) -> Vector:
    """Exponential-family form: lam*z_i - log(sum_j exp(lam*z_j))."""
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    return special.log_softmax(lam * (arr - arr.max()))


def generalized_softmax(z: ArrayLike, lams: ArrayLike) -> Vector:
    """Softmax with a separate inverse temperature per strategy: exp(l_i z_i) / sum_j exp(l_j z_j)."""
    arr = as_score_vector(z)
    weights = as_generalized_temperature(lams, arr.size) * arr
    return special.softmax(weights - weights.max())


def softmax_jacobian(z: ArrayLike, lam: float = 1.0) -> Matrix:
    """lam * (diag(s) - s s^T) with s = softmax(z); also the Hessian of lse."""
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    return batch_jacobian(arr[np.newaxis, :], lam)[0]


lse_hessian = softmax_jacobian


def negative_entropy(x: ArrayLike, lam: float = 1.0) -> float:
    """lam^-1 * sum x_j log x_j over the simplex, with 0 log 0 = 0."""
    probs = as_mixed_strategy(x)
    lam = as_temperature(lam)
    return float(special.xlogy(probs, probs).sum() / lam)


def regularized_objective(x: ArrayLike, z: ArrayLike, lam: float = 1.0) -> float:
    """Free-energy objective x'z - psi(x); its maximizer over the simplex is softmax(z)."""
    probs = as_mixed_strategy(x)
    arr = as_score_vector(z)
    if arr.size != probs.size:
        raise InvalidInputError("x and z must have the same length")
    return float(probs @ arr) - negative_entropy(probs, lam)


def gumbel_choice(
    z: ArrayLike,
    lam: float = 1.0,
    seed: int | None = None,
    draws: int | None = None,
) -> int | NDArray:
    """
    Index of the largest Gumbel-perturbed score.

    The perturbations have CDF exp(-exp(-lam*c - gamma)), i.e. location
    -gamma/lam and scale 1/lam, so each index is chosen with probability
    softmax(z)_i. Returns a single index, or an array of ``draws`` indices.
    """
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    rng = np.random.default_rng(seed)
    shape = (arr.size,) if draws is None else (int(draws), arr.size)
    eps = rng.gumbel(loc=-EULER_GAMMA / lam, scale=1.0 / lam, size=shape)
    choice = np.argmax(arr + eps, axis=-1)
    return int(choice) if draws is None else choice


def choice_frequencies(
    z: ArrayLike,
    lam: float,
    draws: int,
    seed: int | None = None,
    chunk: int = 200_000,
) -> Vector:
    """Empirical choice frequencies of ``draws`` Gumbel choices, drawn in chunks."""
    arr = as_score_vector(z)
    lam = as_temperature(lam)
    rng = np.random.default_rng(seed)
    counts = np.zeros(arr.size, dtype=np.int64)
    remaining = int(draws)
    while remaining > 0:
        size = min(chunk, remaining)
        eps = rng.gumbel(loc=-EULER_GAMMA / lam, scale=1.0 / lam, size=(size, arr.size))
        counts += np.bincount(np.argmax(arr + eps, axis=1), minlength=arr.size)
        remaining -= size
    return counts / float(draws)


# ---------------------- BATCHED (unchecked) ----------------------


def batch_lse(z: Matrix, lam: float) -> Vector:
    m = z.max(axis=-1)
    return m + special.logsumexp(lam * (z - m[..., np.newaxis]), axis=-1) / lam


def batch_softmax(z: Matrix, lam: float) -> Matrix:
    shifted = z - z.max(axis=-1, keepdims=True)
    return special.softmax(lam * shifted, axis=-1)


def batch_jacobian(z: Matrix, lam: float) -> NDArray:
    s = batch_softmax(z, lam)
    diag = s[..., :, np.newaxis] * np.eye(s.shape[-1])
    return lam * (diag - s[..., :, np.newaxis] * s[..., np.newaxis, :])
