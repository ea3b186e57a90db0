import logging
import math
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from core.exceptions import InvalidInputError, NotConvergedError, SolverDivergedError
from core.operators import batch_softmax, softmax
from core.validation import Vector, as_mixed_strategy, as_score_vector, as_temperature
from models.domain import MatrixGame, PayoffFunction
from models.models import (
    ContractionCertificate,
    EquilibriumRecord,
    FixedPointResult,
    SolverConfig,
)
from repositories.report_repository import ReportRepository

logger = logging.getLogger(__name__)


def _best_response_scores(g: PayoffFunction, lam: float, z: Vector) -> Vector:
    return g.payoff(batch_softmax(z[np.newaxis, :], lam)[0])


def solve_fixed_point(
    g: PayoffFunction,
    lam: float,
    z0: ArrayLike,
    cfg: SolverConfig,
) -> FixedPointResult:
    """
    Damped Picard iteration z <- (1 - a) z + a U(softmax(z)).

    Stops once both ||U(softmax(z)) - z||_inf and
    ||softmax(U(softmax(z))) - softmax(z)||_inf are within tol. Running out of iterations is
    reported through ``converged=False``; a non-finite iterate raises.
    """
    lam = as_temperature(lam)
    z = as_score_vector(z0, "z0").copy()
    if z.size != g.n:
        raise InvalidInputError(f"z0 has {z.size} entries, game has {g.n} actions")
    alpha = cfg.damping

    history: list[float] = []
    iterations = 0
    while True:
        target = _best_response_scores(g, lam, z)
        residual = float(np.max(np.abs(target - z)))
        if not math.isfinite(residual):
            raise SolverDivergedError(
                f"non-finite iterate after {iterations} iterations", iterations=iterations
            )
        history.append(residual)
        gap = float(np.max(np.abs(softmax(target, lam) - softmax(z, lam))))
        settled = residual <= cfg.tol and gap <= cfg.tol
        if settled or iterations >= cfg.max_iter:
            break
        z = (1.0 - alpha) * z + alpha * target
        iterations += 1

    converged = settled
    if converged:
        logger.info("fixed point reached in %d iterations (residual %.3e)", iterations, residual)
    else:
        logger.warning(
            "fixed-point solve stopped after %d iterations at residual %.3e",
            iterations,
            residual,
        )
    return FixedPointResult(
        z_star=z.tolist(),
        x_star=softmax(z, lam).tolist(),
        residual=residual,
        iterations=iterations,
        converged=converged,
        residual_history=history,
    )


def logit_equilibrium(
    g: PayoffFunction,
    lam: float,
    z0: ArrayLike,
    cfg: SolverConfig,
) -> Vector:
    result = solve_fixed_point(g, lam, z0, cfg)
    if not result.converged:
        raise NotConvergedError(
            f"no logit equilibrium within {cfg.max_iter} iterations "
            f"(residual {result.residual:.3e})",
            result=result,
        )
    return np.asarray(result.x_star)


def verify_equilibrium(g: PayoffFunction, lam: float, x_star: ArrayLike) -> float:
    """||softmax(U(x*)) - x*||_inf; zero exactly at a logit equilibrium."""
    lam = as_temperature(lam)
    x = as_mixed_strategy(x_star, "x_star", interior=True)
    if x.size != g.n:
        raise InvalidInputError(f"x_star has {x.size} entries, game has {g.n} actions")
    return float(np.max(np.abs(softmax(g.payoff(x), lam) - x)))


def contraction_certificate(g: MatrixGame, lam: float) -> ContractionCertificate:
    """
    A-priori bound ||A||_inf * sqrt(n) * lam on the inf-norm modulus of
    U o softmax. Below 1 it certifies a unique, globally attracting fixed
    point; above 1 it says nothing.
    """
    lam = as_temperature(lam)
    bound = float(np.linalg.norm(g.payoff_matrix, ord=np.inf) * math.sqrt(g.n) * lam)
    return ContractionCertificate(bound=bound, certified=bound < 1.0)


def contraction_ratio(history: list[float], floor: float = 1e-14) -> Optional[float]:
    """Geometric-mean ratio of successive residuals above ``floor``."""
    values = [r for r in history if r > floor]
    if len(values) < 2:
        return None
    return float((values[-1] / values[0]) ** (1.0 / (len(values) - 1)))


class EquilibriumService:
    def __init__(self, repo: ReportRepository):
        self.repo = repo

    def solve(
        self,
        g: MatrixGame,
        lam: float,
        z0: Optional[ArrayLike],
        cfg: SolverConfig,
    ) -> EquilibriumRecord:
        z0 = np.zeros(g.n) if z0 is None else z0
        result = solve_fixed_point(g, lam, z0, cfg)
        certificate = contraction_certificate(g, lam)
        return EquilibriumRecord(
            z_star=result.z_star,
            x_star=result.x_star,
            residual=result.residual,
            iterations=result.iterations,
            converged=result.converged,
            certified_contraction=certificate.certified,
            lam=lam,
        )

    def solve_and_save(
        self,
        g: MatrixGame,
        lam: float,
        z0: Optional[ArrayLike],
        cfg: SolverConfig,
        out: str,
    ) -> EquilibriumRecord:
        record = self.solve(g, lam, z0, cfg)
        self.repo.save(out, record)
        return record
