import logging

import numpy as np
from numpy.typing import ArrayLike
from scipy import linalg

from core.exceptions import InvalidInputError
from core.validation import Vector, as_mixed_strategy
from models.domain import MatrixGame, PayoffFunction
from models.models import SampleEnsemble, StabilityReport
from repositories.game_repository import GameRepository
from services.property_service import (
    ABS_TOL,
    PSD_TOL,
    pair_witness,
    build_report,
    draw_simplex_pairs,
)

logger = logging.getLogger(__name__)


def _strategy_for(g: PayoffFunction, x: ArrayLike) -> Vector:
    probs = as_mixed_strategy(x)
    if probs.size != g.n:
        raise InvalidInputError(f"strategy has {probs.size} entries, game has {g.n} actions")
    return probs


def payoff(g: PayoffFunction, x: ArrayLike) -> Vector:
    """Payoff vector U(x); A x for a matrix game."""
    return g.payoff(_strategy_for(g, x))


def expected_payoff(g: PayoffFunction, x: ArrayLike) -> float:
    probs = _strategy_for(g, x)
    return float(probs @ g.payoff(probs))


def payoff_bound(g: MatrixGame) -> float:
    """M with |U_i(x)| <= M on the simplex: the largest absolute payoff entry."""
    return float(np.abs(g.payoff_matrix).max())


def tangent_max_eigenvalue(g: MatrixGame) -> float:
    """
    Largest eigenvalue of (A + A^T)/2 restricted to {y : y'1 = 0}.

    The game is stable exactly when this is <= 0.
    """
    sym = 0.5 * (g.payoff_matrix + g.payoff_matrix.T)
    basis = linalg.null_space(np.ones((1, g.n)))
    return float(linalg.eigvalsh(basis.T @ sym @ basis).max())


def check_stable_game(g: MatrixGame, ens: SampleEnsemble) -> StabilityReport:
    """
    Anti-monotonicity (x - x')'(U(x) - U(x')) <= 0 on sampled simplex pairs,
    plus the exact tangent-space eigenvalue criterion.
    """
    if ens.n != g.n:
        raise InvalidInputError(f"ensemble dimension {ens.n} does not match game size {g.n}")
    x, xp = draw_simplex_pairs(ens)
    a = g.payoff_matrix
    dx = x - xp
    value = np.einsum("ij,ij->i", dx, (x @ a.T) - (xp @ a.T))
    report = build_report(
        "stable_game",
        ABS_TOL - value,
        pair_witness(x, xp, None),
        g.n,
        statistic=float(value.max()),
    )
    max_eig = tangent_max_eigenvalue(g)
    stable = max_eig <= PSD_TOL
    logger.info(
        "game %s: tangent max eigenvalue %.3e (%s), %d sampled violations",
        g.name or "<unnamed>",
        max_eig,
        "stable" if stable else "not stable",
        report.violations,
    )
    return StabilityReport(
        **report.model_dump(),
        tangent_max_eigenvalue=max_eig,
        stable=stable,
    )


class GameService:
    def __init__(self, repo: GameRepository):
        self.repo = repo

    def load(self, path: str) -> MatrixGame:
        return self.repo.get(path)

    def save(self, path: str, game: MatrixGame) -> None:
        self.repo.save(path, game)

    def analyze(self, game: MatrixGame, samples: int, seed: int) -> StabilityReport:
        ens = SampleEnsemble(n=game.n, count=samples, seed=seed)
        return check_stable_game(game, ens)
