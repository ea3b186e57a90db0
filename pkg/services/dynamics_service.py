import logging
import math
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from core.exceptions import (
    IntegrationDivergedError,
    InvalidInputError,
    InvalidReferenceError,
    SolverDivergedError,
)
from core.operators import batch_lse, batch_softmax, lse, softmax
from core.validation import (
    Vector,
    as_mixed_strategy,
    as_payoff_vector,
    as_score_vector,
    as_temperature,
)
from models.domain import MatrixGame, PayoffFunction, Trajectory
from models.models import (
    IntegratorConfig,
    PropertyReport,
    SimulationSummary,
    SolverConfig,
    TrajectorySample,
)
from repositories.trajectory_repository import TrajectoryRepository
from services.equilibrium_service import solve_fixed_point
from services.game_service import payoff_bound
from services.property_service import build_report, pair_witness

logger = logging.getLogger(__name__)

LYAPUNOV_STEP_TOL = 1e-10
LYAPUNOV_RATE_TOL = 1e-3
REST_POINT_TOL = 1e-8
INVARIANT_SET_TOL = 1e-8


def _score_for(g: PayoffFunction, z: ArrayLike, name: str = "z") -> Vector:
    arr = as_score_vector(z, name)
    if arr.size != g.n:
        raise InvalidInputError(f"{name} has {arr.size} entries, game has {g.n} actions")
    return arr


def _field(g: PayoffFunction, lam: float, z: Vector) -> Vector:
    return g.payoff(batch_softmax(z[np.newaxis, :], lam)[0]) - z


def score_field(g: PayoffFunction, lam: float, z: ArrayLike) -> Vector:
    """Exponentially-discounted score dynamics: U(softmax(z)) - z."""
    lam = as_temperature(lam)
    return _field(g, lam, _score_for(g, z))


def _rk4_step(g: PayoffFunction, lam: float, z: Vector, h: float) -> Vector:
    k1 = _field(g, lam, z)
    k2 = _field(g, lam, z + 0.5 * h * k1)
    k3 = _field(g, lam, z + 0.5 * h * k2)
    k4 = _field(g, lam, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    g: PayoffFunction,
    lam: float,
    z0: ArrayLike,
    cfg: IntegratorConfig,
) -> Trajectory:
    """
    Classical fixed-step RK4 on z' = U(softmax(z)) - z.

    Samples are kept every ``cfg.record_every`` steps plus the final state,
    which lands exactly on ``t_end`` (the last step is shortened if needed).
    """
    lam = as_temperature(lam)
    z = _score_for(g, z0, "z0").copy()
    steps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-9))
    logger.info(
        "integrating n=%d, lambda=%g, dt=%g, t_end=%g (%d steps)",
        g.n,
        lam,
        cfg.dt,
        cfg.t_end,
        steps,
    )

    times = [0.0]
    states = [z.copy()]
    t = 0.0
    for k in range(1, steps + 1):
        t_next = cfg.t_end if k == steps else k * cfg.dt
        last_t, last_z = t, z
        z = _rk4_step(g, lam, z, t_next - t)
        t = t_next
        if not np.all(np.isfinite(z)):
            if times[-1] != last_t:
                times.append(last_t)
                states.append(last_z.copy())
            partial = _trajectory(g, lam, times, states)
            logger.error("integration diverged at t=%g after %d steps", t, k)
            raise IntegrationDivergedError(
                f"non-finite state at t={t:g} (step {k})", trajectory=partial
            )
        if k % cfg.record_every == 0 or k == steps:
            times.append(t)
            states.append(z.copy())

    traj = _trajectory(g, lam, times, states)
    logger.info("integration finished: %d samples, final x=%s", len(traj), traj.final_x)
    return traj


def _trajectory(g: PayoffFunction, lam: float, times: list, states: list) -> Trajectory:
    z = np.asarray(states, dtype=np.float64)
    return Trajectory(
        t=np.asarray(times, dtype=np.float64),
        z=z,
        x=batch_softmax(z, lam),
        lam=lam,
        game=g,
    )


def lyapunov_value(z: ArrayLike, z_star: ArrayLike, lam: float) -> float:
    """Bregman divergence of lse: lse(z) - lse(z*) - softmax(z*)'(z - z*)."""
    z = as_score_vector(z)
    z_star = as_score_vector(z_star, "z_star")
    if z.size != z_star.size:
        raise InvalidInputError("z and z_star must have the same length")
    lam = as_temperature(lam)
    return lse(z, lam) - lse(z_star, lam) - float(softmax(z_star, lam) @ (z - z_star))


def lyapunov_series(z: np.ndarray, z_star: Vector, lam: float) -> Vector:
    return (
        batch_lse(z, lam)
        - lse(z_star, lam)
        - (z - z_star) @ softmax(z_star, lam)
    )


def attach_lyapunov(traj: Trajectory, z_star: ArrayLike) -> Trajectory:
    z_star = as_score_vector(z_star, "z_star")
    traj.z_star = z_star
    traj.v = lyapunov_series(traj.z, z_star, traj.lam)
    return traj


def monitor_lyapunov(traj: Trajectory, z_star: ArrayLike, lam: float) -> PropertyReport:
    """
    Discrete dissipation along a recorded trajectory.

    Each recorded step must satisfy V(t_k+1) <= V(t_k) + 1e-10 and
    dV/dt <= -(1/lam) ||softmax(z) - softmax(z*)||^2 + 1e-3, where the bound
    is averaged over both ends of the step.
    """
    lam = as_temperature(lam)
    z_star = as_score_vector(z_star, "z_star")
    if z_star.size != traj.n:
        raise InvalidInputError("z_star does not match the trajectory dimension")
    if traj.game is not None:
        rest = float(np.linalg.norm(_field(traj.game, lam, z_star)))
        if rest > REST_POINT_TOL:
            raise InvalidReferenceError(
                f"z_star is not a rest point: field norm {rest:.3e} > {REST_POINT_TOL:g}"
            )

    v = lyapunov_series(traj.z, z_star, lam)
    dv = np.diff(v)
    dt = np.diff(traj.t)
    gap = np.sum((batch_softmax(traj.z, lam) - softmax(z_star, lam)) ** 2, axis=1) / lam
    bound = -0.5 * (gap[:-1] + gap[1:])
    margins = np.minimum(LYAPUNOV_STEP_TOL - dv, bound + LYAPUNOV_RATE_TOL - dv / dt)
    return build_report(
        "lyapunov_dissipation",
        margins,
        pair_witness(traj.z[:-1], traj.z[1:], lam),
        traj.n,
        lam,
        statistic=float(dv.max()) if dv.size else None,
    )


def replicator_field(x: ArrayLike, u: ArrayLike, lam: float) -> Vector:
    """lam (diag(x) - x x') u; components sum to zero."""
    x = as_mixed_strategy(x)
    u = as_payoff_vector(u, x.size)
    lam = as_temperature(lam)
    return lam * (x * u - x * float(x @ u))


def invariant_set_check(traj: Trajectory, g: MatrixGame) -> PropertyReport:
    """||z(t)||_2 <= max(||z(0)||_2, sqrt(n) M) along the trajectory."""
    norms = np.linalg.norm(traj.z, axis=1)
    radius = max(float(norms[0]), math.sqrt(g.n) * payoff_bound(g))
    return build_report(
        "invariant_set",
        radius + INVARIANT_SET_TOL - norms,
        pair_witness(traj.z, None, traj.lam),
        traj.n,
        traj.lam,
        statistic=float(norms.max()),
    )


class SimulationService:
    """Integrate, attach a Lyapunov reference when one can be solved, persist."""

    def __init__(self, repo: TrajectoryRepository):
        self.repo = repo

    def reference_point(
        self, g: PayoffFunction, lam: float, z0: Vector, solver: SolverConfig
    ) -> Optional[Vector]:
        try:
            result = solve_fixed_point(g, lam, z0, solver)
        except SolverDivergedError as exc:
            logger.warning("no Lyapunov reference: %s", exc)
            return None
        if not result.converged:
            logger.warning(
                "no Lyapunov reference: solver stopped at residual %.3e", result.residual
            )
            return None
        return np.asarray(result.z_star)

    def simulate(
        self,
        g: PayoffFunction,
        lam: float,
        z0: Optional[ArrayLike],
        cfg: IntegratorConfig,
        solver: SolverConfig,
        out: Optional[str] = None,
    ) -> tuple[Trajectory, SimulationSummary]:
        z0 = np.zeros(g.n) if z0 is None else _score_for(g, z0, "z0")
        try:
            traj = integrate(g, lam, z0, cfg)
        except IntegrationDivergedError as exc:
            if out and exc.trajectory is not None:
                self.repo.save(out, exc.trajectory)
            raise

        z_star = self.reference_point(g, lam, z0, solver)
        if z_star is not None:
            attach_lyapunov(traj, z_star)
        if out:
            self.repo.save(out, traj)
        return traj, summarize(traj, include_samples=False)


def summarize(traj: Trajectory, include_samples: bool = True) -> SimulationSummary:
    samples = []
    if include_samples:
        samples = [
            TrajectorySample(
                t=float(traj.t[k]),
                z=traj.z[k].tolist(),
                x=traj.x[k].tolist(),
                v=None if traj.v is None else float(traj.v[k]),
            )
            for k in range(len(traj))
        ]
    residual = (
        float(np.linalg.norm(_field(traj.game, traj.lam, traj.final_z)))
        if traj.game is not None
        else float("nan")
    )
    return SimulationSummary(
        final_x=traj.final_x.tolist(),
        final_z=traj.final_z.tolist(),
        final_v=None if traj.v is None else float(traj.v[-1]),
        rest_point_residual=residual,
        samples=samples,
    )
