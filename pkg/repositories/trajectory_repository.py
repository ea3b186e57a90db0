import logging
from pathlib import Path

import numpy as np
import pandas as pd

from models.domain import Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class TrajectoryRepository:
    """
    Trajectory CSV: header t,z_1..z_n,x_1..x_n,V with one row per recorded
    sample. The V column is left empty when no reference point is attached.
    """

    def __init__(self, root: Path | None = None):
        self.root = Path(root) if root else None

    def _resolve(self, path: str | Path) -> Path:
        path = Path(path)
        if self.root and not path.is_absolute():
            path = self.root / path
        return path

    @staticmethod
    def to_frame(traj: Trajectory) -> pd.DataFrame:
        n = traj.n
        frame = pd.DataFrame({"t": traj.t})
        for i in range(n):
            frame[f"z_{i + 1}"] = traj.z[:, i]
        for i in range(n):
            frame[f"x_{i + 1}"] = traj.x[:, i]
        frame["V"] = traj.v if traj.v is not None else np.nan
        return frame

    def save(self, path: str | Path, traj: Trajectory) -> Path:
        resolved = self._resolve(path)
        resolved.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame(traj).to_csv(
            resolved, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n"
        )
        logger.info("wrote %d trajectory samples to %s", len(traj), resolved)
        return resolved

    def load(self, path: str | Path, lam: float) -> Trajectory:
        frame = pd.read_csv(self._resolve(path), float_precision="round_trip")
        z = frame.filter(regex=r"^z_\d+$").to_numpy(dtype=np.float64)
        x = frame.filter(regex=r"^x_\d+$").to_numpy(dtype=np.float64)
        v = frame["V"].to_numpy(dtype=np.float64)
        return Trajectory(
            t=frame["t"].to_numpy(dtype=np.float64),
            z=z,
            x=x,
            lam=lam,
            v=None if np.all(np.isnan(v)) else v,
        )
