# Domain entities
# ---------------------------

from dataclasses import dataclass, field
from typing import Optional, Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike

from core.exceptions import InvalidInputError
from core.validation import Matrix, Vector


@runtime_checkable
class PayoffFunction(Protocol):
    """Continuous map from a mixed strategy on the simplex to a payoff vector."""

    n: int

    def payoff(self, x: Vector) -> Vector: ...


@dataclass(frozen=True)
class MatrixGame:
    payoff_matrix: Matrix
    name: Optional[str] = None

    def __post_init__(self):
        a = np.asarray(self.payoff_matrix, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"payoff matrix must be square, got shape {a.shape}")
        if a.shape[0] < 2:
            raise InvalidInputError("a game needs at least 2 actions")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("payoff matrix contains non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "payoff_matrix", a)

    @property
    def n(self) -> int:
        return self.payoff_matrix.shape[0]

    def payoff(self, x: Vector) -> Vector:
        return self.payoff_matrix @ x

    @classmethod
    def from_rows(cls, rows: ArrayLike, name: Optional[str] = None) -> "MatrixGame":
        return cls(np.asarray(rows, dtype=np.float64), name=name)


def rock_paper_scissors() -> MatrixGame:
    return MatrixGame.from_rows(
        [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]],
        name="rock-paper-scissors",
    )


def zero_game(n: int) -> MatrixGame:
    return MatrixGame(np.zeros((n, n)), name=f"zero-{n}")


@dataclass
class Trajectory:
    """
    Recorded samples of the score dynamics.

    Rows of ``z`` and ``x`` line up with ``t``; ``v`` stays None until a
    Lyapunov reference point has been attached.
    """

    t: Vector
    z: Matrix
    x: Matrix
    lam: float
    game: Optional[PayoffFunction] = None
    v: Optional[Vector] = None
    z_star: Optional[Vector] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def n(self) -> int:
        return self.z.shape[1]

    @property
    def final_z(self) -> Vector:
        return self.z[-1]

    @property
    def final_x(self) -> Vector:
        return self.x[-1]
