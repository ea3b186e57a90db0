"""
Softmax operator toolkit
---------------------------------------
Pydantic models (configs / reports / request-response DTOs).

Numerics work on numpy arrays; everything that crosses a boundary (CLI flags,
HTTP bodies, JSON artifacts) is described here as plain lists and floats.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class CheckStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"


class Subcommand(str, Enum):
    SIMULATE = "simulate"
    EQUILIBRIUM = "equilibrium"
    VERIFY = "verify"
    REPLICATOR = "replicator"


# ---------------------- SAMPLING / REPORTS ----------------------


class SampleEnsemble(BaseModel):
    n: int = Field(..., ge=2)
    count: int = Field(..., ge=1)
    lo: float = -50.0
    hi: float = 50.0
    seed: int = 0

    @model_validator(mode="after")
    def check_range(self):
        if not (float("-inf") < self.lo < self.hi < float("inf")):
            raise ValueError("coordinate range must be finite with lo < hi")
        return self


class Witness(BaseModel):
    z: list[float]
    z_prime: Optional[list[float]] = None
    lam: Optional[float] = Field(None, serialization_alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class PropertyReport(BaseModel):
    """
    Outcome of one property check.

    ``worst_margin`` is the smallest slack left after the tolerance is applied,
    so a sample violates the property exactly when its margin is negative.
    ``statistic`` carries the raw extreme quantity (minimum inner product,
    maximum Lipschitz ratio, ...).
    """

    property: str
    n_samples: int
    violations: int
    worst_margin: Optional[float] = None
    statistic: Optional[float] = None
    dimension: Optional[int] = None
    lam: Optional[float] = Field(None, serialization_alias="lambda")
    status: CheckStatus = CheckStatus.PASSED
    witness: Optional[Witness] = None

    model_config = ConfigDict(populate_by_name=True)

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASSED


class StabilityReport(PropertyReport):
    tangent_max_eigenvalue: float
    stable: bool


class SuiteReport(BaseModel):
    passed: bool
    reports: list[PropertyReport] = []


# ---------------------- SOLVER / INTEGRATOR CONFIG ----------------------


class IntegratorConfig(BaseModel):
    dt: float = Field(0.01, gt=0)
    t_end: float = Field(50.0, gt=0)
    record_every: int = Field(10, ge=1)

    @model_validator(mode="after")
    def check_horizon(self):
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        return self


class SolverConfig(BaseModel):
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(100_000, ge=1)
    damping: float = Field(0.5, gt=0, le=1)


class FixedPointResult(BaseModel):
    z_star: list[float]
    x_star: list[float]
    residual: float
    iterations: int
    converged: bool
    residual_history: list[float] = []


class EquilibriumRecord(BaseModel):
    """Serialized form of a fixed-point solve."""

    z_star: list[float]
    x_star: list[float]
    residual: float
    iterations: int
    converged: bool
    certified_contraction: bool
    lam: float = Field(..., serialization_alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class ContractionCertificate(BaseModel):
    bound: float
    certified: bool


# ---------------------- FILES / MANIFEST ----------------------


class GameFile(BaseModel):
    n: int = Field(..., ge=2)
    payoff_matrix: list[list[float]]
    name: Optional[str] = None

    @model_validator(mode="after")
    def check_square(self):
        if len(self.payoff_matrix) != self.n or any(
            len(row) != self.n for row in self.payoff_matrix
        ):
            raise ValueError(f"payoff_matrix must be {self.n}x{self.n}")
        return self


class RunManifest(BaseModel):
    subcommand: Subcommand
    game: Optional[str] = None
    lambdas: list[float] = Field(default_factory=lambda: [1.0])
    z0: Optional[list[float]] = None
    x: Optional[list[float]] = None
    u: Optional[list[float]] = None
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    samples: int = Field(10_000, ge=1)
    dimensions: list[int] = Field(default_factory=lambda: [2, 3, 5, 10])
    seed: int = 7
    out: Optional[str] = None

    @field_validator("lambdas")
    @classmethod
    def check_lambdas(cls, value: list[float]) -> list[float]:
        if not value or any(not (lam > 0) for lam in value):
            raise ValueError("every lambda must be > 0")
        return value

    @field_validator("dimensions")
    @classmethod
    def check_dimensions(cls, value: list[int]) -> list[int]:
        if not value or any(n < 2 for n in value):
            raise ValueError("every dimension must be >= 2")
        return value

    @property
    def lam(self) -> float:
        return self.lambdas[0]


# ---------------------- HTTP DTOs ----------------------


class SoftmaxRequest(BaseModel):
    z: list[float] = Field(..., min_length=2)
    lam: float = Field(1.0, gt=0, alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class SoftmaxResponse(BaseModel):
    softmax: list[float]
    lse: float
    jacobian: list[list[float]]


class GameRequest(BaseModel):
    payoff_matrix: list[list[float]]
    name: Optional[str] = None


class PayoffRequest(GameRequest):
    x: list[float]


class PayoffResponse(BaseModel):
    payoff: list[float]
    expected_payoff: float
    payoff_bound: float


class StabilityRequest(GameRequest):
    samples: int = Field(1000, ge=1)
    seed: int = 0


class SimulateRequest(GameRequest):
    lam: float = Field(1.0, gt=0, alias="lambda")
    z0: Optional[list[float]] = None
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)

    model_config = ConfigDict(populate_by_name=True)


class TrajectorySample(BaseModel):
    t: float
    z: list[float]
    x: list[float]
    v: Optional[float] = None


class SimulationSummary(BaseModel):
    final_x: list[float]
    final_z: list[float]
    final_v: Optional[float] = None
    rest_point_residual: float
    samples: list[TrajectorySample] = []


class ReplicatorRequest(BaseModel):
    x: list[float] = Field(..., min_length=2)
    u: list[float] = Field(..., min_length=2)
    lam: float = Field(1.0, gt=0, alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class ReplicatorResponse(BaseModel):
    field: list[float]


class EquilibriumRequest(GameRequest):
    lam: float = Field(1.0, gt=0, alias="lambda")
    z0: Optional[list[float]] = None
    solver: SolverConfig = Field(default_factory=SolverConfig)

    model_config = ConfigDict(populate_by_name=True)


class VerifyRequest(BaseModel):
    dimensions: list[int] = Field(default_factory=lambda: [2, 3])
    lambdas: list[float] = Field(default_factory=lambda: [1.0])
    samples: int = Field(1000, ge=1)
    seed: int = 7
