from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(extra="allow", env_file=".env")
    # ---------------------- OPERATORS ----------------------
    DEFAULT_LAMBDA: float = Field(1.0, gt=0)

    # ---------------------- INTEGRATOR ----------------------
    DEFAULT_DT: float = Field(0.01, gt=0)
    DEFAULT_T_END: float = Field(50.0, gt=0)
    DEFAULT_RECORD_EVERY: int = Field(10, ge=1)

    # ---------------------- FIXED-POINT SOLVER ----------------------
    SOLVER_TOL: float = Field(1e-10, gt=0)
    SOLVER_MAX_ITER: int = Field(100_000, ge=1)
    SOLVER_DAMPING: float = Field(0.5, gt=0, le=1)

    # ---------------------- PROPERTY SUITE ----------------------
    ENSEMBLE_SAMPLES: int = Field(10_000, ge=1)
    ENSEMBLE_LOW: float = -50.0
    ENSEMBLE_HIGH: float = 50.0
    ENSEMBLE_DIMENSIONS: list[int] = [2, 3, 5, 10]
    ENSEMBLE_LAMBDAS: list[float] = [0.1, 0.5, 1.0, 2.0, 10.0]
    DEFAULT_SEED: int = 7
    ARGMAX_ORACLE_MAX_ITER: int = Field(100_000, ge=1)
    ARGMAX_ORACLE_SAMPLES: int = Field(100, ge=1)
    GUMBEL_DRAWS: int = Field(1_000_000, ge=1)

    # ---------------------- APP SETTINGS ----------------------
    LOG_LEVEL: str = "INFO"
    DEBUG: bool = False
    PROJECT_NAME: str = "Softmax Operator Toolkit"


settings = Settings()
