import math
from functools import lru_cache
from typing import Literal

import psutil
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return psutil.cpu_count(logical=False) or 1


class Settings(BaseSettings):
    # Application
    app_name: str = "ctflow"
    environment: str = "development"
    log_level: str = "INFO"

    # Parallelism (CTFLOW_THREADS)
    threads: int = Field(default_factory=_default_threads, ge=1)

    # Integrator
    rtol: float = 1e-9
    atol: float = 1e-12
    h_min: float = 1e-12
    max_steps: int = 2_000_000
    blowup_norm: float = 1e30

    # Models
    delta_pole: float = 1e-8
    amp_floor: float = 1e-12
    branch_tol: float = 1e-9
    eigvec_cond_bound: float = 1e8
    mm_eps2_grouping: Literal["grouped", "ungrouped"] = "grouped"
    newton_max_iter: int = 50

    # Spectral
    spectral_span: float = 32 * 2 * math.pi
    spectral_samples: int = 4096
    peak_rel_threshold: float = 1e-3

    # Detection
    energy_ratio_threshold: float = 1e-3
    tail_fraction: float = 1e-6
    growth_n_poly: int = 1
    growth_window: float = 0.25

    model_config = SettingsConfigDict(env_file=".env", env_prefix="CTFLOW_", extra="ignore")

    @property
    def debug(self) -> bool:
        return self.log_level.upper() == "DEBUG"


@lru_cache
def get_settings() -> Settings:
    return Settings()
