from functools import lru_cache
from typing import Tuple

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    project_name: str = "planefield"
    jobs: int = Field(1, ge=1, description="Default worker count, PLANEFIELD_JOBS.")
    chunk_size: int = Field(4096, ge=1, description="Points per evaluation block; independent of jobs.")
    parabolic_tol: float = Field(1e-8, gt=0)
    frobenius_tol: float = Field(1e-8, gt=0)
    r_min: float = Field(1e-3, gt=0, description="Clearance kept from declared singular loci.")
    default_grid: Tuple[int, int, int] = (16, 16, 16)
    overlap_tol: float = Field(1e-9, gt=0)
    eigen_crossing_gap: float = Field(1e-8, gt=0)
    max_path_depth: int = Field(8, ge=0)
    log_level: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="PLANEFIELD_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
