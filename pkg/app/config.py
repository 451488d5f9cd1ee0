from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = "Deformation Cohomology"
    app_version: str = "1.0.0"
    debug: bool = False
    log_level: str = "INFO"

    # potential entries (rows x cols) a single materialised matrix may have
    entry_budget: int = 5_000_000
    default_qmax: int = 4
    default_nmax: int = 2
    verify_containment: bool = True

    model_config = SettingsConfigDict(env_file=".env", env_prefix="DEFCOH_", case_sensitive=False)


@lru_cache()
def get_settings() -> Settings:
    return Settings()
