import logging
from pathlib import Path

from pydantic import ConfigDict
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    CARTO_CACHE_DIR: str = ".carto-cache"
    DB_URL: str = ""
    CACHE_MAGIC: str = "CARTO-CT"
    CACHE_VERSION: int = 1

    MAX_MAP_EDGES: int = 5
    MAX_HYPERMAP_DARKS: int = 3
    MAX_MOBILE_BLACKS: int = 8
    MAX_SERIES_ORDER: int = 600
    DEFAULT_ORDER: int = 10
    MP_DPS: int = 50

    LOG_LEVEL: str = "INFO"
    JOBS: int = 1

    model_config = ConfigDict(
        extra="ignore", env_file=".env", env_file_encoding="utf-8", case_sensitive=True
    )

    @property
    def database_url(self) -> str:
        """
        Resolve the database URL of the counting-table cache.

        Returns:
            str: ``DB_URL`` when set, otherwise an aiosqlite file under ``CARTO_CACHE_DIR``.
        """
        if self.DB_URL:
            return self.DB_URL
        cache_dir = Path(self.CARTO_CACHE_DIR)
        return f"sqlite+aiosqlite:///{cache_dir / 'carto.db'}"


settings = Settings()


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)-5.5s [%(name)s] %(message)s",
        datefmt="%H:%M:%S",
    )
