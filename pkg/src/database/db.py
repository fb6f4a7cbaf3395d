import contextlib
from pathlib import Path

from sqlalchemy.engine import make_url
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.ext.asyncio import (
    AsyncEngine,
    async_sessionmaker,
    create_async_engine,
)

from src.conf.config import settings
from src.services.errors import CartoError


def ensure_sqlite_dir(url: str) -> None:
    """Create the parent directory of a file-backed sqlite database."""
    parsed = make_url(url)
    if parsed.get_backend_name() == "sqlite" and parsed.database not in (None, "", ":memory:"):
        Path(parsed.database).parent.mkdir(parents=True, exist_ok=True)


class DatabaseSessionManager:
    def __init__(self, url: str):
        ensure_sqlite_dir(url)
        self._engine: AsyncEngine | None = create_async_engine(url)
        self._session_maker: async_sessionmaker = async_sessionmaker(
            autoflush=False, autocommit=False, expire_on_commit=False, bind=self._engine
        )

    @property
    def engine(self) -> AsyncEngine:
        if self._engine is None:
            raise CartoError("Database engine is not initialized")
        return self._engine

    async def close(self) -> None:
        if self._engine is not None:
            await self._engine.dispose()

    @contextlib.asynccontextmanager
    async def session(self):
        if self._session_maker is None:
            raise CartoError("Database session is not initialized")
        session = self._session_maker()
        try:
            yield session
        except SQLAlchemyError:
            await session.rollback()
            raise
        finally:
            await session.close()


sessionmanager = DatabaseSessionManager(settings.database_url)


async def get_db():
    async with sessionmanager.session() as session:
        yield session
