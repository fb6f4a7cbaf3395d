import pytest
import pytest_asyncio
from sqlalchemy import func, select
from sqlalchemy.ext.asyncio import async_sessionmaker, create_async_engine

from src.conf.config import settings
from src.database.models import Base, CacheMeta, CountingTable
from src.services.counting import CountingService, cached_counts
from src.services.mobiles import Flavor, counting_table, enumerate_mobiles


@pytest_asyncio.fixture()
async def session():
    engine = create_async_engine("sqlite+aiosqlite:///:memory:")
    async with engine.begin() as conn:
        await conn.run_sync(Base.metadata.create_all)
    async with async_sessionmaker(bind=engine, expire_on_commit=False)() as session:
        yield session
    await engine.dispose()


async def stored_rows(session) -> int:
    result = await session.execute(select(func.count()).select_from(CountingTable))
    return result.scalar_one()


@pytest.mark.asyncio
async def test_computes_then_reads_back(session):
    service = CountingService(session)

    first = await service.get_counts(Flavor(p=2), 3)
    rows = await stored_rows(session)
    second = await service.get_counts(Flavor(p=2), 2)

    assert rows == len(first.rows())
    assert second == first
    assert await stored_rows(session) == rows


@pytest.mark.asyncio
async def test_larger_request_replaces_table(session):
    service = CountingService(session)

    await service.get_counts(Flavor(p=2), 2)
    bigger = await service.get_counts(Flavor(p=2), 4)

    assert bigger.order == 4
    assert await stored_rows(session) == len(bigger.rows())


@pytest.mark.asyncio
@pytest.mark.parametrize("flavor", [Flavor(p=2), Flavor(p=3, descending=True), Flavor(p=None)])
async def test_count_matches_enumeration(session, flavor):
    service = CountingService(session)

    for label in (1, 2, 3):
        assert await service.count(flavor, 2, label) == len(enumerate_mobiles(flavor, 2, label))


@pytest.mark.asyncio
async def test_stale_format_is_rebuilt(session, monkeypatch):
    service = CountingService(session)
    await service.get_counts(Flavor(p=2), 2)

    monkeypatch.setattr(settings, "CACHE_VERSION", settings.CACHE_VERSION + 1)
    counts = await service.get_counts(Flavor(p=2), 2)

    headers = (await session.execute(select(CacheMeta))).scalars().all()
    assert [h.version for h in headers] == [settings.CACHE_VERSION]
    assert counts == counting_table(Flavor(p=2), 2)


def test_cache_file_lives_under_cache_dir(cache_dir):
    counts = cached_counts(Flavor(p=2), 2, 9)

    assert (cache_dir / "carto.db").exists()
    assert cached_counts(Flavor(p=2), 2, 9) == counts
