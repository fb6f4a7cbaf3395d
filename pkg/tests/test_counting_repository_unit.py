import pytest
from unittest.mock import AsyncMock, MagicMock
from sqlalchemy.ext.asyncio import AsyncSession

from src.conf.config import settings
from src.database.models import CacheMeta, CountingTable
from src.repository.counting import CountingRepository
from src.services.errors import CapacityError
from src.services.mobiles import Flavor, counting_table


@pytest.fixture
def mock_session():
    mock_session = AsyncMock(spec=AsyncSession)
    return mock_session


@pytest.fixture
def counting_repository(mock_session):
    return CountingRepository(mock_session)


def scalars_result(rows):
    mock_result = MagicMock()
    mock_result.scalars.return_value.all.return_value = rows
    mock_result.scalars.return_value.first.return_value = rows[0] if rows else None
    return mock_result


@pytest.mark.asyncio
async def test_fresh_cache_gets_a_header(counting_repository, mock_session):
    # Setup mock
    mock_session.execute = AsyncMock(return_value=scalars_result([]))

    # Call method
    header = await counting_repository.check_header()

    # Assertions
    assert header.magic == settings.CACHE_MAGIC
    assert header.version == settings.CACHE_VERSION
    mock_session.add.assert_called_once()
    mock_session.commit.assert_awaited_once()
    mock_session.refresh.assert_awaited_once_with(header)


@pytest.mark.asyncio
async def test_matching_header_is_kept(counting_repository, mock_session):
    # Setup mock
    stored = CacheMeta(id=1, magic=settings.CACHE_MAGIC, version=settings.CACHE_VERSION)
    mock_session.execute = AsyncMock(return_value=scalars_result([stored]))

    # Call method
    header = await counting_repository.check_header()

    # Assertions
    assert header is stored
    mock_session.add.assert_not_called()


@pytest.mark.asyncio
async def test_stale_header_is_rejected(counting_repository, mock_session):
    # Setup mock
    stored = CacheMeta(id=1, magic=settings.CACHE_MAGIC, version=settings.CACHE_VERSION + 1)
    mock_session.execute = AsyncMock(return_value=scalars_result([stored]))

    # Call method and assertions
    with pytest.raises(CapacityError, match="cache format"):
        await counting_repository.check_header()


@pytest.mark.asyncio
async def test_get_missing_table(counting_repository, mock_session):
    # Setup mock
    mock_session.execute = AsyncMock(return_value=scalars_result([]))

    # Call method
    table = await counting_repository.get_table(Flavor(p=2))

    # Assertions
    assert table is None


@pytest.mark.asyncio
async def test_get_table_rebuilds_counts(counting_repository, mock_session):
    # Setup mock
    counts = counting_table(Flavor(p=2), 2, 5)
    rows = [
        CountingTable(p=2, descending=False, floating=True, order=2, max_label=5, n=n, label=label, count=str(c))
        for n, label, c in counts.rows()
    ]
    mock_session.execute = AsyncMock(return_value=scalars_result(rows))

    # Call method
    table = await counting_repository.get_table(Flavor(p=2))

    # Assertions
    assert table == counts
    assert table.plain(1, 1) == 2


@pytest.mark.asyncio
async def test_save_table(counting_repository, mock_session):
    # Setup mock
    counts = counting_table(Flavor(p=3, descending=True), 2, 7)

    # Call method
    written = await counting_repository.save_table(counts)

    # Assertions
    assert written == len(counts.rows())
    mock_session.execute.assert_awaited_once()
    stored = mock_session.add_all.call_args.args[0]
    assert all(row.p == 3 and row.descending and row.floating for row in stored)
    assert {(row.n, row.label, int(row.count)) for row in stored} == set(counts.rows())
    mock_session.commit.assert_awaited_once()


@pytest.mark.asyncio
async def test_clear(counting_repository, mock_session):
    # Call method
    await counting_repository.clear()

    # Assertions
    assert mock_session.execute.await_count == 2
    mock_session.commit.assert_awaited_once()
