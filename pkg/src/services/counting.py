"""
Counting Module
This module provides cached access to counting tables of planted mobiles. Tables are
read from the cache when they cover a request and computed and stored otherwise.
"""

import asyncio
import logging

from sqlalchemy.ext.asyncio import AsyncSession

from src.conf.config import settings
from src.database.db import DatabaseSessionManager
from src.database.models import Base
from src.repository.counting import CountingRepository
from src.services.errors import CapacityError
from src.services.mobiles import LABEL_FLOOR, Flavor, MobileCounts, counting_table


logger = logging.getLogger(__name__)


class CountingService:
    def __init__(self, db: AsyncSession):
        self.repository = CountingRepository(db)

    async def ensure_format(self) -> None:
        """Check the cache header, clearing the cache when its format is stale."""
        try:
            await self.repository.check_header()
        except CapacityError as err:
            logger.warning("%s; rebuilding the counting cache", err)
            await self.repository.clear()
            await self.repository.write_header()

    async def get_counts(self, flavor: Flavor, order: int, max_label: int | None = None) -> MobileCounts:
        """
        Load a counting table covering the request, computing and storing it when needed.

        Args:
            flavor (Flavor): Degree and descent discipline.
            order (int): Largest size needed.
            max_label (int | None): Largest label needed, ``1 + order * reach`` by default.

        Returns:
            MobileCounts: A table at least as large as the request.
        """
        top = max_label if max_label is not None else LABEL_FLOOR + order * flavor.reach
        await self.ensure_format()
        cached = await self.repository.get_table(flavor)
        if cached is not None and cached.covers(flavor, order, top):
            logger.debug("counting cache hit for %s", flavor.key())
            return cached
        if cached is not None:
            order, top = max(order, cached.order), max(top, cached.max_label)
        counts = counting_table(flavor, order, top)
        await self.repository.save_table(counts)
        logger.info("cached counting table %s up to size %d", flavor.key(), order)
        return counts

    async def count(self, flavor: Flavor, n: int, label: int) -> int:
        """
        Count planted mobiles of one size and root label.

        Args:
            flavor (Flavor): Degree, descent and label discipline.
            n (int): Size.
            label (int): Root label.

        Returns:
            int: Floating counts for a floating flavor, minimal label 1 otherwise.
        """
        counts = await self.get_counts(flavor, n, max(label, LABEL_FLOOR) + n * flavor.reach)
        return counts.planted(n, label) if flavor.floating else counts.plain(n, label)


async def _cached_counts(flavor: Flavor, order: int, max_label: int | None) -> MobileCounts:
    manager = DatabaseSessionManager(settings.database_url)
    try:
        async with manager.engine.begin() as conn:
            await conn.run_sync(Base.metadata.create_all)
        async with manager.session() as session:
            return await CountingService(session).get_counts(flavor, order, max_label)
    finally:
        await manager.close()


def cached_counts(flavor: Flavor, order: int, max_label: int | None = None) -> MobileCounts:
    """
    Synchronous access to the cache under ``settings.CARTO_CACHE_DIR``.

    Args:
        flavor (Flavor): Degree and descent discipline.
        order (int): Largest size needed.
        max_label (int | None): Largest label needed.

    Returns:
        MobileCounts: A table covering the request.
    """
    return asyncio.run(_cached_counts(flavor, order, max_label))
