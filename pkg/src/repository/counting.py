"""
Counting Repository Module
This module provides data access to the cached counting tables of planted mobiles
and to the header that tags the cache format.
"""

import logging

from sqlalchemy import delete, select
from sqlalchemy.ext.asyncio import AsyncSession

from src.conf.config import settings
from src.database.models import CacheMeta, CountingTable
from src.services.errors import CapacityError
from src.services.mobiles import Flavor, MobileCounts


logger = logging.getLogger(__name__)


class CountingRepository:
    def __init__(self, session: AsyncSession):
        """
        Initialize the CountingRepository.

        Args:
            session (AsyncSession): An asynchronous database session.
        """

        self.db = session

    async def get_header(self) -> CacheMeta | None:
        """
        Retrieve the cache header.

        Returns:
            CacheMeta | None: The header row, or None on a fresh cache.
        """

        stmt = select(CacheMeta).order_by(CacheMeta.id)
        result = await self.db.execute(stmt)
        return result.scalars().first()

    async def write_header(self) -> CacheMeta:
        """
        Write the header of the configured cache format.

        Returns:
            CacheMeta: The stored header.
        """

        header = CacheMeta(magic=settings.CACHE_MAGIC, version=settings.CACHE_VERSION)
        self.db.add(header)
        await self.db.commit()
        await self.db.refresh(header)
        return header

    async def check_header(self) -> CacheMeta:
        """
        Check the cache header, writing one on a fresh cache.

        Returns:
            CacheMeta: The header in force.

        Raises:
            CapacityError: If the stored magic or version differ from the configured format.
        """

        header = await self.get_header()
        if header is None:
            return await self.write_header()
        if header.magic != settings.CACHE_MAGIC or header.version != settings.CACHE_VERSION:
            raise CapacityError(
                f"cache format {header.magic} v{header.version} does not match "
                f"{settings.CACHE_MAGIC} v{settings.CACHE_VERSION}"
            )
        return header

    async def clear(self) -> None:
        """Delete every counting row and the header."""

        await self.db.execute(delete(CountingTable))
        await self.db.execute(delete(CacheMeta))
        await self.db.commit()

    async def get_table(self, flavor: Flavor) -> MobileCounts | None:
        """
        Retrieve the stored table of a flavor.

        Args:
            flavor (Flavor): Degree and descent discipline; the label discipline is ignored.

        Returns:
            MobileCounts | None: The stored table, or None if nothing is stored.
        """

        stmt = select(CountingTable).filter_by(p=flavor.p, descending=flavor.descending, floating=True)
        result = await self.db.execute(stmt)
        rows = result.scalars().all()
        if not rows:
            return None
        order, max_label = rows[0].order, rows[0].max_label
        return MobileCounts.from_rows(
            Flavor(flavor.p, flavor.descending, floating=True),
            order,
            max_label,
            [(row.n, row.label, int(row.count)) for row in rows],
        )

    async def save_table(self, counts: MobileCounts) -> int:
        """
        Store a table, replacing whatever was stored for its flavor.

        Args:
            counts (MobileCounts): The table to store.

        Returns:
            int: Number of rows written.
        """

        flavor = counts.flavor
        await self.db.execute(
            delete(CountingTable).filter_by(p=flavor.p, descending=flavor.descending, floating=True)
        )
        rows = [
            CountingTable(
                p=flavor.p,
                descending=flavor.descending,
                floating=True,
                order=counts.order,
                max_label=counts.max_label,
                n=n,
                label=label,
                count=str(count),
            )
            for n, label, count in counts.rows()
        ]
        self.db.add_all(rows)
        await self.db.commit()
        logger.debug("stored %d counting rows for %s", len(rows), flavor.key())
        return len(rows)
