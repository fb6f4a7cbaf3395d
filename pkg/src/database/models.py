from datetime import datetime

from sqlalchemy import Boolean, Integer, String, Text, UniqueConstraint, func
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column
from sqlalchemy.sql.sqltypes import DateTime


class Base(DeclarativeBase):
    pass


class CacheMeta(Base):
    """
    Header row tagging the format of the counting-table cache.

    Attributes:
        id (int): The unique identifier of the header.
        magic (str): Format tag, compared with ``settings.CACHE_MAGIC``.
        version (int): Format version, compared with ``settings.CACHE_VERSION``.
        created_at (datetime): When the cache was initialized.
    """

    __tablename__ = "cache_meta"
    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    magic: Mapped[str] = mapped_column(String(16), nullable=False)
    version: Mapped[int] = mapped_column(Integer, nullable=False)
    created_at: Mapped[datetime] = mapped_column(DateTime, server_default=func.now())


class CountingTable(Base):
    """
    One count of planted floating mobiles.

    A stored table for a flavor covers every size up to ``order`` and every root label
    up to ``max_label``; both bounds are repeated on each row of the table.

    Attributes:
        id (int): The unique identifier of the row.
        p (int | None): Black degree, ``None`` for free degrees.
        descending (bool): Whether black vertices carry descending types.
        floating (bool): Label discipline of the stored counts.
        order (int): Largest size of the stored table.
        max_label (int): Largest label of the stored table.
        n (int): Size of the counted mobiles.
        label (int): Root label.
        count (str): The count as an exact decimal integer.
    """

    __tablename__ = "counting_tables"
    __table_args__ = (UniqueConstraint("p", "descending", "floating", "n", "label", name="uq_counting_entry"),)
    id: Mapped[int] = mapped_column(Integer, primary_key=True)
    p: Mapped[int | None] = mapped_column(Integer, nullable=True)
    descending: Mapped[bool] = mapped_column(Boolean, nullable=False, default=False)
    floating: Mapped[bool] = mapped_column(Boolean, nullable=False, default=True)
    order: Mapped[int] = mapped_column(Integer, nullable=False)
    max_label: Mapped[int] = mapped_column(Integer, nullable=False)
    n: Mapped[int] = mapped_column(Integer, nullable=False)
    label: Mapped[int] = mapped_column(Integer, nullable=False)
    count: Mapped[str] = mapped_column(Text, nullable=False)
