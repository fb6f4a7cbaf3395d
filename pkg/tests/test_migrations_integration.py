import sqlite3

from alembic import command
from alembic.config import Config


def alembic_config(url: str) -> Config:
    config = Config("alembic.ini")
    config.set_main_option("sqlalchemy.url", url)
    return config


def test_upgrade_creates_cache_tables(tmp_path):
    db_path = tmp_path / "nested" / "carto.db"

    command.upgrade(alembic_config(f"sqlite+aiosqlite:///{db_path}"), "head")

    with sqlite3.connect(db_path) as conn:
        tables = {row[0] for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
    assert {"cache_meta", "counting_tables", "alembic_version"} <= tables


def test_downgrade_drops_cache_tables(tmp_path):
    db_path = tmp_path / "carto.db"
    config = alembic_config(f"sqlite+aiosqlite:///{db_path}")

    command.upgrade(config, "head")
    command.downgrade(config, "base")

    with sqlite3.connect(db_path) as conn:
        tables = {row[0] for row in conn.execute("SELECT name FROM sqlite_master WHERE type='table'")}
    assert "counting_tables" not in tables
