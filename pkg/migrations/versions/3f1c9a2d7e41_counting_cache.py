"""Counting cache

Revision ID: 3f1c9a2d7e41
Revises: 
Create Date: 2026-10-16 10:12:44.531902

"""
from typing import Sequence, Union

from alembic import op
import sqlalchemy as sa


# revision identifiers, used by Alembic.
revision: str = '3f1c9a2d7e41'
down_revision: Union[str, Sequence[str], None] = None
branch_labels: Union[str, Sequence[str], None] = None
depends_on: Union[str, Sequence[str], None] = None


def upgrade() -> None:
    """Upgrade schema."""
    op.create_table('cache_meta',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('magic', sa.String(length=16), nullable=False),
    sa.Column('version', sa.Integer(), nullable=False),
    sa.Column('created_at', sa.DateTime(), server_default=sa.text('(CURRENT_TIMESTAMP)'), nullable=True),
    sa.PrimaryKeyConstraint('id')
    )
    op.create_table('counting_tables',
    sa.Column('id', sa.Integer(), nullable=False),
    sa.Column('p', sa.Integer(), nullable=True),
    sa.Column('descending', sa.Boolean(), nullable=False),
    sa.Column('floating', sa.Boolean(), nullable=False),
    sa.Column('order', sa.Integer(), nullable=False),
    sa.Column('max_label', sa.Integer(), nullable=False),
    sa.Column('n', sa.Integer(), nullable=False),
    sa.Column('label', sa.Integer(), nullable=False),
    sa.Column('count', sa.Text(), nullable=False),
    sa.PrimaryKeyConstraint('id'),
    sa.UniqueConstraint('p', 'descending', 'floating', 'n', 'label', name='uq_counting_entry')
    )


def downgrade() -> None:
    """Downgrade schema."""
    op.drop_table('counting_tables')
    op.drop_table('cache_meta')
