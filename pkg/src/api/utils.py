import logging

from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy import text
from sqlalchemy.ext.asyncio import AsyncSession

from src.database.db import get_db
from src.services.errors import CartoError
from src.services.twopoint import Family, get_family


router = APIRouter(tags=["utils"])
logger = logging.getLogger(__name__)


def resolve_family(name: str) -> Family:
    """
    Resolve a family tag from a path, answering 404 when it is unknown.

    Args:
        name (str): A family name or alias.

    Returns:
        Family: The resolved family.
    """

    try:
        return get_family(name)
    except CartoError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))


def unprocessable(error: CartoError) -> HTTPException:
    """Translate a domain error raised by a computation into a 422 response."""

    return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))


@router.get("/healthchecker")
async def healthchecker(db: AsyncSession = Depends(get_db)) -> dict:
    """
    Health check endpoint to verify that the counting cache database answers.

    Args:
        db (AsyncSession): The database session dependency.

    Returns:
        dict: A message indicating the health status of the application.
    """

    try:
        result = await db.execute(text("SELECT 1"))
        result = result.scalar_one_or_none()

        if result is None:
            raise HTTPException(
                status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
                detail="Database is not configured correctly",
            )
        return {"message": "carto is up"}
    except HTTPException:
        raise
    except Exception as e:
        logger.error("health check failed: %s", e)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail="Error connecting to the database",
        )
