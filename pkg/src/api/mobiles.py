from fastapi import APIRouter, Depends, Query
from sqlalchemy.ext.asyncio import AsyncSession

from src.api.utils import unprocessable
from src.database.db import get_db
from src.schemas import MobileCountResponse
from src.services.counting import CountingService
from src.services.errors import CartoError
from src.services.mobiles import Flavor


router = APIRouter(prefix="/mobiles", tags=["mobiles"])


@router.get("/count", response_model=MobileCountResponse)
async def count_mobiles(
    n: int = Query(ge=0, description="Size of the mobiles"),
    label: int = Query(default=1, ge=1, description="Root label"),
    p: int = Query(default=2, ge=1, description="Black degree"),
    free: bool = Query(default=False, description="Allow any black degree, sized by edges"),
    descending: bool = False,
    floating: bool = False,
    db: AsyncSession = Depends(get_db),
) -> MobileCountResponse:
    """
    Count planted mobiles through the counting-table cache.

    Args:
        n (int): Size of the mobiles.
        label (int): Root label.
        p (int): Black degree, ignored when ``free`` is set.
        free (bool): Allow any black degree.
        descending (bool): Require descending black types.
        floating (bool): Allow any positive minimal label.
        db (AsyncSession): The database session dependency.

    Returns:
        MobileCountResponse: The exact count.
    """

    try:
        flavor = Flavor(None if free else p, descending, floating)
        count = await CountingService(db).count(flavor, n, label)
    except CartoError as e:
        raise unprocessable(e)
    return MobileCountResponse(
        p=flavor.p, descending=descending, floating=floating, n=n, label=label, count=str(count)
    )
