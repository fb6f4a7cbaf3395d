from fastapi import APIRouter, Query

from src.api.utils import resolve_family, unprocessable
from src.schemas import AsymptoticsResponse
from src.services.asymptotics import asymptotic_constants
from src.services.errors import CartoError


router = APIRouter(prefix="/asymptotics", tags=["asymptotics"])


@router.get("/{family}", response_model=AsymptoticsResponse)
def read_constants(family: str, i: int = Query(default=1, ge=0)) -> AsymptoticsResponse:
    """
    Exact local limit constants at distance ``i``.

    Args:
        family (str): ``GeneralMap`` or ``BipartiteMap``, or an alias.
        i (int): Distance index.

    Returns:
        AsymptoticsResponse: Edge and vertex averages as exact rationals.
    """

    fam = resolve_family(family)
    try:
        constants = asymptotic_constants(fam.name, i)
    except CartoError as e:
        raise unprocessable(e)
    return AsymptoticsResponse(**constants.to_json())
