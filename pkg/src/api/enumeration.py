from typing import Literal, Optional

from fastapi import APIRouter, Query

from src.api.utils import resolve_family, unprocessable
from src.schemas import EnumerationResponse
from src.services.errors import CartoError
from src.services.oracle import enumerate_family, pointed_rooted_profile


router = APIRouter(prefix="/enumerate", tags=["enumerate"])


@router.get("/{family}", response_model=EnumerationResponse)
def read_enumeration(
    family: str,
    n: int = Query(ge=1, description="Edges, or dark faces for the 3-families"),
    profile: Optional[Literal["root", "face"]] = None,
) -> EnumerationResponse:
    """
    Enumerate the rooted objects of a family, optionally profiled over pointed vertices.

    Args:
        family (str): Family name or alias.
        n (int): Size.
        profile (Optional[str]): ``root`` or ``face`` to classify pointed versions.

    Returns:
        EnumerationResponse: The rooted classes and their pointed counts.
    """

    fam = resolve_family(family)
    try:
        if profile is None:
            report = enumerate_family(fam.name, n)
        else:
            report = pointed_rooted_profile(n, fam.name, kind=profile)
    except CartoError as e:
        raise unprocessable(e)
    return EnumerationResponse(**report.to_json())
