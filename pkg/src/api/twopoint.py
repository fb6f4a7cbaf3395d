from fractions import Fraction
from typing import Literal, Optional

from fastapi import APIRouter, HTTPException, Query, status

from src.api.utils import resolve_family, unprocessable
from src.conf.config import settings
from src.schemas import TwoPointCheckResponse, TwoPointResponse
from src.services.errors import CartoError
from src.services.twopoint import check_identities, closed_form, compare_provenances, solve_recurrence


router = APIRouter(prefix="/twopoint", tags=["twopoint"])


def _weight(z: Optional[str]) -> Fraction | None:
    if z is None:
        return None
    try:
        return Fraction(z)
    except (ValueError, ZeroDivisionError):
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=f"face weight must be a rational, got {z!r}",
        )


@router.get("/{family}", response_model=TwoPointResponse)
def read_two_point(
    family: str,
    i: int = Query(default=1, ge=1, description="Largest distance index"),
    order: int = Query(default=settings.DEFAULT_ORDER, ge=0),
    provenance: Literal["recurrence", "closed_form"] = "closed_form",
    z: Optional[str] = Query(default=None, description="Rational face weight for two-parameter families"),
) -> TwoPointResponse:
    """
    Compute the two-point series of a family.

    Args:
        family (str): Family name or alias.
        i (int): Largest distance index.
        order (int): Truncation order in ``t``.
        provenance (str): ``recurrence`` or ``closed_form``.
        z (Optional[str]): Rational face weight; symbolic when absent.

    Returns:
        TwoPointResponse: Rows, observables and parameters with exact coefficients.
    """

    fam = resolve_family(family)
    solver = solve_recurrence if provenance == "recurrence" else closed_form
    try:
        table = solver(fam.name, i, order, _weight(z))
    except CartoError as e:
        raise unprocessable(e)
    return TwoPointResponse(**table.to_json())


@router.get("/{family}/check", response_model=TwoPointCheckResponse)
def check_two_point(
    family: str,
    i: int = Query(default=3, ge=1),
    order: int = Query(default=6, ge=0),
    z: Optional[str] = None,
) -> TwoPointCheckResponse:
    """
    Compare the recurrence with the closed form and check the structural identities.

    Args:
        family (str): Family name or alias.
        i (int): Largest distance index.
        order (int): Truncation order in ``t``.
        z (Optional[str]): Rational face weight; symbolic when absent.

    Returns:
        TwoPointCheckResponse: Disagreeing keys and the identity results.
    """

    fam = resolve_family(family)
    weight = _weight(z)
    try:
        mismatches = compare_provenances(fam.name, i, order, weight)
        identities = check_identities(closed_form(fam.name, i, order, weight))
    except CartoError as e:
        raise unprocessable(e)
    return TwoPointCheckResponse(
        family=fam.name,
        i_max=i,
        order=order,
        z=None if weight is None else str(weight),
        agree=not mismatches,
        mismatches=mismatches,
        identities=identities,
    )
