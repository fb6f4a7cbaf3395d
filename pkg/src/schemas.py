from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class TwoPointResponse(BaseModel):
    family: str
    provenance: Literal["recurrence", "closed_form"]
    i_max: int
    order: int
    z: Optional[str] = Field(default=None, description="Rational face weight, exact")
    series: dict[str, dict[str, Any]]
    parameters: dict[str, dict[str, Any]] = Field(default_factory=dict)


class TwoPointCheckResponse(BaseModel):
    family: str
    i_max: int
    order: int
    z: Optional[str] = None
    agree: bool
    mismatches: list[str]
    identities: dict[str, bool]


class AsymptoticsResponse(BaseModel):
    family: str
    i: int
    e_up: str
    e_level: Optional[str] = None
    e_down: str
    v: Optional[str] = None


class RootedClassModel(BaseModel):
    encoding: str
    faces: int
    count_by_type: dict[str, int]


class EnumerationResponse(BaseModel):
    family: str
    n: int
    kind: Optional[Literal["root", "face"]] = None
    total: int
    pointed_total: int
    classes: list[RootedClassModel]


class MobileCountResponse(BaseModel):
    p: Optional[int] = None
    descending: bool
    floating: bool
    n: int
    label: int
    count: str = Field(description="Exact count as a decimal integer")

    model_config = ConfigDict(from_attributes=True)
