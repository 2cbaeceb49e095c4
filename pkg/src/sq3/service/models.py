from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

Backend = Literal["exact", "float"]


class GroupRequest(BaseModel):
    spec: str = Field(..., description='Du Val identifier, e.g. "duval:29" or "duval:11a(m=2,n=3)"')
    backend: Backend = "exact"
    eps: Optional[float] = Field(None, gt=0, description="float backend tolerance")


class BoundModel(BaseModel):
    radians: float
    cos_sign: int
    cos2: str
    cos2_float: float
    exact: bool
    over_pi: Optional[float] = Field(None, description="pi / radians")


class DiameterResponse(BaseModel):
    spec: str
    backend: str
    order: int
    orbit_size: int
    stabilizer_order: int
    layer_cosines: list[float]
    vertices: int
    face_sides: dict[int, int] = {}
    degeneracy: Optional[str] = None
    bound: BoundModel
    warnings: list[str] = []


class OrbitResponse(BaseModel):
    spec: str
    backend: str
    order: int
    stabilizer_order: int
    layers: list[list[list[str]]]
    layer_cosines: list[float]


class CellResponse(BaseModel):
    spec: str
    cell: dict[str, Any]
    warnings: list[str] = []


class RowModel(BaseModel):
    family: str
    params: dict[str, Any] = {}
    expected: str
    expected_radians: float
    computed_radians: Optional[float]
    exact: bool
    status: Literal["match", "mismatch", "skipped"]
    note: str = ""
    extra: dict[str, Any] = {}


class TableResponse(BaseModel):
    table: str
    backend: str
    rows: list[RowModel]
    mismatches: int


class HypercubeResponse(BaseModel):
    n: int
    expected: str
    expected_radians: float
    computed_radians: float
    method: str
    exact: bool
    status: Literal["match", "mismatch"]


class CheckModel(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class ValidateResponse(BaseModel):
    spec: str
    datum: str
    valid: bool
    checks: list[CheckModel]


class ErrorResponse(BaseModel):
    error: str
    detail: str
    position: Optional[int] = None
