"""FastAPI application; every endpoint is a thin wrapper over the library."""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..algebraic import FieldElement
from ..goursat import InvalidParameters, SpecParseError, instantiate, validate
from ..orbit_cell import CellError, cell_statistics, cell_to_json
from ..quaternion import UnsupportedExact, get_backend
from ..tables import TABLES, cell_for, hypercube_bound, run_table
from .models import (
    BoundModel,
    CellResponse,
    CheckModel,
    DiameterResponse,
    GroupRequest,
    HypercubeResponse,
    OrbitResponse,
    RowModel,
    TableResponse,
    ValidateResponse,
)


def _backend(req: GroupRequest):
    return get_backend(req.backend, req.eps)


def _resolve(req: GroupRequest):
    try:
        G, cell, note = cell_for(req.spec, None, _backend(req))
    except UnsupportedExact as exc:
        raise HTTPException(422, detail=str(exc))
    return G, cell, [note] if note else []


def _bound_model(bd) -> BoundModel:
    return BoundModel(
        radians=bd.radians,
        cos_sign=bd.cos_sign,
        cos2=str(bd.cos2) if isinstance(bd.cos2, FieldElement) else repr(float(bd.cos2)),
        cos2_float=float(bd.cos2),
        exact=bd.exact,
        over_pi=math.pi / bd.radians if bd.radians > 0 else None,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="sq3", version=__version__)

    @app.exception_handler(SpecParseError)
    def _parse_error(request, exc: SpecParseError):
        return JSONResponse(status_code=400, content={"error": "parse", "detail": str(exc), "position": exc.position})

    @app.exception_handler(InvalidParameters)
    def _invalid(request, exc: InvalidParameters):
        return JSONResponse(status_code=400, content={"error": "invalid-parameters", "detail": str(exc)})

    @app.exception_handler(CellError)
    def _cell_error(request, exc: CellError):
        return JSONResponse(status_code=500, content={"error": "cell", "detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/diameter", response_model=DiameterResponse)
    def diameter(req: GroupRequest):
        G, cell, warnings = _resolve(req)
        stats = cell_statistics(cell) if cell.vertices else {"vertices": 0, "face_sides": {}}
        return DiameterResponse(
            spec=G.spec,
            backend=G.backend.name,
            order=G.order,
            orbit_size=len(cell.orbit),
            stabilizer_order=cell.orbit.stabilizer_order,
            layer_cosines=cell.orbit.layer_cosines(),
            vertices=stats["vertices"],
            face_sides=stats["face_sides"],
            degeneracy=cell.degeneracy,
            bound=_bound_model(cell.bound),
            warnings=warnings + cell.notes,
        )

    @app.post("/orbit", response_model=OrbitResponse)
    def orbit(req: GroupRequest):
        G, cell, _ = _resolve(req)
        orb = cell.orbit
        b = orb.backend
        layers = [[[str(c) if b.exact else repr(float(c)) for c in orb.points[i]] for i in layer] for layer in orb.layers]
        return OrbitResponse(spec=G.spec, backend=b.name, order=G.order, stabilizer_order=orb.stabilizer_order,
                             layers=layers, layer_cosines=orb.layer_cosines())

    @app.post("/cell", response_model=CellResponse)
    def cell(req: GroupRequest):
        G, c, warnings = _resolve(req)
        return CellResponse(spec=G.spec, cell=cell_to_json(c), warnings=warnings)

    @app.get("/table/{which}", response_model=TableResponse)
    def table(which: str, backend: str = "exact"):
        if which not in TABLES:
            raise HTTPException(404, detail=f"unknown table {which!r}; choose from {', '.join(TABLES)}")
        rows = run_table(which, get_backend(backend))
        models = [RowModel(**r.as_dict()) for r in rows]
        return TableResponse(table=which, backend=backend, rows=models,
                             mismatches=sum(r.status == "mismatch" for r in rows))

    @app.get("/hypercube/{n}", response_model=HypercubeResponse)
    def hypercube(n: int, backend: str = "exact"):
        if n < 1:
            raise HTTPException(400, detail="n must be >= 1")
        return HypercubeResponse(**hypercube_bound(n, get_backend(backend)))

    @app.post("/validate", response_model=ValidateResponse)
    def validate_group(req: GroupRequest):
        try:
            G = instantiate(req.spec, None, _backend(req))
        except UnsupportedExact:
            G = instantiate(req.spec, None, get_backend("float"))
        report = validate(G.datum, expected=G)
        checks = [CheckModel(name=n, ok=ok, detail=d) for n, ok, d in report.checks]
        closure = G.verify_closure()
        checks.append(CheckModel(name="closed under composition", ok=closure))
        order_ok = G.order == G.expected_order()
        checks.append(CheckModel(name="order = |R||l|/2", ok=order_ok, detail=f"{G.order} vs {G.expected_order()}"))
        return ValidateResponse(spec=G.spec, datum=G.datum.describe(), valid=all(c.ok for c in checks), checks=checks)

    return app


app = create_app()
