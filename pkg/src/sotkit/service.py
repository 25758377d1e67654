"""HTTP surface: a stateless solver service wrapping the core package.

Every computation endpoint takes an instance in the shared JSON schema
plus command parameters, and returns the same payload the CLI prints.
Infeasible instances are valid results (HTTP 200 with certificates);
malformed input maps to HTTP 400. Rationals travel as "p/q" strings in
exact mode and as floats in float mode.

Run with:  uvicorn sotkit.service:app
"""

from typing import List, Literal, Optional, Union

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import api
from .errors import InputError, SotError
from .rational import parse_rational
from .selftest import run_selftest

RatValue = Union[str, int, float]
Mode = Literal["exact", "float"]


class PointModel(BaseModel):
    label: str
    coords: Optional[List[RatValue]] = None


class InstanceModel(BaseModel):
    d: int
    X: List[PointModel]
    Y: List[PointModel]
    mu: List[List[RatValue]]
    nu: List[List[RatValue]]
    eta: Optional[List[RatValue]] = None
    cost: Optional[List[List[RatValue]]] = None

    def as_dict(self) -> dict:
        data = self.model_dump(exclude_none=True)
        return data


class InstanceRequest(BaseModel):
    instance: InstanceModel
    mode: Mode = "exact"


class WassersteinRequest(InstanceRequest):
    p: RatValue = 2


class BoundsRequest(InstanceRequest):
    grid: Optional[int] = Field(default=None, ge=1)


class MongeRequest(InstanceRequest):
    nodes: Optional[int] = Field(default=None, ge=1)


class EquilibriumRequest(InstanceRequest):
    production: List[List[RatValue]]


class RefugeeFamily(BaseModel):
    id: str
    q: List[RatValue]


class RefugeeAffiliate(BaseModel):
    id: str
    floors: List[RatValue]


class RefugeeRequest(BaseModel):
    families: List[RefugeeFamily]
    affiliates: List[RefugeeAffiliate]
    scores: List[List[RatValue]]
    nodes: Optional[int] = Field(default=None, ge=1)
    mode: Mode = "exact"


class MarkovRequest(BaseModel):
    variances: List[RatValue]
    mode: Mode = "exact"


class CommandResponse(BaseModel):
    """Envelope shared by all computation results; command-specific fields ride along."""

    model_config = {"extra": "allow"}

    schema_: str = Field(alias="schema")
    command: str
    mode: Mode


class SelftestCase(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    model_config = {"extra": "allow"}

    schema_: str = Field(alias="schema")
    command: str
    passed: bool
    results: List[SelftestCase]


app = FastAPI(
    title="sotkit",
    description="Exact simultaneous-optimal-transport solver and certification service",
)


def _run(func, *args, **kwargs) -> dict:
    try:
        return func(*args, **kwargs)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except SotError as exc:
        # domain preconditions (not two-way, not injective, ...) are client errors
        raise HTTPException(
            status_code=400, detail=f"{type(exc).__name__}: {exc}"
        ) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/solve", response_model=CommandResponse)
def solve(req: InstanceRequest):
    return _run(api.run_solve, req.instance.as_dict(), req.mode)


@app.post("/feasible", response_model=CommandResponse)
def feasible(req: InstanceRequest):
    return _run(api.run_feasible, req.instance.as_dict(), req.mode)


@app.post("/dual", response_model=CommandResponse)
def dual(req: InstanceRequest):
    return _run(api.run_dual, req.instance.as_dict(), req.mode)


@app.post("/equilibrium", response_model=CommandResponse)
def equilibrium(req: EquilibriumRequest):
    return _run(api.run_equilibrium, req.instance.as_dict(), req.production, req.mode)


@app.post("/decompose", response_model=CommandResponse)
def decompose(req: InstanceRequest):
    return _run(api.run_decompose, req.instance.as_dict(), req.mode)


@app.post("/wasserstein", response_model=CommandResponse)
def wasserstein(req: WassersteinRequest):
    try:
        p = parse_rational(req.p)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _run(api.run_wasserstein, req.instance.as_dict(), p, req.mode)


@app.post("/parity", response_model=CommandResponse)
def parity(req: InstanceRequest):
    return _run(api.run_parity, req.instance.as_dict(), req.mode)


@app.post("/bounds", response_model=CommandResponse)
def bounds(req: BoundsRequest):
    return _run(api.run_bounds, req.instance.as_dict(), req.grid, req.mode)


@app.post("/monge", response_model=CommandResponse)
def monge(req: MongeRequest):
    return _run(api.run_monge, req.instance.as_dict(), req.nodes, req.mode)


@app.post("/refugee", response_model=CommandResponse)
def refugee(req: RefugeeRequest):
    data = req.model_dump(exclude_none=True, exclude={"nodes", "mode"})
    return _run(api.run_refugee, data, req.nodes, req.mode)


@app.post("/markov", response_model=CommandResponse)
def markov(req: MarkovRequest):
    return _run(api.run_markov, req.variances, req.mode)


@app.post("/dev/vertex-enumerate", response_model=CommandResponse)
def dev_vertex_enumerate(req: InstanceRequest):
    return _run(api.run_dev_vertex_enumerate, req.instance.as_dict(), req.mode)


@app.get("/selftest", response_model=SelftestResponse)
def selftest():
    return run_selftest()
