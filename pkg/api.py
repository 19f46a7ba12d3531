"""FastAPI service exposing table, weight, reduction, synthesis and monitoring analyses."""
import json
import time
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from config import API_DOCS, DEFAULT_COUNT_MODE, PORT, TABLE_VARIABLE_CAP
from equiv import equivalent_partition, reduce
from errors import ProgmonError, VariableCapExceeded
from logs import get_logger
from ltl import parse, render, simplify
from monitor import PlanExport, RunMetrics, Topology, centralized_steps, plan, plan_export, run, run_baseline
from synth import synthesize
from table import CountMode, TableMode, all_weights, build_table

VERSION = "1.0.0"

logger = get_logger("progmon.api")


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"Starting ProgMon API (table cap {TABLE_VARIABLE_CAP})...")
    yield
    logger.info("Shutting down ProgMon API...")


app = FastAPI(
    title="ProgMon API",
    description="Progression tables, influence weights and decentralized LTL monitoring",
    version=VERSION,
    lifespan=lifespan,
    docs_url="/docs" if API_DOCS else None,
    redoc_url="/redoc" if API_DOCS else None,
)


@app.middleware("http")
async def log_requests(request: Request, call_next):
    """Log all requests with timing."""
    start_time = time.time()
    response = await call_next(request)
    duration = time.time() - start_time

    logger.info(json.dumps({
        "httpRequest": {
            "requestMethod": request.method,
            "requestUrl": str(request.url),
            "status": response.status_code,
            "latency": f"{duration:.3f}s",
        }
    }))

    return response


# Request/Response models
class FormulaRequest(BaseModel):
    formula: str = Field(..., min_length=1, max_length=4000)


class TableRequest(FormulaRequest):
    mode: TableMode = TableMode.PROPOSITIONAL


class WeightsRequest(FormulaRequest):
    mode: TableMode = TableMode.PROGRESSION
    count_mode: CountMode = CountMode(DEFAULT_COUNT_MODE)


class SynthRequest(FormulaRequest):
    target: str = Field(..., min_length=1, max_length=4000)
    mode: TableMode = TableMode.PROGRESSION


class PlanRequest(FormulaRequest):
    topology: str = Field(..., min_length=1, max_length=4000)
    count_mode: CountMode = CountMode(DEFAULT_COUNT_MODE)


class MonitorRequest(PlanRequest):
    trace: list[dict[str, bool]]
    baseline: bool = False


class TableRowItem(BaseModel):
    config: list[str]
    result: str


class TableResponse(BaseModel):
    formula: str
    vars: list[str]
    mode: TableMode
    rows: list[TableRowItem]


class WeightItem(BaseModel):
    weight: str
    value: float
    approximate: bool = False


class WeightsResponse(BaseModel):
    count_mode: CountMode
    weights: dict[str, WeightItem]


class EquivResponse(BaseModel):
    classes: list[list[str]]
    singletons: list[str]


class ReduceResponse(BaseModel):
    reduced: str
    representatives: list[list[str]]
    dropped: list[list[str]]


class SynthResponse(BaseModel):
    target: str
    expression: str
    terms: list[str]


class MonitorResponse(BaseModel):
    verdict: str
    centralized: str
    centralized_steps: int
    metrics: RunMetrics


class HealthResponse(BaseModel):
    status: str
    version: str
    table_cap: int
    error: Optional[str] = None


# Error handlers
@app.exception_handler(VariableCapExceeded)
async def cap_exceeded_handler(request: Request, exc: VariableCapExceeded):
    return JSONResponse(status_code=413, content={"detail": str(exc), "variables": exc.n, "cap": exc.cap})


@app.exception_handler(ProgmonError)
async def progmon_error_handler(request: Request, exc: ProgmonError):
    logger.info(f"Rejected request: {exc}")
    content = {"detail": str(exc)}
    if hasattr(exc, "line"):
        content.update(line=exc.line, column=exc.column)
    return JSONResponse(status_code=400, content=content)


@app.exception_handler(ValueError)
async def value_error_handler(request: Request, exc: ValueError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Handle all unhandled exceptions."""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={"detail": "An internal error occurred. Please try again."}
    )


@app.post("/table", response_model=TableResponse)
def table_endpoint(request: TableRequest):
    """Enumerate every three-valued assignment of the formula's variables."""
    t = build_table(parse(request.formula), request.mode)
    return TableResponse(
        formula=render(t.formula),
        vars=list(t.vars),
        mode=t.mode,
        rows=[TableRowItem(config=[v.value for v in row.config], result=render(row.result)) for row in t.rows],
    )


@app.post("/weights", response_model=WeightsResponse)
def weights_endpoint(request: WeightsRequest):
    weights = all_weights(build_table(parse(request.formula), request.mode), request.count_mode)
    return WeightsResponse(
        count_mode=request.count_mode,
        weights={
            name: WeightItem(
                weight=f"{w.value.numerator}/{w.value.denominator}",
                value=float(w.value),
                approximate=w.approximate,
            )
            for name, w in weights.items()
        },
    )


@app.post("/equiv", response_model=EquivResponse)
def equiv_endpoint(request: FormulaRequest):
    p = equivalent_partition(parse(request.formula))
    return EquivResponse(classes=[list(c) for c in p.classes], singletons=list(p.singletons))


@app.post("/reduce", response_model=ReduceResponse)
def reduce_endpoint(request: FormulaRequest):
    rm = reduce(parse(request.formula))
    return ReduceResponse(
        reduced=render(rm.reduced),
        representatives=[list(r) for r in rm.representatives],
        dropped=[list(d) for d in rm.dropped],
    )


@app.post("/synth", response_model=SynthResponse)
def synth_endpoint(request: SynthRequest):
    sop = synthesize(build_table(parse(request.formula), request.mode), simplify(parse(request.target)))
    return SynthResponse(target=render(sop.target), expression=str(sop), terms=[str(t) for t in sop.ordered_terms()])


@app.post("/plan", response_model=PlanExport)
def plan_endpoint(request: PlanRequest):
    return plan_export(plan(parse(request.formula), Topology.parse(request.topology), request.count_mode))


@app.post("/monitor", response_model=MonitorResponse)
def monitor_endpoint(request: MonitorRequest):
    """Monitor a trace with the planned ring monitor, or with the baseline."""
    f = parse(request.formula)
    topo = Topology.parse(request.topology)
    if request.baseline:
        verdict, metrics = run_baseline(f, topo, request.trace)
    else:
        verdict, metrics = run(plan(f, topo, request.count_mode), request.trace)
    oracle, steps = centralized_steps(f, request.trace)
    logger.info(f"Monitored {render(simplify(f))} over {len(request.trace)} steps: {verdict.value}")
    return MonitorResponse(verdict=verdict.value, centralized=oracle.value, centralized_steps=steps, metrics=metrics)


@app.get("/health", response_model=HealthResponse)
async def health():
    """Health check endpoint."""
    try:
        parse("true")
        return HealthResponse(status="healthy", version=VERSION, table_cap=TABLE_VARIABLE_CAP)
    except Exception as e:
        logger.error(f"Health check failed: {e}")
        return HealthResponse(status="unhealthy", version=VERSION, table_cap=TABLE_VARIABLE_CAP, error=str(e))


@app.get("/ready")
async def readiness():
    """Readiness check."""
    return {"status": "ready"}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=PORT)
