"""FastAPI service exposing episodes, experiments, stability tables, sweeps.

The service is stateless: every request carries its full configuration and
responses embed the produced CSV/JSON payloads, so results are identical
whether the app runs in-process (the CLI default) or behind uvicorn.
"""

from __future__ import annotations

import io

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..simulator import (
    EPISODE_CSV_COLUMNS,
    expand_seeds,
    run_episode,
    run_sweep,
    tau_trace_experiment,
)
from ..stability import stability_rows
from ..world import WorldError
from .schemas import (
    HealthResponse,
    SimulateRequest,
    SimulateResponse,
    StabilityRequest,
    StabilityResponse,
    SweepRequest,
    SweepResponse,
    TauTraceRequest,
    TauTraceResponse,
)

STABILITY_CSV_COLUMNS = ("law", "k_f", "k_m", "k", "f_f", "f_m", "f", "c", "R",
                         "re1", "im1", "re2", "im2", "hurwitz", "real_eigs",
                         "analytic_condition", "oracle_agrees")


def _csv_from_rows(rows: list[dict], columns: tuple[str, ...]) -> str:
    out = io.StringIO()
    out.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for col in columns:
            value = row.get(col)
            if value is None:
                cells.append("")
            elif isinstance(value, bool):
                cells.append(str(value).lower())
            elif isinstance(value, float):
                cells.append(repr(value))
            else:
                cells.append(str(value))
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def create_app() -> FastAPI:
    app = FastAPI(title="taunav", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        try:
            log = run_episode(req.config)
        except (WorldError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return SimulateResponse(csv=log.to_csv(), events=log.events,
                                metrics=log.metrics, collision=log.collided)

    @app.post("/tau-trace", response_model=TauTraceResponse)
    def tau_trace(req: TauTraceRequest):
        try:
            result = tau_trace_experiment(req.config)
        except (WorldError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return TauTraceResponse(csv=result.to_csv(), summary=result.summary)

    @app.post("/stability", response_model=StabilityResponse)
    def stability(req: StabilityRequest):
        if req.single_wall is None and req.tau_balance is None:
            raise HTTPException(status_code=400,
                                detail="grid must define single_wall and/or tau_balance")
        try:
            rows = stability_rows(req.single_wall, req.tau_balance)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return StabilityResponse(csv=_csv_from_rows(rows, STABILITY_CSV_COLUMNS),
                                 rows=rows)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest):
        seeds = expand_seeds({"seeds": req.seeds, "seed_base": req.seed_base,
                              "n_seeds": req.n_seeds})
        try:
            rows = run_sweep(req.config, req.grid, seeds)
        except (WorldError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        grid_cols = tuple(sorted(req.grid))
        metric_cols = ("seed", "status", "duration", "collision", "mode_switches",
                       "mean_abs_u", "rms_offset", "max_abs_offset",
                       "convergence_time", "offset_crossings", "rest_offset",
                       "progress")
        csv = _csv_from_rows(rows, grid_cols + metric_cols)
        return SweepResponse(csv=csv, rows=rows,
                             n_ok=sum(1 for r in rows if r.get("status") == "ok"))

    return app


app = create_app()
