"""Request/response models for the simulation service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..simulator import EpisodeConfig, TauTraceConfig


class HealthResponse(BaseModel):
    status: str
    version: str


class SimulateRequest(BaseModel):
    config: EpisodeConfig


class SimulateResponse(BaseModel):
    csv: str
    events: list[dict]
    metrics: dict
    collision: bool


class TauTraceRequest(BaseModel):
    config: TauTraceConfig = TauTraceConfig()


class TauTraceResponse(BaseModel):
    csv: str
    summary: dict


class StabilityRequest(BaseModel):
    """Parameter grids; either law may be omitted."""

    single_wall: dict[str, list[float]] | None = None
    tau_balance: dict[str, list[float]] | None = None


class StabilityResponse(BaseModel):
    csv: str
    rows: list[dict]


class SweepRequest(BaseModel):
    config: EpisodeConfig
    grid: dict[str, list[float]]
    seeds: list[int] = Field(default_factory=list)
    seed_base: int | None = None
    n_seeds: int | None = None


class SweepResponse(BaseModel):
    csv: str
    rows: list[dict]
    n_ok: int
