"""Wire models for the HTTP service.

Request bodies mirror the JSON documents the file-based tools accept;
semantic validation (representation coupling, polynomial grammar, shape
checks) stays in the domain layer, so these models only pin the envelope.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, PositiveFloat

Entry = Union[str, int, float]


class MdDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    output_map: list[list[str]]
    latent_kernel: list[list[str]]


class ContinuousDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: list[list[float]]
    t_s: float


class SystemDoc(BaseModel):
    """One system, in exactly one representation (enforced downstream)."""

    model_config = ConfigDict(extra="forbid")

    mode: Literal["exact", "tolerant"] = "exact"
    eps_zero: Optional[PositiveFloat] = None
    kernel: Optional[list[list[str]]] = None
    state_space: Optional[list[list[Entry]]] = None
    md: Optional[MdDoc] = None
    continuous: Optional[ContinuousDoc] = None

    def to_payload(self):
        return self.model_dump(exclude_none=True)


class AttackDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    support: list[int] = []
    generators: dict[str, dict] = {}
    start_time: int = 0


class ScenarioDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemDoc
    initial: list
    horizon: int
    attack: Optional[AttackDoc] = None
    seed: int = 0
    correct: bool = True

    def to_payload(self):
        return self.model_dump(exclude_none=True)


class SystemRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemDoc


class SignalsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    system: SystemDoc
    signals_csv: str
    eps_sig: Optional[PositiveFloat] = None


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioDoc
    seed: Optional[int] = None


class SecurityReportDoc(BaseModel):
    index: int
    n_sensors: int
    level: int
    maximally_secure: bool
    detectable_weight_max: int
    correctable_weight_max: int
    witness_subset: list[int]


class ScalarObserverDoc(BaseModel):
    """Sensor-to-reference filter with its regeneration polynomial and
    the cofactor witnessing the defining identity."""

    sensor: int
    filter: str
    channel: str
    cofactor: str


class SubsetObserverDoc(BaseModel):
    subset: list[int]
    rows: list[list[str]]


class ObserverBankDoc(BaseModel):
    kind: str
    latency: int
    regen_latency: int
    scalar_observers: Optional[list[ScalarObserverDoc]] = None
    subset_observers: Optional[list[SubsetObserverDoc]] = None
    latent_kernel: Optional[list[list[str]]] = None


class CanonicalResponse(BaseModel):
    canonical: list[list[str]]
    transform: list[list[str]]
    block_size: int
    security: SecurityReportDoc
    observers: ObserverBankDoc


class DetectionResponse(BaseModel):
    attacked: bool
    residual_support: list[int]
    residual_weight: int
    residual_csv: str


class CorrectionResponse(BaseModel):
    kind: str
    winning_tally: list[int]
    valid_from: int
    corrected_csv: str


class SimulationResponse(BaseModel):
    result: dict[str, Any]
    files: dict[str, str]


class ErrorBody(BaseModel):
    error: str
    detail: str
    tally: Optional[list[int]] = None
