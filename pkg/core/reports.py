"""
Report payloads emitted by the command line.

Every JSON document the CLI prints is one of these models, serialized through
`dump_json` so reruns are byte-identical.
"""
from typing import Dict, List, Literal, Optional

import orjson
from pydantic import BaseModel, Field


class WitnessEntry(BaseModel):
    L: List[int] = Field(description="Coordinates of the Walsh index, counted from 1")
    num: str
    den: str


class UniqReport(BaseModel):
    k: int
    q: int
    space: Literal["linear", "cone"]
    points: List[str]
    levels: Optional[List[int]] = None
    base: Optional[str] = None
    verdict: Literal["Unique", "NotUnique"]
    method: str
    witness: Optional[List[WitnessEntry]] = None
    witness_valid: bool
    elapsed_seconds: float


class SuiteCase(BaseModel):
    name: str
    k: int
    status: Literal["pass", "fail", "skipped", "recorded"]
    detail: str = ""


class VerifyReport(BaseModel):
    suite: str
    k_min: int
    k_max: int
    cases: List[SuiteCase]
    failures: int
    skipped: int


class LevelVerdictReport(BaseModel):
    k: int
    q: int
    verdicts: Dict[str, bool] = Field(default_factory=dict, description="Level set label -> Unique")
    properties: Dict[str, bool] = Field(default_factory=dict)
    disagreements: List[str] = Field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.disagreements and all(self.properties.values())


class ExtremalReport(BaseModel):
    k: int
    q: int
    quantity: Literal["u", "g"]
    status: Literal["exact", "unknown"]
    value: Optional[int] = None
    method: str
    certificate: List[str] = Field(default_factory=list)
    lower: Optional[int] = None
    upper: Optional[int] = None
    cross_check: Dict[str, Optional[int]] = Field(default_factory=dict)
    elapsed_seconds: float = 0.0


class PolygonRow(BaseModel):
    j: int
    x_num: int
    x_den: int
    y_num: int
    y_den: int
    x: float
    y: float


class PolygonReport(BaseModel):
    k: int
    points: List[PolygonRow]


class FitReport(BaseModel):
    model: Literal["full", "homogeneous"]
    status: Literal["Fitted", "NonExistent", "Budget"]
    k: int
    n: int
    theta0: Optional[float] = None
    field: Optional[List[float]] = Field(default=None, description="theta_i for i = 1..k")
    couplings: Optional[Dict[str, float]] = Field(default=None, description="'i,j' (1-based, i<j) -> theta_ij")
    B: Optional[float] = None
    beta: Optional[float] = None
    residual: Optional[float] = None
    iterations: int = 0
    witness: Optional[List[WitnessEntry]] = None


class SampleReport(BaseModel):
    k: int
    n: int
    seed: int
    counts: Dict[str, int]


class CurveRow(BaseModel):
    n: int
    estimate: float
    ci_low: float
    ci_high: float
    half_width: float


class CurveReport(BaseModel):
    k: int
    q: int
    reps: int
    seed: int
    rows: List[CurveRow]


REPORT_MODELS = {
    "uniq": UniqReport,
    "verify": VerifyReport,
    "level-verdicts": LevelVerdictReport,
    "extremal": ExtremalReport,
    "polygon": PolygonReport,
    "ising-fit": FitReport,
    "ising-simulate": SampleReport,
    "ising-curve": CurveReport,
}


def dump_json(model: BaseModel) -> str:
    """Sorted-key, 2-space indented JSON for a report model."""
    return orjson.dumps(model.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode()


def report_schemas() -> Dict[str, dict]:
    return {name: model.model_json_schema() for name, model in REPORT_MODELS.items()}
