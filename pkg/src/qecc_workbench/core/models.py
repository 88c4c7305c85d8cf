"""Core data models for qecc-workbench."""

from datetime import datetime
from enum import Enum, IntEnum
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, validator


class NoiseKind(str, Enum):
    """Single-qubit error channels."""
    DEPOLARIZING = "depolarizing"
    INDEPENDENT = "independent"


class Spacing(str, Enum):
    """Grid spacing for parameter sweeps."""
    LINEAR = "linear"
    LOG = "log"


class LogLevel(str, Enum):
    """Log levels."""
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


class LogicalClass(IntEnum):
    """Logical coset of a residual operator.

    The integer value is the class index used in tables and also the
    tie-break order when several classes carry the same mass.
    """
    I = 0  # noqa: E741
    X = 1
    Z = 2
    Y = 3

    @classmethod
    def from_label(cls, label: str) -> "LogicalClass":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"Unknown logical class: {label}")


def _check_probability(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be within [0, 1], got {value}")
    return value


class NoiseModel(BaseModel):
    """Physical and measurement error parameters.

    ``p_x``, ``p_y`` and ``p_z`` are the per-qubit probabilities of each
    Pauli; ``p`` is their sum. For the independent channel ``p_prime_x`` and
    ``p_prime_z`` are the underlying flip rates and ``alpha`` their ratio.
    """
    kind: NoiseKind
    p: float
    p_x: float
    p_y: float
    p_z: float
    p_prime_x: Optional[float] = None
    p_prime_z: Optional[float] = None
    alpha: float = 1.0
    q: float = 0.0

    @validator('p', 'p_x', 'p_y', 'p_z')
    def check_rate(cls, v: float) -> float:
        return _check_probability("error rate", v)

    @validator('p_prime_x', 'p_prime_z')
    def check_prime_rate(cls, v: Optional[float]) -> Optional[float]:
        if v is not None:
            _check_probability("flip rate", v)
        return v

    @validator('alpha')
    def check_alpha(cls, v: float) -> float:
        if v < 0:
            raise ValueError(f"alpha must be non-negative, got {v}")
        return v

    @validator('q')
    def check_q(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError(f"q must be within [0, 1), got {v}")
        return v

    @validator('p_z')
    def check_rate_sum(cls, v: float, values: Dict[str, Any]) -> float:
        total = values.get('p_x', 0.0) + values.get('p_y', 0.0) + v
        if total > 1.0 + 1e-12:
            raise ValueError(f"Per-Pauli rates sum to {total}, above 1")
        return v

    @property
    def rate_sum(self) -> float:
        return self.p_x + self.p_y + self.p_z

    @property
    def rates(self) -> Tuple[float, float, float]:
        """(p_x, p_y, p_z)."""
        return (self.p_x, self.p_y, self.p_z)


class BuildConfig(BaseModel):
    """Parameters of a decoder-table build."""
    n_max: Optional[int] = None  # None builds the exact table
    parallel_partitions: int = 1
    max_table_entries: int = 1 << 25

    @validator('n_max')
    def check_n_max(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 0:
            raise ValueError(f"n_max must be non-negative, got {v}")
        return v

    @validator('parallel_partitions')
    def check_partitions(cls, v: int) -> int:
        if v < 1:
            raise ValueError("parallel_partitions must be at least 1")
        return v


class EvaluationResult(BaseModel):
    """Decoding performance at one noise point.

    ``correcting_power`` is None when ``p_l`` is zero (unbounded power).
    """
    code: str
    noise: NoiseModel
    n_max: int
    p_d: float
    p_l: float
    correcting_power: Optional[float] = None
    modified_correcting_power: Optional[float] = None
    gate_overhead: Optional[float] = None
    lower_bound: bool = False

    @validator('p_d')
    def check_p_d(cls, v: float) -> float:
        # accumulated rounding may push an exact 1 marginally over
        return min(max(v, 0.0), 1.0)


class McEstimate(BaseModel):
    """Monte Carlo estimate of a logical error rate."""
    code: str
    trials: int
    failures: int
    seed: int
    lower_bound: bool = False

    @validator('failures')
    def check_failures(cls, v: int, values: Dict[str, Any]) -> int:
        if v < 0 or v > values.get('trials', v):
            raise ValueError("failures must lie between 0 and trials")
        return v

    @property
    def p_l_hat(self) -> float:
        return self.failures / self.trials if self.trials else 0.0

    @property
    def std_err(self) -> float:
        if not self.trials:
            return 0.0
        p_hat = self.p_l_hat
        return (p_hat * (1.0 - p_hat) / self.trials) ** 0.5


class SweepSpec(BaseModel):
    """A sweep over the physical error rate at fixed channel shape."""
    code: str
    noise: NoiseKind = NoiseKind.DEPOLARIZING
    alpha: float = 1.0
    p_min: float = 1e-4
    p_max: float = 0.2
    p_steps: int = 40
    spacing: Spacing = Spacing.LOG
    q: float = 0.0
    n_max: Optional[int] = None
    gate_overhead: Optional[float] = None

    @validator('p_min', 'p_max', 'q')
    def check_unit_interval(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError(f"rates must be within [0, 1), got {v}")
        return v

    @validator('p_max')
    def check_order(cls, v: float, values: Dict[str, Any]) -> float:
        if 'p_min' in values and v < values['p_min']:
            raise ValueError("p_max must not be below p_min")
        return v

    @validator('p_steps')
    def check_steps(cls, v: int) -> int:
        if v < 1:
            raise ValueError("p_steps must be at least 1")
        return v

    @validator('spacing')
    def check_log_floor(cls, v: Spacing, values: Dict[str, Any]) -> Spacing:
        if v == Spacing.LOG and values.get('p_min', 1.0) <= 0.0:
            raise ValueError("log spacing needs p_min > 0")
        return v

    @validator('gate_overhead')
    def check_overhead(cls, v: Optional[float]) -> Optional[float]:
        if v is not None:
            _check_probability('gate_overhead', v)
        return v


class GridPoint(BaseModel):
    """One evaluated (p, q) grid point."""
    p: float
    q: float
    p_d: float
    p_l: float
    correcting_power: Optional[float] = None


class RegionResult(BaseModel):
    """A (p, q) grid of evaluations plus the contours where C reaches a level.

    ``points`` is q-major: index ``iq * len(p_values) + ip``; ``evaluations``
    holds the full result behind each point in the same order.
    """
    code: str
    noise: NoiseKind
    alpha: float = 1.0
    n_max: int
    target: float = 1.0
    p_values: List[float]
    q_values: List[float]
    points: List[GridPoint] = Field(default_factory=list)
    evaluations: List[EvaluationResult] = Field(default_factory=list)
    contours: List[List[Tuple[float, float]]] = Field(default_factory=list)
    lower_bound: bool = False

    def point(self, ip: int, iq: int) -> GridPoint:
        return self.points[iq * len(self.p_values) + ip]


class ComparisonResult(BaseModel):
    """Difference C_a - C_b over a shared (p, q) grid and its zero contour.

    ``difference`` is indexed ``[iq][ip]``.
    """
    code_a: str
    code_b: str
    noise: NoiseKind
    alpha: float = 1.0
    p_values: List[float]
    q_values: List[float]
    difference: List[List[float]] = Field(default_factory=list)
    contours: List[List[Tuple[float, float]]] = Field(default_factory=list)
    degenerate: bool = False

    @property
    def a_wins(self) -> int:
        """Grid points where code A has the larger correcting power."""
        return sum(1 for row in self.difference for d in row if d > 0)


class ValidationReport(BaseModel):
    """Outcome of the structural checks on a code."""
    code: str
    checks: List[str] = Field(default_factory=list)
    failures: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


class RunLog(BaseModel):
    """Log entry emitted by long-running operations."""
    level: LogLevel
    message: str
    details: Optional[Dict[str, Any]] = None
    timestamp: datetime = Field(default_factory=datetime.now)


LogSink = Callable[[RunLog], None]


def emit(log: Optional[LogSink], level: LogLevel, message: str, **details: Any) -> None:
    """Send a RunLog record to ``log`` if a sink was given."""
    if log is not None:
        log(RunLog(level=level, message=message, details=details or None))
