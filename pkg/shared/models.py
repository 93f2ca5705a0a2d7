"""Data models for the coherent-feedback squeezing toolkit."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Literal, Mapping, Optional, Type, TypeVar, Union

import annotated_types
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from shared.errors import InvalidParameterError


class QuadratureSign(str, Enum):
    """Quadrature selector: amplitude (theta = 0) or phase (theta = pi/2)."""
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is QuadratureSign.PLUS else -1


class SpectrumStage(str, Enum):
    """Which model stage produced a series."""
    OPEN_LOOP = "open_loop"
    CLOSED_LOOP = "closed_loop"
    DETECTED = "detected"


class SweepAxis(str, Enum):
    """Independent variable of a series."""
    FREQUENCY_HZ = "frequency_hz"
    TRANSMISSIVITY_T2 = "transmissivity_t2"
    PUMP_STRENGTH_X = "pump_strength_x"


class PointStatus(str, Enum):
    """Per-point evaluation status."""
    OK = "ok"
    ABOVE_THRESHOLD = "above_threshold"


class Baseline(str, Enum):
    """Reference against which squeezing enhancement is judged."""
    UNCONTROLLED = "uncontrolled"  # T2 = 1 and L2 = 0
    SAME_LOSS = "same-loss"        # T2 = 1 at the configured L2


class Spacing(str, Enum):
    """Frequency grid spacing."""
    LINEAR = "linear"
    LOG = "log"


class Command(str, Enum):
    """CLI commands."""
    SPECTRUM = "spectrum"
    SWEEP_T2 = "sweep-t2"
    SWEEP_FREQ = "sweep-freq"
    SWEEP_PUMP = "sweep-pump"
    OPTIMIZE = "optimize"
    THRESHOLD = "threshold"
    REPRODUCE = "reproduce"


class OutputFormat(str, Enum):
    """Output file format."""
    CSV = "csv"
    JSON = "json"


class OpoParams(BaseModel):
    """Degenerate OPO: input-output mirror, intracavity loss, cavity length and pump."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    T1: float = Field(gt=0.0, le=1.0)
    L1: float = Field(ge=0.0, lt=1.0)
    l: float = Field(gt=0.0)
    # x >= 1 is accepted here and rejected by the physics layer as a threshold error
    x: float = Field(ge=0.0)
    pump_sign: Literal[1, -1] = 1

    @property
    def squeezed_quadrature(self) -> QuadratureSign:
        """A real positive pump squeezes the phase quadrature."""
        return QuadratureSign.MINUS if self.pump_sign > 0 else QuadratureSign.PLUS


class FeedbackParams(BaseModel):
    """Control beam splitter and coherent-feedback loop."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    T2: float = Field(gt=0.0, le=1.0)
    L2: float = Field(ge=0.0, le=1.0)
    la: float = Field(ge=0.0)
    lb: float = Field(ge=0.0)
    # exp(i w0 (tau_a + tau_b)); the loop is always operated on resonance
    carrier_phase: float = -1.0

    @field_validator('carrier_phase')
    @classmethod
    def _resonant_loop(cls, value: float) -> float:
        if value != -1.0:
            raise ValueError("only the resonant loop (carrier_phase = -1) is supported")
        return value


class DetectionParams(BaseModel):
    """Homodyne detector: visibility and photodiode quantum efficiency."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    xi: float = Field(ge=0.0, le=1.0)
    rho: float = Field(ge=0.0, le=1.0)

    @property
    def eta(self) -> float:
        """Overall detection efficiency eta = xi^2 rho."""
        return self.xi ** 2 * self.rho


@dataclass(frozen=True)
class TransferQuad:
    """OPO transfer functions G, g, Gbar, gbar at sideband frequency omega (rad/s)."""
    G: Union[complex, np.ndarray]
    g: Union[complex, np.ndarray]
    Gbar: Union[complex, np.ndarray]
    gbar: Union[complex, np.ndarray]
    omega: Union[float, np.ndarray]

    def quadrature(self, q: QuadratureSign):
        """Return (G +/- g, Gbar +/- gbar) for quadrature q."""
        return self.G + q.sign * self.g, self.Gbar + q.sign * self.gbar


class SpectrumPoint(BaseModel):
    """One sample of a series; S values are None when the point is flagged."""
    axis_value: float
    s_plus: Optional[float] = None
    s_minus: Optional[float] = None
    status: PointStatus = PointStatus.OK

    @property
    def s_plus_db(self) -> Optional[float]:
        return None if self.s_plus is None else 10.0 * math.log10(self.s_plus)

    @property
    def s_minus_db(self) -> Optional[float]:
        return None if self.s_minus is None else 10.0 * math.log10(self.s_minus)


class SpectrumSeries(BaseModel):
    """Ordered (axis, S+, S-) samples with the parameters that generated them."""
    stage: SpectrumStage
    axis: SweepAxis
    points: List[SpectrumPoint] = Field(default_factory=list)
    params_snapshot: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def _check_points(self) -> 'SpectrumSeries':
        axis_values = [p.axis_value for p in self.points]
        if any(b <= a for a, b in zip(axis_values, axis_values[1:])):
            raise ValueError("axis values must be strictly increasing")
        for p in self.points:
            for value in (p.s_plus, p.s_minus):
                if value is not None and value < 0:
                    raise ValueError(f"negative power at axis value {p.axis_value}")
        return self

    @property
    def axis_values(self) -> List[float]:
        return [p.axis_value for p in self.points]

    @property
    def flagged(self) -> List[SpectrumPoint]:
        return [p for p in self.points if p.status is not PointStatus.OK]


class EnhancementReport(BaseModel):
    """Outcome of the optimal-transmissivity search."""
    t2_star: float = Field(gt=0.0, le=1.0)
    # level of the squeezed quadrature, S+ when pump_sign = -1
    s_minus_at_star: float
    baseline_s_minus: float
    improvement_db: float = Field(ge=0.0)
    improved: bool
    baseline: Baseline = Baseline.UNCONTROLLED
    params_snapshot: Dict[str, Any] = Field(default_factory=dict)


class ThresholdReport(BaseModel):
    """Closed-loop oscillation threshold in units of the normalized pump strength."""
    x_threshold: float = Field(gt=0.0, le=1.0)
    open_loop_threshold: float = 1.0
    params_snapshot: Dict[str, Any] = Field(default_factory=dict)


class CommandArgs(BaseModel):
    """Per-command options; unused fields stay at their defaults."""

    model_config = ConfigDict(allow_inf_nan=False)

    frequency_hz: Optional[float] = Field(default=None, ge=0.0)
    grid_points: Optional[int] = Field(default=None, ge=1)
    f_min_hz: Optional[float] = Field(default=None, gt=0.0)
    f_max_hz: Optional[float] = Field(default=None, gt=0.0)
    n_points: Optional[int] = Field(default=None, ge=2)
    spacing: Spacing = Spacing.LINEAR
    baseline: Baseline = Baseline.UNCONTROLLED
    preset: Optional[str] = None


class OutputSpec(BaseModel):
    """Where and how results are written."""
    path: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV


class RunConfig(BaseModel):
    """A fully validated run: parameters, one command, and its output."""
    opo: OpoParams
    feedback: FeedbackParams
    detection: Optional[DetectionParams] = None
    command: Command
    command_args: CommandArgs = Field(default_factory=CommandArgs)
    output: OutputSpec = Field(default_factory=OutputSpec)

    def snapshot(self) -> Dict[str, Any]:
        """Flat record of every field, used in output headers."""
        flat = parameter_snapshot(self.opo, self.feedback, self.detection)
        flat["command"] = self.command.value
        for key, value in self.command_args.model_dump(mode='json').items():
            flat[f"command_args.{key}"] = value
        for key, value in self.output.model_dump(mode='json').items():
            flat[f"output.{key}"] = value
        return flat


def parameter_snapshot(
    opo: OpoParams,
    feedback: Optional[FeedbackParams] = None,
    detection: Optional[DetectionParams] = None,
) -> Dict[str, Any]:
    """Flatten parameter records into dotted keys."""
    flat: Dict[str, Any] = {}
    for key, value in opo.model_dump().items():
        flat[f"opo.{key}"] = value
    if feedback is not None:
        for key, value in feedback.model_dump().items():
            flat[f"feedback.{key}"] = value
    if detection is not None:
        for key, value in detection.model_dump().items():
            flat[f"detection.{key}"] = value
    else:
        flat["detection"] = None
    return flat


ModelT = TypeVar('ModelT', bound=BaseModel)

BOUND_ERROR_TYPES = frozenset({'greater_than', 'greater_than_equal', 'less_than', 'less_than_equal'})


def describe_bounds(model_cls: Type[BaseModel], name: str) -> Optional[str]:
    """Render a field's numeric bounds as an interval, e.g. '(0, 1]'."""
    field_info = model_cls.model_fields.get(name)
    if field_info is None:
        return None
    lower, upper = "(-inf", "inf)"
    found = False
    for meta in field_info.metadata:
        if isinstance(meta, annotated_types.Gt):
            lower, found = f"({meta.gt:g}", True
        elif isinstance(meta, annotated_types.Ge):
            lower, found = f"[{meta.ge:g}", True
        elif isinstance(meta, annotated_types.Lt):
            upper, found = f"{meta.lt:g})", True
        elif isinstance(meta, annotated_types.Le):
            upper, found = f"{meta.le:g}]", True
    return f"{lower}, {upper}" if found else None


def build_model(
    model_cls: Type[ModelT],
    values: Mapping[str, Any],
    error_cls: Type[InvalidParameterError] = InvalidParameterError,
) -> ModelT:
    """Validate values into model_cls, naming the offending field and its bound on failure."""
    try:
        return model_cls.model_validate(dict(values))
    except ValidationError as exc:
        first = exc.errors()[0]
        name = str(first['loc'][0]) if first['loc'] else model_cls.__name__
        bound = describe_bounds(model_cls, name)
        if first['type'] == 'missing':
            message = f"{name} is required"
        elif bound is not None and first['type'] in BOUND_ERROR_TYPES:
            message = f"{name} = {first.get('input')} is outside {bound}"
        else:
            message = f"{name}: {first['msg']}"
        raise error_cls(message, field=name) from exc
