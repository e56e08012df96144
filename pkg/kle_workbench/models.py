# ABOUTME: Pydantic models for experiment configuration and attack reports.
# ABOUTME: Validates flag/config-file combinations and fixes the JSON report schema.
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .attacks import ATTACKS, get_attack
from .constructions import AccessModel, OuterLayers, Scheme
from .distinguishers import DistinguisherKind
from .engine.cost_model import Prediction
from .engine.grover import Backend
from .engine.ledger import format_exponent
from .middle_layers import MiddleKind


def _decimal(value: Fraction | None) -> float | None:
    return None if value is None else round(float(value), 6)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    attack: str
    kappa: int = Field(8, ge=3, le=24)
    n: int = Field(8, ge=3, le=24)
    scheme: Scheme | None = None
    middle_kind: MiddleKind | None = None
    share_ciphers: bool = False
    outer: OuterLayers = OuterLayers.BOTH
    distinguisher: DistinguisherKind | None = None
    r: int | None = Field(None, ge=1)
    t: int | None = Field(None, ge=2)
    backend: Backend = Backend.IDEALIZED
    model: AccessModel | None = None
    trials: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    out: Path | None = None
    timings: bool = False
    # Sweep grid; each list replaces the scalar field of the same name.
    kappa_values: list[int] | None = None
    n_values: list[int] | None = None
    r_values: list[int] | None = None

    @field_validator("attack")
    @classmethod
    def _known_attack(cls, value: str) -> str:
        if value not in ATTACKS:
            raise ValueError(f"unknown attack id {value!r}; valid ids: {', '.join(ATTACKS)}")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        spec = get_attack(self.attack)
        scheme = self.resolved_scheme
        middle = self.resolved_middle
        if scheme not in spec.schemes:
            raise ValueError(
                f"scheme={scheme.value} conflicts with attack={self.attack} "
                f"(expected one of {sorted(s.value for s in spec.schemes)})"
            )
        if spec.middle_kinds and middle not in spec.middle_kinds:
            raise ValueError(
                f"middle_kind={middle} conflicts with attack={self.attack} "
                f"(expected one of {sorted(k.value for k in spec.middle_kinds)})"
            )
        if not spec.middle_kinds and self.middle_kind is not None:
            raise ValueError(f"middle_kind conflicts with attack={self.attack}, whose scheme fixes its middle layer")
        if self.model is AccessModel.Q1 and spec.model is AccessModel.Q2:
            raise ValueError(f"model=Q1 conflicts with attack={self.attack}, which needs Q2 superposition queries")
        if (self.r is not None or self.r_values) and not spec.partitioned:
            raise ValueError(f"r conflicts with attack={self.attack}, which has no table partition")
        if self.distinguisher is not None and not spec.sieve:
            raise ValueError(
                f"distinguisher={self.distinguisher.value} conflicts with attack={self.attack}, which does not sieve"
            )
        if self.outer is not OuterLayers.BOTH and scheme is not Scheme.GENERIC_ELE:
            raise ValueError(f"outer={self.outer.value} conflicts with scheme={scheme.value}; only ele accepts it")
        if self.share_ciphers and scheme in (Scheme.TWO_KEY_TRIPLE, Scheme.TWO_KEY_TRIPLE_EDE, Scheme.KARC):
            raise ValueError(f"share_ciphers conflicts with scheme={scheme.value}, which has a single cipher")
        return self

    @property
    def resolved_scheme(self) -> Scheme:
        return self.scheme or get_attack(self.attack).scheme

    @property
    def resolved_middle(self) -> MiddleKind | None:
        if self.middle_kind is not None:
            return self.middle_kind
        return get_attack(self.attack).default_middle

    @property
    def resolved_model(self) -> AccessModel:
        return self.model or get_attack(self.attack).model

    @classmethod
    def from_sources(cls, path: Path | str | None = None, **overrides: Any) -> "ExperimentConfig":
        """Load a JSON config file, then apply every override that is not None."""
        data: dict[str, Any] = {}
        if path is not None:
            data = json.loads(Path(path).read_text())
        data.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(data)

    def grid(self) -> list["ExperimentConfig"]:
        """One config per (kappa, n, r) point of the sweep grid, in nested list order."""
        points = []
        for kappa in self.kappa_values or [self.kappa]:
            for n in self.n_values or [self.n]:
                for r in self.r_values or [self.r]:
                    points.append(
                        self.model_copy(
                            update={"kappa": kappa, "n": n, "r": r, "kappa_values": None, "n_values": None, "r_values": None}
                        )
                    )
        return [ExperimentConfig.model_validate(p.model_dump()) for p in points]


class PredictedExponents(BaseModel):
    model_config = ConfigDict(extra="forbid")

    time_exponent: str
    time_exponent_decimal: float
    qram_exponent: str | None = None
    qram_exponent_decimal: float | None = None
    regime: str | None = None
    time_factor: int | None = None
    bruteforce_time_exponent: str
    classical_mitm_exponent: str | None = None
    worse_than_bruteforce: bool

    @classmethod
    def from_prediction(cls, prediction: Prediction) -> "PredictedExponents":
        return cls(
            time_exponent=format_exponent(prediction.time_exponent),
            time_exponent_decimal=_decimal(prediction.time_exponent),
            qram_exponent=format_exponent(prediction.qram_exponent),
            qram_exponent_decimal=_decimal(prediction.qram_exponent),
            regime=prediction.regime,
            time_factor=prediction.time_factor,
            bruteforce_time_exponent=format_exponent(prediction.bruteforce_exponent),
            classical_mitm_exponent=format_exponent(prediction.classical_mitm_exponent),
            worse_than_bruteforce=prediction.worse_than_bruteforce,
        )


class AttackReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    attack_id: str
    scheme: str
    middle: str | None = None
    distinguisher: str | None = None
    kappa: int
    n: int
    t: int
    r: int | None = None
    model: str
    backend: str
    seed: int
    success: bool
    recovered_keys: dict[str, str] | None = None
    ledger: dict[str, Any]
    predicted: PredictedExponents
    failure_reason: str | None = None
    wall_clock_seconds: float | None = None
