import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config import get_settings
from app.lib.errors import ConfigError
from app.ops.entities.spectrum import Detrend, Window
from app.ops.models.base import ModelSpec
from app.ops.models.michaelis_menten import FastSign
from app.ops.models.registry import build_model
from app.ops.services.detect_service import DetectionConfig
from app.ops.services.flow_service import Tolerance

Command = Literal["surface", "spectrum", "detect", "sweep", "validate"]
ModelId = Literal["linear", "davis-skodje", "michaelis-menten"]


class StrictModel(BaseModel):
    """Unknown keys are errors everywhere in a run configuration."""

    model_config = ConfigDict(extra="forbid", ser_json_inf_nan="constants")


class ModelConfig(StrictModel):
    id: ModelId = Field(..., description="Builtin model id")
    gamma: float | None = Field(None, description="Spectral gap parameter (Davis-Skodje, Michaelis-Menten)")
    fast_sign: FastSign | None = Field(None, description="Michaelis-Menten fast-equation sign")
    matrix: list[list[float]] | None = Field(None, description="Linear model matrix, row-major")
    eigenvalues: list[float] | None = None
    eigenvectors: list[list[float]] | None = Field(None, description="Linear model eigenvectors, one per row")

    @model_validator(mode="after")
    def materialize(self) -> "ModelConfig":
        if self.id == "michaelis-menten" and self.fast_sign is None:
            self.fast_sign = FastSign.CRITICAL_MANIFOLD_CONSISTENT
        return self

    def build(self) -> ModelSpec:
        return build_model(
            self.id,
            gamma=self.gamma,
            fast_sign=self.fast_sign,
            matrix=self.matrix,
            eigenvalues=self.eigenvalues,
            eigenvectors=self.eigenvectors,
        )


class ToleranceSettings(StrictModel):
    rtol: float = Field(default_factory=lambda: get_settings().rtol, gt=0)
    atol: float = Field(default_factory=lambda: get_settings().atol, gt=0)
    h_min: float = Field(default_factory=lambda: get_settings().h_min, gt=0)

    def to_tolerance(self) -> Tolerance:
        return Tolerance(rtol=self.rtol, atol=self.atol, h_min=self.h_min)


class SurfaceSettings(StrictModel):
    re: tuple[float, float] = (0.0, 0.0)
    im: tuple[float, float] = (0.0, 2 * math.pi)
    grid: tuple[int, int] = (1, 64)


class SpectrumSettings(StrictModel):
    component: int = Field(1, ge=1, description="1-based state component")
    window: Window | Literal["auto"] = "auto"
    detrend: Detrend = "none"
    centered: bool | Literal["auto"] = Field("auto", description="Ray over [−T/2, T/2); auto under a tapering window")
    span: float = Field(default_factory=lambda: get_settings().spectral_span, gt=0)
    samples: int = Field(default_factory=lambda: get_settings().spectral_samples, ge=2)


class DetectionSettings(StrictModel):
    span: float = Field(default_factory=lambda: get_settings().spectral_span, gt=0)
    samples: int = Field(default_factory=lambda: get_settings().spectral_samples, ge=2)
    cutoff: float | Literal["auto"] = "auto"
    threshold: float = Field(default_factory=lambda: get_settings().energy_ratio_threshold, gt=0)
    tail: float = Field(default_factory=lambda: get_settings().tail_fraction, gt=0, lt=1)
    window: Window | Literal["auto"] = "auto"
    detrend: Detrend = "mean"
    centered: bool | Literal["auto"] = "auto"
    peak_rel_threshold: float = Field(default_factory=lambda: get_settings().peak_rel_threshold, gt=0, lt=1)

    def to_config(self, tol: Tolerance | None = None) -> DetectionConfig:
        return DetectionConfig(
            tau_max=self.span,
            n_samples=self.samples,
            cutoff=self.cutoff,
            tail_fraction=self.tail,
            energy_ratio_threshold=self.threshold,
            window=self.window,
            detrend=self.detrend,
            centered=self.centered,
            peak_rel_threshold=self.peak_rel_threshold,
            tol=tol,
        )


class SweepSettings(StrictModel):
    offsets: list[float] = Field(default_factory=lambda: [0.0], min_length=1)
    gammas: list[float] | None = Field(None, description="Defaults to the model's own gamma")
    z1: float = Field(3.0, description="Slow coordinate of the SIM base point")
    sim_order: int = Field(2, ge=0, le=2, description="Michaelis-Menten SIM expansion order")


class ValidateSettings(StrictModel):
    suites: list[str] | None = Field(None, description="Suite names to run; all when unset")


class RunConfig(StrictModel):
    """A fully materialized run: echoing it back reproduces the run."""

    command: Command
    model: ModelConfig | None = None
    z0: list[float] | None = None
    tolerance: ToleranceSettings = Field(default_factory=ToleranceSettings)
    surface: SurfaceSettings = Field(default_factory=SurfaceSettings)
    spectrum: SpectrumSettings = Field(default_factory=SpectrumSettings)
    detection: DetectionSettings = Field(default_factory=DetectionSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    validate_: ValidateSettings = Field(default_factory=ValidateSettings, alias="validate")
    out: str | None = None
    format: Literal["csv", "json"] | None = None

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def materialize(self) -> "RunConfig":
        if self.command != "validate" and self.model is None:
            raise ValueError(f"'{self.command}' needs a model")
        if self.command in ("surface", "spectrum", "detect") and self.z0 is None:
            raise ValueError(f"'{self.command}' needs an initial point z0")
        if self.format is None:
            self.format = "csv" if self.command in ("surface", "sweep") else "json"
        return self

    def build_model(self) -> ModelSpec:
        if self.model is None:
            raise ConfigError("No model configured")
        return self.model.build()

    def echo(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)


class SurfaceDocument(StrictModel):
    model: str
    z0: list[float]
    re_values: list[float]
    im_values: list[float]
    valid: list[list[bool]]
    re_z: list[list[list[float | None]]] = Field(..., description="[re index][im index][component], null where masked")
    im_z: list[list[list[float | None]]]
    config: dict


class SpectrumDocument(StrictModel):
    model: str
    z0: list[float]
    component: int = Field(..., description="1-based state component")
    convention: str
    window: Window
    detrend: Detrend
    detrend_offset: tuple[float, float]
    T: float
    delta_xi: float
    frequencies: list[float]
    re_amp: list[float]
    im_amp: list[float]
    one_sided_xi: list[float] = Field(..., description="|ξ| grid of the one-sided spectrum")
    one_sided_power: list[float] = Field(..., description="|amplitude|² summed over ±ξ")
    tau: list[float] = Field(..., description="Imaginary-time sample positions of the transformed signal")
    re_signal: list[float]
    im_signal: list[float]
    config: dict


class PeakDocument(StrictModel):
    component: int = Field(..., description="1-based state component")
    xi: float
    re_amp: float
    im_amp: float


class DetectionDocument(StrictModel):
    model: str
    z0: list[float]
    verdict: str
    high_low_ratio: float
    lambda_supp: float
    cutoff_used: float
    low_energies: list[float]
    high_energies: list[float]
    peaks: list[PeakDocument]
    config: dict
