"""Pydantic schema for one simulation run."""
import enum
import math
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from src.core.config import settings
from src.core.errors import ConfigurationException
from src.models.params import BLOCKADE_RANGES, ModelParams, Sector, SectorKind, TimeGrid
from src.models.ring_config import MAX_SITES, MIN_SITES
from src.services.propagator import PROPAGATION_METHODS
from src.services.time_series import DEFAULT_WINDOW

PEAK_CRITERIA_MAX_DT = 0.05


class RunMode(str, enum.Enum):
    """Subcommands."""

    BASIS = "basis"
    EVOLVE = "evolve"
    COMPARE = "compare"
    SPECTRUM = "spectrum"
    VERIFY = "verify"
    GRAPH = "graph"


class RunConfig(BaseModel):
    """Schema for a run, loaded from a TOML file and overridden by flags."""

    model_config = {"frozen": True, "extra": "forbid"}

    mode: RunMode = Field(..., description="Subcommand to execute")
    n_sites: int = Field(..., ge=MIN_SITES, le=MAX_SITES, description="Ring size N")
    m: int = Field(default=2, description="Blockade range")
    delta: float = Field(default=math.inf, description="Interaction strength, 'infinite' allowed")
    t_start: float = Field(default=0.0, ge=0.0, description="First sample time (τ₀)")
    t_end: float = Field(default=200.0, gt=0.0, description="Last sample time (τ₀)")
    dt: float = Field(default=0.02, gt=0.0, description="Sampling step (τ₀)")
    g2_distances: List[int] = Field(default_factory=lambda: [1, 2, 3])
    window: Optional[Tuple[float, float]] = Field(None, description="Averaging window (τ₀)")
    output_dir: Optional[Path] = Field(None, description="Run directory")
    sector: SectorKind = Field(default=SectorKind.BLOCKADED)
    nu: Optional[int] = Field(None, ge=0, description="ν for the 'nu' sector")
    bin_width: float = Field(default=1.0, gt=0.0, description="DOS bin width (ε)")
    observables: List[str] = Field(default_factory=lambda: ["beta"])
    peak_criteria: bool = Field(default=False, description="Require a grid fine enough for peaks")
    propagation: str = Field(default="auto")
    bracelet_method: str = Field(default="enumerate")

    @field_validator("m")
    @classmethod
    def validate_blockade_range(cls, v: int) -> int:
        """Validate that the blockade range is supported."""
        if v not in BLOCKADE_RANGES:
            raise ValueError(f"m must be one of {BLOCKADE_RANGES}")
        return v

    @field_validator("delta", mode="before")
    @classmethod
    def parse_infinite(cls, v: Any) -> Any:
        """Accept 'infinite' for the perfect-blockade regime."""
        if isinstance(v, str) and v.strip().lower() in {"inf", "infinite", "infinity"}:
            return math.inf
        return v

    @field_validator("propagation")
    @classmethod
    def validate_propagation(cls, v: str) -> str:
        """Validate the propagation method name."""
        if v not in PROPAGATION_METHODS:
            raise ValueError(f"propagation must be one of {PROPAGATION_METHODS}")
        return v

    @field_validator("bracelet_method")
    @classmethod
    def validate_bracelet_method(cls, v: str) -> str:
        """Validate the bracelet generation method."""
        if v not in ("enumerate", "necklace"):
            raise ValueError("bracelet_method must be 'enumerate' or 'necklace'")
        return v

    @model_validator(mode="after")
    def check_consistency(self):
        """Validate cross-field constraints."""
        ModelParams(n_sites=self.n_sites, m=self.m, delta=self.delta)
        if self.t_start >= self.t_end:
            raise ValueError("t_start must be smaller than t_end")
        for k in self.g2_distances:
            if not 1 <= k <= self.n_sites - 1:
                raise ValueError(f"g2 distance {k} outside [1, {self.n_sites - 1}]")
        if self.window is not None:
            t0, t1 = self.window
            if t0 >= t1 or t0 < self.t_start or t1 > self.t_end:
                raise ValueError("window must lie inside [t_start, t_end]")
        if self.peak_criteria and self.dt > PEAK_CRITERIA_MAX_DT:
            raise ValueError(f"peak criteria need dt <= {PEAK_CRITERIA_MAX_DT}")
        if self.sector == SectorKind.NU_EQUALS and self.nu is None:
            raise ValueError("sector 'nu' needs a value for nu")
        return self

    @property
    def params(self) -> ModelParams:
        return ModelParams(n_sites=self.n_sites, m=self.m, delta=self.delta)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(t_start=self.t_start, t_end=self.t_end, dt=self.dt)

    @property
    def averaging_window(self) -> Tuple[float, float]:
        """Explicit window, else [5, t_end] τ₀, else the whole grid."""
        if self.window is not None:
            return self.window
        if self.t_end > DEFAULT_WINDOW[0] and self.t_start <= DEFAULT_WINDOW[0]:
            return DEFAULT_WINDOW[0], min(self.t_end, DEFAULT_WINDOW[1])
        return self.t_start, self.t_end

    @property
    def selected_sector(self) -> Sector:
        if self.sector == SectorKind.ALL:
            return Sector.all()
        if self.sector == SectorKind.NU_EQUALS:
            return Sector.nu_equals(self.nu)
        return Sector.blockaded(self.m)

    @property
    def run_directory(self) -> Path:
        if self.output_dir is not None:
            return self.output_dir
        delta = "inf" if math.isinf(self.delta) else f"{self.delta:g}"
        return Path(settings.output_dir) / f"{self.mode.value}_N{self.n_sites}_m{self.m}_d{delta}"

    def echo(self) -> Dict[str, Any]:
        """JSON-safe copy of the configuration."""
        data = self.model_dump(mode="json")
        if math.isinf(self.delta):
            data["delta"] = "infinite"
        data["output_dir"] = str(self.run_directory)
        return data

    @classmethod
    def from_sources(
        cls, config_file: Optional[Path], overrides: Dict[str, Any]
    ) -> "RunConfig":
        """Merge a TOML file with command-line overrides (flags win).

        Raises:
            ConfigurationException: If the file cannot be read or parsed
            pydantic.ValidationError: If the merged values are invalid
        """
        values: Dict[str, Any] = {}
        if config_file is not None:
            try:
                with open(config_file, "rb") as handle:
                    values.update(tomllib.load(handle))
            except (OSError, tomllib.TOMLDecodeError) as exc:
                raise ConfigurationException(f"cannot load {config_file}: {exc}") from exc
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)
