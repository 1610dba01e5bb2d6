"""Model parameters, symmetry sectors and time grids."""
import enum
import math
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.models.ring_config import MAX_SITES, MIN_SITES

BLOCKADE_RANGES = (2, 3, 4)


class ModelParams(BaseModel):
    """Ring size, blockade range and interaction strength (energies in units of ε = ħΩ)."""

    model_config = ConfigDict(frozen=True)

    n_sites: int = Field(..., ge=MIN_SITES, le=MAX_SITES, description="Number of ring sites N")
    m: int = Field(default=2, description="Blockade range")
    delta: float = Field(
        default=math.inf, description="Interaction strength Δ, inf for perfect blockade"
    )

    @field_validator("m")
    @classmethod
    def validate_blockade_range(cls, v: int) -> int:
        """Validate that the blockade range is one of the supported values."""
        if v not in BLOCKADE_RANGES:
            raise ValueError(f"m must be one of {BLOCKADE_RANGES}")
        return v

    @field_validator("delta", mode="before")
    @classmethod
    def parse_infinite(cls, v):
        """Accept the string 'infinite' for the perfect-blockade regime."""
        if isinstance(v, str) and v.strip().lower() in {"inf", "infinite", "infinity"}:
            return math.inf
        return v

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        """Validate that a finite Δ is positive."""
        if math.isnan(v) or v <= 0:
            raise ValueError("delta must be positive or infinite")
        return v

    @property
    def is_perfect_blockade(self) -> bool:
        return math.isinf(self.delta)

    def interaction_strengths(self) -> Dict[int, float]:
        """Δ_l = Δ / l⁶ for l = 1 .. m-1 (van der Waals scaling)."""
        return {l: self.delta / l**6 for l in range(1, self.m)}


class SectorKind(str, enum.Enum):
    """Symmetry sector restriction."""

    BLOCKADED = "blockaded"
    NU_EQUALS = "nu"
    ALL = "all"


class Sector(BaseModel):
    """A restriction of the configuration space: Blockaded(m), NuEquals(ν) or All."""

    model_config = ConfigDict(frozen=True)

    kind: SectorKind
    value: Optional[int] = None

    @model_validator(mode="after")
    def check_value(self):
        """Validate that the sector value matches its kind."""
        if self.kind == SectorKind.ALL and self.value is not None:
            raise ValueError("sector 'all' takes no value")
        if self.kind == SectorKind.BLOCKADED and self.value not in BLOCKADE_RANGES:
            raise ValueError(f"blockaded sector needs m in {BLOCKADE_RANGES}")
        if self.kind == SectorKind.NU_EQUALS and (self.value is None or self.value < 0):
            raise ValueError("nu sector needs a non-negative value")
        return self

    @classmethod
    def blockaded(cls, m: int) -> "Sector":
        return cls(kind=SectorKind.BLOCKADED, value=m)

    @classmethod
    def nu_equals(cls, nu: int) -> "Sector":
        return cls(kind=SectorKind.NU_EQUALS, value=nu)

    @classmethod
    def all(cls) -> "Sector":
        return cls(kind=SectorKind.ALL)

    @property
    def excludes_adjacent_pairs(self) -> bool:
        """Whether every member has an empty rr entry on neighbouring sites."""
        return self.kind == SectorKind.BLOCKADED or (
            self.kind == SectorKind.NU_EQUALS and self.value == 0
        )

    def __str__(self) -> str:
        if self.kind == SectorKind.ALL:
            return "all"
        return f"{self.kind.value}({self.value})"


class TimeGrid(BaseModel):
    """Uniform sampling grid in units of τ₀."""

    model_config = ConfigDict(frozen=True)

    t_start: float = Field(default=0.0, ge=0.0)
    t_end: float = Field(default=200.0, gt=0.0)
    dt: float = Field(default=0.02, gt=0.0)

    @model_validator(mode="after")
    def check_order(self):
        """Validate that the grid spans a positive interval."""
        if self.t_start >= self.t_end:
            raise ValueError("t_start must be smaller than t_end")
        return self

    @property
    def n_samples(self) -> int:
        return int(math.floor((self.t_end - self.t_start) / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_samples)
