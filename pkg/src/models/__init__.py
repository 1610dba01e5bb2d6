"""Domain value types."""
from src.models.params import ModelParams, Sector, SectorKind, TimeGrid
from src.models.ring_config import Configuration

__all__ = ["Configuration", "ModelParams", "Sector", "SectorKind", "TimeGrid"]
