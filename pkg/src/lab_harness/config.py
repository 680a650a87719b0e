"""
Lab configuration: tolerances, budgets and seeds shared by the CLI,
the sweep harness and the HTTP layer.
"""
import os
from pathlib import Path
from typing import Any, Optional, Union
import logging

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from wave_packets.decomposition import PacketSettings

SEED_ENV = "WPL_SEED"

logger = logging.getLogger(__name__)


class LabConfig(BaseModel):
    """Every tolerance and budget the lab uses, with their default values"""
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(default=None, ge=0)
    threads: int = Field(default=1, ge=1)
    max_field_points: int = Field(default=2 ** 26, gt=0)

    equivalence_bound: float = Field(default=16.0, gt=1.0)
    coefficient_bound: float = Field(default=8.0, gt=0.0)
    drop_threshold: float = Field(default=1e-8, ge=0.0, lt=1.0)
    reconstruction_tolerance: float = Field(default=1e-6, gt=0.0)
    localization_bound: float = Field(default=1e3, gt=0.0)
    rescale_bound: float = Field(default=16.0, gt=0.0)
    x_oversampling: int = Field(default=4, ge=2)
    gamma_plateau: float = Field(default=0.9, gt=0.0, lt=1.0)
    gamma_mollifier: float = Field(default=0.1, gt=0.0, lt=1.0)

    partition_tolerance: float = Field(default=0.1, gt=0.0)
    partition_restarts: int = Field(default=4, ge=1)
    partition_maxiter: int = Field(default=200, ge=1)

    decoupling_grid_budget: int = Field(default=2 ** 22, gt=0)

    shell_points: int = Field(default=256, ge=16)
    shell_inner_radius: float = Field(default=16.0, gt=0.0)
    quadrature_slack: float = Field(default=0.01, ge=0.0)
    slope_tolerance: float = Field(default=0.1, gt=0.0)

    def packet_settings(self, validate: bool = True) -> PacketSettings:
        return PacketSettings(
            x_oversampling=self.x_oversampling,
            drop_threshold=self.drop_threshold,
            reconstruction_tolerance=self.reconstruction_tolerance,
            equivalence_bound=self.equivalence_bound,
            coefficient_bound=self.coefficient_bound,
            localization_bound=self.localization_bound,
            rescale_bound=self.rescale_bound,
            gamma_plateau=self.gamma_plateau,
            gamma_mollifier=self.gamma_mollifier,
            threads=self.threads,
            validate=validate,
            max_field_points=self.max_field_points,
        )

    def summary(self) -> dict:
        return self.model_dump()


def _read_document(path: Path) -> dict:
    try:
        document = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ValueError(f"cannot parse config {path}: {e}")
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ValueError(f"config {path} must hold a mapping, got {type(document).__name__}")
    return document


def load_config(path: Optional[Union[str, Path]] = None, **overrides: Any) -> LabConfig:
    """
    Load a JSON or YAML config, apply overrides and the WPL_SEED fallback.

    Args:
        path: Config file (JSON is read through the YAML loader)
        **overrides: Field values taking precedence; None values are ignored

    Returns:
        Validated LabConfig
    """
    document: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ValueError(f"config file {path} does not exist")
        document = _read_document(path)
    document.update({k: v for k, v in overrides.items() if v is not None})

    if document.get("seed") is None:
        load_dotenv()
        env_seed = os.environ.get(SEED_ENV)
        if env_seed:
            try:
                document["seed"] = int(env_seed)
            except ValueError:
                raise ValueError(f"{SEED_ENV}={env_seed!r} is not an integer seed")
            logger.debug(f"Seed {document['seed']} taken from {SEED_ENV}")

    try:
        return LabConfig(**document)
    except ValidationError as e:
        raise ValueError(f"invalid configuration: {e}")
