"""Solver settings and campaign definitions."""

import json
from importlib import resources
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .tensor_core import Shape

CampaignKind = Literal[
    "main",
    "converse",
    "count_binary",
    "als",
    "degenerate_locus",
    "self_membership",
    "flag_formulas",
    "form_identities",
]


class SolverConfig(BaseModel):
    """Multistart Newton and ALS settings."""

    model_config = ConfigDict(frozen=True)

    restarts: int = Field(default=200, ge=1)
    max_iters: int = Field(default=60, ge=1)
    newton_tol: float = Field(default=1e-12, gt=0, lt=1)
    dedupe_tol: float = Field(default=1e-6, gt=0, lt=1)
    certify_tol: float = Field(default=1e-9, gt=0, lt=1)
    rank_tol: float = Field(default=1e-8, gt=0, lt=1)
    master_seed: int = Field(default=0, ge=0)

    def restart_rng(self, restart_index: int) -> np.random.Generator:
        """Independent stream for one restart; scheduling order does not matter."""
        return np.random.default_rng([self.master_seed, restart_index])


class ExteriorShape(BaseModel):
    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=2)
    k: int = Field(ge=1)

    @model_validator(mode="after")
    def _proper(self) -> "ExteriorShape":
        if self.k >= self.dim:
            raise ValueError(f"exterior power must satisfy 1 <= k < dim, got k={self.k}, dim={self.dim}")
        return self

    def label(self) -> str:
        return f"L{self.k}(C{self.dim})"


class FlagRange(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_n: int = Field(default=4, ge=1)
    max_a: int = Field(default=4, ge=1)


class Campaign(BaseModel):
    """One verification campaign: a shape grid, a sample count and thresholds."""

    name: str = Field(pattern=r"^[a-z0-9][a-z0-9_-]*$")
    kind: CampaignKind
    shapes: List[Shape] = Field(default_factory=list)
    exterior: List[ExteriorShape] = Field(default_factory=list)
    flags: Optional[FlagRange] = None
    ranks: List[int] = Field(default_factory=list)
    samples: int = Field(default=100, ge=1)
    field: Literal["real", "complex"] = "real"
    cfg: SolverConfig = Field(default_factory=SolverConfig)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    workers: int = Field(default=4, ge=1)

    @field_validator("ranks")
    @classmethod
    def _positive_ranks(cls, value: List[int]) -> List[int]:
        if any(r < 1 for r in value):
            raise ValueError("ranks must be positive")
        return value

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))

    def with_seed(self, seed: int) -> "Campaign":
        return self.model_copy(update={"cfg": self.cfg.model_copy(update={"master_seed": seed})})


def _parse(raw: Union[str, bytes]) -> List[Campaign]:
    try:
        items = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValueError(f"campaign file is not valid JSON: {e}") from e
    if not isinstance(items, list):
        raise ValueError("campaign file must hold a list of campaigns")
    try:
        campaigns = [Campaign.model_validate(item) for item in items]
    except ValidationError as e:
        raise ValueError(f"invalid campaign definition: {e}") from e
    names = [c.name for c in campaigns]
    if len(set(names)) != len(names):
        raise ValueError("campaign names must be unique")
    return campaigns


def load_campaigns(path: Optional[Union[str, Path]] = None) -> List[Campaign]:
    """Campaigns from ``path``, or the packaged desk-scale grid."""
    if path is None:
        return _parse(resources.files("critspace").joinpath("campaigns.json").read_text())
    path = Path(path)
    try:
        return _parse(path.read_text())
    except OSError as e:
        raise ValueError(f"cannot read campaign file {path}: {e}") from e


def find_campaign(name: str, path: Optional[Union[str, Path]] = None) -> Campaign:
    for campaign in load_campaigns(path):
        if campaign.name == name:
            return campaign
    raise ValueError(f"unknown campaign: {name}")
