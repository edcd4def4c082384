"""Test configuration and fixtures for critspace tests."""

import json
from pathlib import Path

import numpy as np
import pytest

from critspace.codec import dumps_tensor
from critspace.config import SolverConfig
from critspace.exterior import AlternatingTensor
from critspace.tensor_core import PSTensor, Shape


@pytest.fixture
def binary_cubic() -> PSTensor:
    """x0³ + x1³, whose eigenvectors are [1:0], [0:1] and [1:1]."""
    return PSTensor(Shape.of((2, 3)), [1, 0, 0, 1])


@pytest.fixture
def diagonal_matrix() -> PSTensor:
    """x0·y0 + 2·x1·y1, the matrix diag(1, 2)."""
    return PSTensor(Shape.of((2, 1), (2, 1)), [[1, 0], [0, 2]])


@pytest.fixture
def decomposable_plane() -> AlternatingTensor:
    """e0 ∧ e1 in ∧²C⁴."""
    return AlternatingTensor.basis_element(4, [0, 1])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def fast_cfg() -> SolverConfig:
    """Few restarts, enough for small shapes."""
    return SolverConfig(restarts=40, master_seed=7)


@pytest.fixture
def tensor_file(tmp_path: Path):
    """Write a tensor to a JSON file and return its path."""

    def write(f, name: str = "tensor.json") -> Path:
        path = tmp_path / name
        path.write_text(dumps_tensor(f))
        return path

    return write


@pytest.fixture
def small_campaigns(tmp_path: Path) -> Path:
    """A campaign file small enough for the CLI tests."""
    campaigns = [
        {
            "name": "tiny-main",
            "kind": "main",
            "samples": 2,
            "shapes": [{"factors": [{"dim": 2, "degree": 3}]}, {"factors": [{"dim": 2, "degree": 1}, {"dim": 2, "degree": 1}]}],
            "cfg": {"restarts": 20},
            "workers": 2,
        },
        {"name": "tiny-degenerate", "kind": "degenerate_locus", "samples": 2, "field": "complex"},
    ]
    path = tmp_path / "campaigns.json"
    path.write_text(json.dumps(campaigns))
    return path
