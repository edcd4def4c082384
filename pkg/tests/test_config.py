"""Tests for solver settings and campaign definitions."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from critspace.config import Campaign, ExteriorShape, SolverConfig, find_campaign, load_campaigns


class TestSolverConfig:
    def test_defaults(self):
        """Test the default solver settings."""
        cfg = SolverConfig()
        assert cfg.restarts == 200
        assert cfg.certify_tol == 1e-9
        assert cfg.dedupe_tol == 1e-6

    def test_restart_streams_are_reproducible(self):
        """Test that restart streams depend only on seed and index."""
        cfg = SolverConfig(master_seed=5)
        np.testing.assert_array_equal(cfg.restart_rng(3).standard_normal(4), cfg.restart_rng(3).standard_normal(4))
        assert not np.array_equal(cfg.restart_rng(3).standard_normal(4), cfg.restart_rng(4).standard_normal(4))

    @pytest.mark.parametrize("field, value", [("restarts", 0), ("certify_tol", 0.0), ("dedupe_tol", 2.0), ("master_seed", -1)])
    def test_invalid(self, field, value):
        """Test that out-of-range settings are rejected."""
        with pytest.raises(ValidationError):
            SolverConfig(**{field: value})

    def test_frozen(self):
        """Test that settings are immutable."""
        with pytest.raises(ValidationError):
            SolverConfig().restarts = 3


class TestExteriorShape:
    def test_label(self):
        """Test the exterior shape label."""
        assert ExteriorShape(dim=4, k=2).label() == "L2(C4)"

    def test_top_degree_rejected(self):
        """Test that k = dim is rejected."""
        with pytest.raises(ValidationError):
            ExteriorShape(dim=3, k=3)


class TestCampaigns:
    """Test the packaged campaign grid and campaign files."""

    def test_packaged(self):
        """Test the packaged campaign names and order."""
        names = [c.name for c in load_campaigns()]
        assert names == [
            "main",
            "converse",
            "count-binary",
            "als",
            "degenerate-locus",
            "self-membership",
            "flag-formulas",
            "form-identities",
        ]

    def test_count_binary_restarts(self):
        """Test the count-binary settings."""
        c = find_campaign("count-binary")
        assert c.cfg.restarts == 800
        assert c.field == "complex"
        assert c.tolerance("exact_fraction", 0.5) == 0.95

    def test_from_file(self, small_campaigns):
        """Test loading a campaign from a file."""
        c = find_campaign("tiny-main", small_campaigns)
        assert c.samples == 2
        assert [s.label() for s in c.shapes] == ["S3(C2)", "S1(C2)xS1(C2)"]

    def test_with_seed(self):
        """Test reseeding a campaign."""
        c = find_campaign("main").with_seed(42)
        assert c.cfg.master_seed == 42
        assert c.cfg.restarts == 60

    def test_unknown(self):
        """Test that unknown names are rejected."""
        with pytest.raises(ValueError, match="unknown campaign: nope"):
            find_campaign("nope")

    def test_missing_file(self, tmp_path):
        """Test that a missing campaign file is rejected."""
        with pytest.raises(ValueError, match="cannot read campaign file"):
            load_campaigns(tmp_path / "missing.json")

    def test_not_a_list(self, tmp_path):
        """Test that the file must hold a list."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"name": "x"}))
        with pytest.raises(ValueError, match="list of campaigns"):
            load_campaigns(path)

    def test_duplicate_names(self, tmp_path):
        """Test that campaign names must be unique."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps([{"name": "a", "kind": "main"}, {"name": "a", "kind": "als"}]))
        with pytest.raises(ValueError, match="unique"):
            load_campaigns(path)

    @pytest.mark.parametrize("item", [{"name": "Bad Name", "kind": "main"}, {"name": "x", "kind": "bogus"}, {"name": "x", "kind": "als", "ranks": [0]}])
    def test_invalid_definition(self, tmp_path, item):
        """Test that invalid definitions are rejected."""
        path = tmp_path / "c.json"
        path.write_text(json.dumps([item]))
        with pytest.raises(ValueError, match="invalid campaign definition"):
            load_campaigns(path)

    def test_tolerance_default(self):
        """Test the fallback for missing tolerances."""
        assert Campaign(name="x", kind="main").tolerance("membership", 1e-8) == 1e-8
