#!/usr/bin/env python3
"""
Test script for run configuration models.

Run from the project root:
    python -m tensorpca.test_config
"""

import json
import os
import sys
import tempfile
from pathlib import Path

from pydantic import ValidationError

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from tensorpca.config import (
    THREADS_ENV,
    EstimatorConfig,
    GridConfig,
    ProblemConfig,
    RunConfig,
    default_threads,
)
from tensorpca.model import table_m
from tensorpca.recovery import Setting


def _rejects(factory, **kwargs) -> bool:
    try:
        factory(**kwargs)
    except ValidationError:
        return True
    return False


def test_defaults():
    """Test default values of every section."""
    print("Testing defaults...")

    cfg = RunConfig()
    assert cfg.seed == 0 and cfg.out == Path("output")
    assert (cfg.problem.n, cfg.problem.k, cfg.problem.ell) == (20, 4, 6)
    assert cfg.problem.m_resolved == table_m(20)
    assert (cfg.estimator.n, cfg.estimator.ell, cfg.estimator.q_qsp) == (100, 16, 594)
    assert cfg.grid.fractions_resolved == [0.02, 0.05, 0.1, 0.2, 0.5]
    assert GridConfig(setting="asymmetric").fractions_resolved == [0.02, 0.05, 0.1, 0.2]
    print("  ✓ Problem, estimator and grid defaults")

    params = cfg.problem.to_params(seed=7)
    assert params.seed == 7 and params.m_target == table_m(20)
    print("  ✓ ProblemConfig -> ProblemParams")

    print("✓ Default tests passed\n")


def test_validation():
    """Test that bad values and unknown keys are rejected."""
    print("Testing validation...")

    assert _rejects(ProblemConfig, k=3)
    assert _rejects(ProblemConfig, ell=21)
    assert _rejects(ProblemConfig, rho=1.5)
    assert _rejects(ProblemConfig, colour="blue")
    assert not _rejects(ProblemConfig, n=7, ell=16, setting=Setting.ASYMMETRIC)
    print("  ✓ Odd k, ell > n, rho > 1 and unknown keys rejected")

    assert _rejects(EstimatorConfig, ell=18)
    assert _rejects(EstimatorConfig, k=5, ell=15)
    assert _rejects(EstimatorConfig, n=12, ell=16)
    assert _rejects(GridConfig, rhos=[])
    assert _rejects(GridConfig, fractions=[0.0])
    assert _rejects(RunConfig, problem={"n": 20, "extra": 1})
    print("  ✓ ell not a multiple of k, empty grids and nested unknown keys rejected")

    print("✓ Validation tests passed\n")


def test_overrides_and_files():
    """Test dotted overrides and loading from a JSON file."""
    print("Testing overrides and config files...")

    cfg = RunConfig().merged({"problem.n": 30, "seed": 5, "spectral.tol": None})
    assert cfg.problem.n == 30 and cfg.seed == 5
    assert cfg.spectral.tol == RunConfig().spectral.tol
    print("  ✓ Dotted keys applied, None skipped")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "run.json"
        path.write_text(json.dumps({"seed": 3, "problem": {"n": 12, "ell": 4}}))
        loaded = RunConfig.from_file(path)
        assert loaded.seed == 3 and loaded.problem.n == 12 and loaded.problem.k == 4
        header = loaded.header()
        assert header["problem"]["ell"] == 4 and header["out"] == "output"
    print("  ✓ JSON file loaded and header serialized")

    old = os.environ.get(THREADS_ENV)
    try:
        os.environ[THREADS_ENV] = "3"
        assert default_threads() == 3
        os.environ[THREADS_ENV] = "many"
        assert default_threads() == 1
    finally:
        if old is None:
            os.environ.pop(THREADS_ENV, None)
        else:
            os.environ[THREADS_ENV] = old
    print(f"  ✓ {THREADS_ENV} read from the environment")

    print("✓ Override tests passed\n")


def run_all_tests():
    """Run all config tests."""
    print("=" * 60)
    print("CONFIGURATION - UNIT TESTS")
    print("=" * 60)
    print()

    try:
        test_defaults()
        test_validation()
        test_overrides_and_files()

        print("=" * 60)
        print("ALL TESTS PASSED!")
        print("=" * 60)
        return 0

    except AssertionError as e:
        print(f"\n✗ TEST FAILED: {e}")
        return 1
    except Exception as e:
        print(f"\n✗ ERROR: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(run_all_tests())
