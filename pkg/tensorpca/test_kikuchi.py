#!/usr/bin/env python3
"""
Test script for Kikuchi operator construction.

Checks the three build paths against each other and against the entry definition,
plus the parity-class structure of embedded asymmetric tensors.

Run from the project root:
    python -m tensorpca.test_kikuchi
"""

import math
import sys
import tempfile
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from tensorpca.combinatorics import SubsetIndexer, binom_exact, kikuchi_stats
from tensorpca.errors import DimensionCapError
from tensorpca.kikuchi import (
    EXPLICIT_DIM_CAP,
    build,
    entry,
    matvec,
    quadratic_form,
    spike_lift,
    symmetric_contraction,
    valid_mask,
)
from tensorpca.model import (
    ProblemParams,
    SparseSignedTensor,
    sample_asymmetric_planted,
    sample_planted,
    symmetric_embed,
)


def test_entry_definition():
    """Test K[U, V] = T_{U delta V} on every pair of a small instance."""
    print("Testing entry definition...")

    t, _ = sample_planted(ProblemParams(n=8, k=4, ell=3, m_target=25, rho=0.5, seed=11))
    op = build(t, 3, mode="explicit")
    K = op.dense()
    idx = SubsetIndexer(8, 3)
    subsets = idx.all_subsets()
    for i, U in enumerate(subsets):
        for j, V in enumerate(subsets):
            assert K[i, j] == entry(op, tuple(U), tuple(V))
    print(f"  ✓ All {K.size} entries match the definition")

    assert np.allclose(K, K.T)
    assert np.all(np.diag(K) == 0)
    print("  ✓ Symmetric with zero diagonal")

    assert np.array_equal(op.column_sparsity, np.count_nonzero(K, axis=0))
    assert op.d_max == int(np.count_nonzero(K, axis=0).max())
    print(f"  ✓ Column sparsity and d_max={op.d_max}")

    print("✓ Entry definition tests passed\n")


def test_explicit_matches_implicit():
    """Test explicit and implicit matvecs on random vectors."""
    print("Testing explicit vs implicit matvec...")

    t, _ = sample_planted(ProblemParams(n=20, k=4, ell=6, m_target=500, rho=1.0, seed=12))
    explicit = build(t, 6, mode="explicit")
    implicit = build(t, 6, mode="implicit")
    assert explicit.build_path == "entrywise"
    assert implicit.matrix is None
    assert np.array_equal(explicit.column_sparsity, implicit.column_sparsity)
    print(f"  ✓ dim={explicit.dim}, same column sparsity (d_max={explicit.d_max})")

    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.standard_normal(explicit.dim)
        assert np.max(np.abs(matvec(explicit, x) - matvec(implicit, x))) < 1e-12 * max(1.0, np.abs(x).sum())
    print("  ✓ 20 random vectors agree")

    threaded = build(t, 6, mode="implicit", workers=4)
    x = rng.standard_normal(explicit.dim)
    assert np.allclose(matvec(threaded, x), matvec(explicit, x), atol=1e-10)
    print("  ✓ Threaded implicit matvec agrees")

    print("✓ Explicit/implicit tests passed\n")


def test_pattern_path():
    """Test the dense-pattern build path on a near-complete instance."""
    print("Testing pattern build path...")

    t, _ = sample_planted(ProblemParams(n=12, k=4, ell=4, m_target=1500, rho=0.5, seed=13))
    op = build(t, 4)
    assert op.build_path == "pattern"
    ref = build(t, 4, mode="implicit")
    x = np.random.default_rng(1).standard_normal(op.dim)
    assert np.allclose(matvec(op, x), matvec(ref, x), atol=1e-9)
    print(f"  ✓ Pattern path ({op.matrix.nnz} nonzeros) matches the implicit product")

    print("✓ Pattern path tests passed\n")


def test_degree_statistics():
    """Test that the mean degree tracks d = m delta on a planted instance."""
    print("Testing degree statistics...")

    m = 500
    t, _ = sample_planted(ProblemParams(n=20, k=4, ell=6, m_target=m, rho=1.0, seed=14))
    op = build(t, 6)
    stats = kikuchi_stats(20, 4, 6, t.m)
    mean_degree = op.column_sparsity.mean()
    assert abs(mean_degree - stats.d) < 1e-9
    print(f"  ✓ Mean degree {mean_degree:.3f} equals m delta over distinct entries")

    print("✓ Degree tests passed\n")


def test_spike_lift():
    """Test the lifted spike and its energy."""
    print("Testing spike_lift...")

    params = ProblemParams(n=10, k=4, ell=4, m_target=200, rho=1.0, seed=15)
    t, z = sample_planted(params)
    x = spike_lift(z, 4)
    assert abs(np.linalg.norm(x) - 1) < 1e-12
    op = build(t, 4)
    pairs = binom_exact(4, 2) * binom_exact(6, 2)
    expected = t.total_mass * pairs / binom_exact(10, 4)
    assert abs(quadratic_form(op, x) - expected) < 1e-9
    print(f"  ✓ <z|K|z> = {expected:.3f} at rho = 1")

    val = symmetric_contraction(t, z.values)
    assert abs(val - math.factorial(4) * t.total_mass) < 1e-9
    print("  ✓ T . z^(x)k = k! sum |T_S| at rho = 1")

    print("✓ spike_lift tests passed\n")


def test_embedded_classes():
    """Test parity classes and the valid-subset spike direction."""
    print("Testing embedded parity classes...")

    params = ProblemParams(n=3, k=4, ell=2, m_target=40, rho=1.0, seed=16)
    sample, spike = sample_asymmetric_planted(params)
    t = symmetric_embed(sample)
    op = build(t, 4)
    assert op.classes is not None and len(op.classes) > 1
    sizes = sum(c.size for c in op.classes)
    assert sizes == op.dim == binom_exact(12, 4)
    K = op.dense()
    label = np.empty(op.dim, dtype=int)
    for i, cls in enumerate(op.classes):
        label[cls] = i
    rows, cols = np.nonzero(K)
    assert np.all(label[rows] == label[cols])
    print(f"  ✓ {len(op.classes)} classes; no nonzero crosses a class boundary")

    mask = valid_mask(12, 4, 3, 4)
    assert mask.sum() == 3 ** 4
    zt = spike_lift(spike, 4, 4)
    assert abs(np.linalg.norm(zt) - 1) < 1e-12
    assert np.all(zt[~mask] == 0)
    print("  ✓ Valid spike direction is a unit vector on the valid subsets")

    # every step moves each block count by one, so K maps the valid set entirely off itself
    y = K @ mask.astype(float)
    assert np.all(y[mask] == 0) and np.abs(y[~mask]).sum() > 0
    print("  ✓ Valid subsets are not invariant; parity classes are")

    print("✓ Embedded class tests passed\n")


def test_caps():
    """Test dimension caps and the coordinate dump."""
    print("Testing caps and dumps...")

    t, _ = sample_planted(ProblemParams(n=20, k=4, ell=6, m_target=100, rho=1.0, seed=17))
    try:
        build(t, 6, mode="explicit", explicit_dim_cap=1000)
        raise AssertionError("explicit build past the cap")
    except DimensionCapError:
        pass
    op = build(t, 6, mode="auto", explicit_dim_cap=1000)
    assert op.mode == "implicit"
    assert EXPLICIT_DIM_CAP == 200_000
    print("  ✓ auto falls back to implicit past the cap")

    small, _ = sample_planted(ProblemParams(n=8, k=4, ell=3, m_target=10, rho=1.0, seed=18))
    op = build(small, 3)
    with tempfile.TemporaryDirectory() as tmp:
        path = op.dump_coo(Path(tmp) / "k.txt")
        rows = np.loadtxt(path, ndmin=2)
        assert rows.shape[0] == op.matrix.nnz
    print("  ✓ Coordinate dump writes one line per nonzero")

    empty = SparseSignedTensor(n=8, k=4, subsets=np.zeros((0, 4)), weights=np.zeros(0))
    op = build(empty, 3)
    assert op.d_max == 0 and op.matrix.nnz == 0
    print("  ✓ Empty tensor gives the zero operator")

    print("✓ Cap tests passed\n")


def run_all_tests():
    """Run all Kikuchi operator tests."""
    print("=" * 60)
    print("KIKUCHI OPERATOR - UNIT TESTS")
    print("=" * 60)
    print()

    try:
        test_entry_definition()
        test_explicit_matches_implicit()
        test_pattern_path()
        test_degree_statistics()
        test_spike_lift()
        test_embedded_classes()
        test_caps()

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
