#!/usr/bin/env python3
"""
Test script for guiding states, overlap measurements and amplitude-amplification sizing.

Run from the project root:
    python -m tensorpca.test_guiding
"""

import math
import sys
from itertools import product
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from tensorpca.combinatorics import SubsetIndexer
from tensorpca.errors import DegenerateInputError
from tensorpca.guiding import (
    alpha_ell,
    alpha_lower_bound,
    amp_amp_reps,
    asym_guiding,
    asym_overlap_report,
    build_guiding,
    guiding_energy,
    guiding_energy_direct,
    masks_to_subsets,
    overlap_report,
    popcount,
    reps_from_overlap,
    subset_masks,
)
from tensorpca.kikuchi import block_counts, build, matvec, spike_lift
from tensorpca.model import (
    ProblemParams,
    SparseSignedTensor,
    sample_asymmetric_planted,
    sample_planted,
    sample_planted_split,
    symmetric_embed,
    table_m,
)
from tensorpca.spectral import asym_thresholds, thresholds


def test_bitmasks():
    """Test the uint64 subset encoding."""
    print("Testing bitmask helpers...")

    rows = np.array([[1, 2, 5], [3, 4, 64]])
    masks = subset_masks(rows)
    assert int(masks[0]) == 0b10011
    assert int(masks[1]) == (1 << 2) | (1 << 3) | (1 << 63)
    assert np.array_equal(masks_to_subsets(masks, 64, 3), rows)
    assert list(popcount(masks)) == [3, 3]
    print("  ✓ Encode, decode and popcount up to index 64")

    print("✓ Bitmask tests passed\n")


def test_guiding_matches_brute_force():
    """Test amplitudes, alpha and beta^2 against an explicit pair enumeration."""
    print("Testing build_guiding...")

    params = ProblemParams(n=8, k=2, ell=4, m_target=6, rho=1.0, seed=31)
    t, _ = sample_planted(params, simple_signs=True)
    idx = SubsetIndexer(8, 4)
    raw = np.zeros(idx.size)
    disjoint = 0
    for (Si, wi), (Sj, wj) in product(zip(t.subsets, t.weights), repeat=2):
        if set(Si) & set(Sj):
            continue
        disjoint += 1
        raw[idx.rank(sorted(set(Si) | set(Sj)))] += wi * wj

    g = build_guiding(t, 4)
    assert g.c == 2
    assert np.allclose(g.raw, raw)
    assert abs(np.linalg.norm(g.amplitudes) - 1) < 1e-12
    assert abs(g.alpha_ell - disjoint / t.m ** 2) < 1e-12
    assert abs(g.beta_sq - 2.0 ** -4 * np.dot(raw, raw) / t.m ** 2) < 1e-12
    assert g.beta_sq_lower <= g.beta_sq + 1e-15
    print(f"  ✓ {disjoint} disjoint ordered pairs, alpha={g.alpha_ell:.4f}, beta^2={g.beta_sq:.4e}")

    op = build(t, 4)
    assert abs(guiding_energy(g, op) - guiding_energy_direct(g, t)) < 1e-9
    print("  ✓ <Gamma|K|Gamma> through the operator and from support pairs agree")

    try:
        build_guiding(t, 3)
        raise AssertionError("ell not a multiple of k accepted")
    except ValueError:
        pass
    lonely = SparseSignedTensor.from_entries(8, 2, {(1, 2): 1, (2, 3): -1})
    try:
        build_guiding(lonely, 4)
        raise AssertionError("no disjoint pair, but a state was built")
    except DegenerateInputError:
        pass
    print("  ✓ Bad levels and tuple-free instances rejected")

    print("✓ build_guiding tests passed\n")


def test_alpha():
    """Test alpha_ell = 1 - overlapping fraction and its lower bound."""
    print("Testing alpha_ell...")

    params = ProblemParams(n=20, k=4, ell=8, m_target=200, rho=1.0, seed=32)
    t, _ = sample_planted(params, simple_signs=True)
    sets = [set(S) for S in t.subsets.tolist()]
    overlapping = sum(1 for a in sets for b in sets if a & b)
    assert abs(alpha_ell(t, 2) - (1 - overlapping / t.m ** 2)) < 1e-12
    assert abs(alpha_ell(t, 2, workers=3) - alpha_ell(t, 2)) < 1e-12
    print(f"  ✓ alpha = 1 - {overlapping}/{t.m}^2")

    bound = alpha_lower_bound(20, 4, 2, 2000)
    assert abs(bound - (1 - (16 / 20 + 16 * math.log(20) / 2000))) < 1e-12
    for seed in range(3):
        big, _ = sample_planted(ProblemParams(n=20, k=4, ell=8, m_target=2000, rho=1.0, seed=seed))
        a = alpha_ell(big, 2)
        assert a >= bound, f"seed {seed}: alpha {a} below {bound}"
    print(f"  ✓ alpha above the bound {bound:.3f} at m=2000")

    print("✓ alpha tests passed\n")


def test_amp_amp_reps():
    """Test L against the reference repetition counts."""
    print("Testing amp_amp_reps...")

    for n, reference in [(60, 31), (80, 89), (100, 201), (120, 393)]:
        L = amp_amp_reps(n, 4, 16, table_m(n))
        assert abs(L - reference) <= 1, f"n={n}: L={L}, expected {reference}"
        print(f"  ✓ n={n}: L={L} (reference {reference})")

    assert reps_from_overlap(0.25) == 2
    assert reps_from_overlap(0.25, prefactor=3.0) == 6
    try:
        reps_from_overlap(0.0)
        raise AssertionError("zero overlap accepted")
    except DegenerateInputError:
        pass
    print("  ✓ L from a measured overlap")

    print("✓ amp_amp_reps tests passed\n")


def test_overlap_report():
    """Test measured overlaps of the guiding state and spike above lambda*."""
    print("Testing overlap_report...")

    params = ProblemParams(n=12, k=4, ell=8, m_target=2000, rho=1.0, seed=33)
    guide, main, z = sample_planted_split(params, zeta=0.5)
    th = thresholds(12, 4, 8, main.total_mass, rho=1.0)
    assert th.valid
    report = overlap_report(main, z, 8, th, rho=1.0, guiding_tensor=guide)
    assert report.subspace_dim >= 1
    assert 0 < report.zeta_sq <= 1
    assert report.spike_bound_holds
    assert report.L_measured == reps_from_overlap(report.zeta_sq)
    assert report.to_dict()["spike_bound_holds"] is True
    print(f"  ✓ dim={report.subspace_dim}, zeta^2={report.zeta_sq:.3f}, spike={report.spike_sq:.3f}")

    print("✓ overlap_report tests passed\n")


def test_asymmetric_guiding():
    """Test the embedded guiding state and the embedded overlap report."""
    print("Testing asymmetric guiding...")

    params = ProblemParams(n=3, k=4, ell=2, m_target=30, rho=1.0, seed=34)
    sample, spike = sample_asymmetric_planted(params)
    t = symmetric_embed(sample)
    g = asym_guiding(t, 8)
    U = SubsetIndexer(12, 8).unrank_many(g.support)
    assert np.all(block_counts(U, 3, 4) == 2)
    assert g.asymmetric and g.block_size == 3 and g.scaled is not None
    assert abs(np.linalg.norm(g.amplitudes) - 1) < 1e-12
    print(f"  ✓ Support of {g.support.size} valid subsets")

    th = asym_thresholds(3, 4, 8, t.total_mass, rho=1.0)
    report = asym_overlap_report(t, spike, 8, th, rho=1.0, m=t.total_mass)
    op = build(t, 8)
    Kz = matvec(op, spike_lift(spike, 8, 4))
    assert abs(report.energy_sq - float(Kz @ Kz)) < 1e-9
    assert report.d_max == op.d_max > 0
    assert 0 <= report.spike_sq_adaptive <= 1 + 1e-12
    print(f"  ✓ <K^2>={report.energy_sq:.3f}, d_max={report.d_max}")

    print("✓ Asymmetric guiding tests passed\n")


def run_all_tests():
    """Run all guiding tests."""
    print("=" * 60)
    print("GUIDING STATES - UNIT TESTS")
    print("=" * 60)
    print()

    try:
        test_bitmasks()
        test_guiding_matches_brute_force()
        test_alpha()
        test_amp_amp_reps()
        test_overlap_report()
        test_asymmetric_guiding()

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
