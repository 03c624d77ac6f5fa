#!/usr/bin/env python3
"""
Test script for subset ranking, Kikuchi statistics and Johnson-scheme eigenvalues.

Run from the project root:
    python -m tensorpca.test_combinatorics
"""

import math
import sys
from itertools import combinations
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from tensorpca.combinatorics import (
    SubsetIndexer,
    binom_exact,
    delta_upper_bound,
    eberlein,
    eberlein_shifted,
    eigenspace_multiplicity,
    johnson_matrix,
    johnson_spectrum,
    kikuchi_stats,
    log_binom,
)


def test_subset_indexer():
    """Test colex ranking against an exhaustive enumeration."""
    print("Testing SubsetIndexer...")

    idx = SubsetIndexer(n=9, ell=4)
    assert idx.size == 126
    assert idx.unrank(0) == (1, 2, 3, 4)
    assert idx.unrank(idx.size - 1) == (6, 7, 8, 9)
    print("  ✓ First and last subsets")

    seen = set()
    for S in combinations(range(1, 10), 4):
        r = idx.rank(S)
        assert idx.unrank(r) == S
        seen.add(r)
    assert seen == set(range(idx.size))
    print("  ✓ rank/unrank is a bijection onto [0, C(n, l))")

    rows = idx.all_subsets()
    assert rows.shape == (126, 4)
    assert np.array_equal(idx.rank_many(rows), np.arange(126))
    assert np.array_equal(idx.unrank_many(np.arange(126)), rows)
    # colex: the largest element is nondecreasing along the ranks
    assert np.all(np.diff(rows[:, -1]) >= 0)
    print("  ✓ Vectorized paths agree with the scalar ones")

    for bad in [(1, 2, 3), (2, 1, 3, 4), (1, 2, 3, 10)]:
        try:
            idx.rank(bad)
        except ValueError:
            continue
        raise AssertionError(f"rank accepted {bad}")
    print("  ✓ Unsorted, short and out-of-range subsets are rejected")

    print("✓ SubsetIndexer tests passed\n")


def test_binomials():
    """Test exact and log-space binomials."""
    print("Testing binomials...")

    assert binom_exact(20, 6) == 38760
    assert binom_exact(5, 7) == 0
    assert binom_exact(5, -1) == 0
    assert abs(log_binom(100, 16) - math.log(math.comb(100, 16))) < 1e-9
    assert log_binom(3, 5) == -math.inf
    print("  ✓ C(n, r) and ln C(n, r)")

    print("✓ Binomial tests passed\n")


def test_kikuchi_stats():
    """Test the closed-form sparsity, degree and edge count."""
    print("Testing kikuchi_stats...")

    m = 10 * 20 ** 2 * math.log(20)
    s = kikuchi_stats(n=20, k=4, ell=6, m=m)
    expected_delta = math.comb(16, 4) * math.comb(4, 2) / math.comb(20, 6)
    assert abs(s.delta - expected_delta) < 1e-12
    assert abs(s.d - m * expected_delta) < 1e-9
    assert s.Delta == math.comb(14, 2) * math.comb(6, 2) == 1365
    assert abs(s.E - 0.5 * m * math.comb(16, 4) * 6) < 1e-6
    print(f"  ✓ n=20, k=4, ell=6: delta={s.delta:.4f}, d={s.d:.1f}, Delta={s.Delta}")

    assert s.delta <= delta_upper_bound(20, 4, 6)
    print("  ✓ delta below C(k, k/2) (ell/n)^(k/2)")

    exact = kikuchi_stats(n=30, k=4, ell=8, m=5000, exact=True)
    approx = kikuchi_stats(n=30, k=4, ell=8, m=5000, exact=False)
    assert abs(exact.delta - approx.delta) / exact.delta < 1e-9
    assert abs(exact.E - approx.E) / exact.E < 1e-9
    print("  ✓ Exact and log-space paths agree")

    assert s.delta_S is None
    emb = kikuchi_stats(n=10, k=4, ell=8, m=1000)
    assert emb.delta_S == 6 * 2 ** 2 * 8 ** 2 / 10 ** 4
    assert abs(emb.d_S - 1000 * emb.delta_S) < 1e-9
    print("  ✓ Embedding analogues only when k divides ell")

    for bad in [(20, 3, 6), (20, 4, 1), (20, 4, 21)]:
        try:
            kikuchi_stats(*bad, m=100)
        except ValueError:
            continue
        raise AssertionError(f"kikuchi_stats accepted {bad}")
    print("  ✓ Odd k and out-of-range ell rejected")

    print("✓ kikuchi_stats tests passed\n")


def test_eberlein_matches_brute_force():
    """Test Eberlein eigenvalues against diagonalized Johnson matrices."""
    print("Testing Eberlein polynomials...")

    for n, ell in [(8, 2), (10, 3), (12, 4)]:
        for i in range(ell + 1):
            A = johnson_matrix(n, ell, i)
            brute = np.sort(np.round(np.linalg.eigvalsh(A)).astype(int))
            formula = np.sort(np.concatenate([[eig] * mult for eig, mult in johnson_spectrum(n, ell, i)]))
            assert brute.size == formula.size == math.comb(n, ell)
            assert np.array_equal(brute, formula), f"(n, ell, i) = ({n}, {ell}, {i})"
        print(f"  ✓ (n, ell) = ({n}, {ell}): every distance i matches")

    # C(n - ell - r + j, i - j) as third factor does not reproduce the spectrum
    n, ell, i = 10, 3, 2
    brute = np.sort(np.round(np.linalg.eigvalsh(johnson_matrix(n, ell, i))).astype(int))
    shifted = np.sort(np.concatenate([[eberlein_shifted(n, ell, i, r)] * eigenspace_multiplicity(n, r)
                                      for r in range(ell + 1)]))
    assert shifted.size == brute.size and not np.array_equal(shifted, brute)
    assert eberlein(n, ell, i, 1) == 3 and eberlein_shifted(n, ell, i, 1) == 1
    print("  ✓ Shifted third factor disagrees with the diagonalized J(10, 3) at distance 2")

    print("✓ Eberlein tests passed\n")


def test_simultaneous_eigenspaces():
    """Test that J_1 and J_{k/2} share eigenvectors with the predicted eigenvalue pairs."""
    print("Testing simultaneous diagonalization...")

    n, ell, half = 10, 3, 2
    J1 = johnson_matrix(n, ell, 1)
    Jh = johnson_matrix(n, ell, half)
    assert np.allclose(J1 @ Jh, Jh @ J1)
    w, Q = np.linalg.eigh(J1)
    for r in range(ell + 1):
        cols = Q[:, np.isclose(w, eberlein(n, ell, 1, r))]
        assert cols.shape[1] == eigenspace_multiplicity(n, r)
        assert np.allclose(Jh @ cols, eberlein(n, ell, half, r) * cols)
    print("  ✓ Each J_1 eigenspace is a J_2 eigenspace")

    print("✓ Simultaneous diagonalization tests passed\n")


def test_bottom_eigenvalue():
    """Test lambda_ell(n, ell, 1) = -ell over a sweep."""
    print("Testing lambda_ell(n, ell, 1)...")

    for n in range(4, 41, 3):
        for ell in range(1, n // 2 + 1):
            assert eberlein(n, ell, 1, ell) == -ell
    print("  ✓ -ell for every n >= 2 ell in the sweep")

    for n, ell in [(9, 4), (20, 6)]:
        assert eberlein(n, ell, 1, 0) == ell * (n - ell)
    print("  ✓ Top eigenvalue ell (n - ell)")

    print("✓ lambda_ell tests passed\n")


def run_all_tests():
    """Run all combinatorics tests."""
    print("=" * 60)
    print("COMBINATORICS - UNIT TESTS")
    print("=" * 60)
    print()

    try:
        test_subset_indexer()
        test_binomials()
        test_kikuchi_stats()
        test_eberlein_matches_brute_force()
        test_simultaneous_eigenspaces()
        test_bottom_eigenvalue()

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
