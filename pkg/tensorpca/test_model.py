#!/usr/bin/env python3
"""
Test script for instance sampling, the asymmetric embedding and tensor files.

Run from the project root:
    python -m tensorpca.test_model
"""

import math
import sys
import tempfile
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from tensorpca.combinatorics import binom_exact
from tensorpca.io import load_spike, load_tensor, save_spike, save_tensor
from tensorpca.kikuchi import block_counts
from tensorpca.model import (
    ProblemParams,
    SparseSignedTensor,
    SpikeVector,
    distinct_part,
    make_rng,
    observation_target,
    sample_asymmetric_planted,
    sample_full_planted,
    sample_planted,
    sample_planted_split,
    sample_random,
    sample_simple,
    symmetric_embed,
    table_m,
)


def test_problem_params():
    """Test parameter validation and derived quantities."""
    print("Testing ProblemParams...")

    p = ProblemParams(n=20, k=4, ell=8, m_target=2000, rho=0.5)
    assert p.c == 2
    assert abs(p.eta - 0.25) < 1e-12
    assert abs(p.q - 2000 / 4845) < 1e-12
    assert p.N == 80
    print("  ✓ c, eta, q and N")

    for kwargs in [dict(k=3), dict(ell=21), dict(ell=1), dict(rho=1.5), dict(m_target=-1)]:
        base = dict(n=20, k=4, ell=6, m_target=100, rho=1.0)
        base.update(kwargs)
        try:
            ProblemParams(**base)
        except ValueError:
            continue
        raise AssertionError(f"ProblemParams accepted {kwargs}")
    print("  ✓ Invalid parameters rejected")

    try:
        ProblemParams(n=20, k=4, ell=6, m_target=100).c
        raise AssertionError("c defined for ell not a multiple of k")
    except ValueError:
        pass
    print("  ✓ c needs k | ell")

    print("✓ ProblemParams tests passed\n")


def test_rng_streams():
    """Test that streams are reproducible and independent per purpose."""
    print("Testing RNG streams...")

    a = make_rng(7, "entries").random(5)
    b = make_rng(7, "entries").random(5)
    c = make_rng(7, "signs").random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, make_rng(8, "entries").random(5))
    print("  ✓ Same (seed, purpose) repeats, other purposes differ")

    try:
        make_rng(0, "nonsense")
        raise AssertionError("unknown purpose accepted")
    except ValueError:
        pass
    print("  ✓ Unknown purpose rejected")

    print("✓ RNG stream tests passed\n")


def test_planted_sampling():
    """Test reproducibility, sign structure and Poisson concentration."""
    print("Testing sample_planted...")

    params = ProblemParams(n=20, k=4, ell=6, m_target=2000, rho=1.0, seed=2)
    t1, z1 = sample_planted(params)
    t2, z2 = sample_planted(params)
    assert np.array_equal(t1.subsets, t2.subsets) and np.array_equal(t1.weights, t2.weights)
    assert np.array_equal(z1.values, z2.values)
    print("  ✓ Same seed, same instance")

    assert np.all(t1.weights * z1.parity(t1.subsets) > 0)
    print("  ✓ rho = 1: every weight carries the spike parity")

    sigma = math.sqrt(2000)
    assert abs(t1.total_mass - 2000) <= 5 * sigma
    print(f"  ✓ Mass {t1.total_mass} within 5 sigma of 2000")

    q = 2000 / binom_exact(20, 4)
    p_hit = 1 - math.exp(-q)
    mean = binom_exact(20, 4) * p_hit
    sd = math.sqrt(binom_exact(20, 4) * p_hit * (1 - p_hit))
    assert abs(t1.m - mean) <= 5 * sd
    print(f"  ✓ {t1.m} distinct entries, expected {mean:.0f} +/- {sd:.0f}")

    noisy = ProblemParams(n=20, k=4, ell=6, m_target=2000, rho=0.5, seed=1)
    t, z = sample_planted(noisy)
    signal = int(np.dot(t.weights, z.parity(t.subsets)))
    assert abs(signal - 0.5 * 2000) <= 5 * sigma
    print(f"  ✓ rho = 0.5: sum T_S z_S = {signal}, expected 1000")

    fixed = SpikeVector(values=np.ones(20))
    t3, z3 = sample_planted(params, spike=fixed)
    assert np.all(z3.values == 1)
    assert np.all(t3.weights > 0)
    print("  ✓ Caller-supplied spike is kept")

    print("✓ sample_planted tests passed\n")


def test_random_and_simple():
    """Test the null sampler and the collision-free sampler."""
    print("Testing sample_random / sample_simple...")

    params = ProblemParams(n=20, k=4, ell=6, m_target=2000, rho=1.0, seed=3)
    t = sample_random(params)
    _, z = sample_planted(params)
    agree = np.mean(t.weights * z.parity(t.subsets) > 0)
    assert 0.4 < agree < 0.6
    print(f"  ✓ Random instance agrees with a spike on {agree:.2f} of entries")

    simple = sample_simple(params, z)
    assert simple.m == 2000
    assert simple.is_simple
    assert np.unique(simple.subsets, axis=0).shape[0] == 2000
    print("  ✓ simple_signs: 2000 distinct +/-1 entries")

    try:
        sample_simple(ProblemParams(n=6, k=4, ell=4, m_target=100), SpikeVector(values=np.ones(6)))
        raise AssertionError("m above C(n, k) accepted")
    except ValueError:
        pass
    print("  ✓ m > C(n, k) rejected")

    print("✓ Null and simple sampler tests passed\n")


def test_split():
    """Test Poisson splitting into two halves."""
    print("Testing sample_planted_split...")

    params = ProblemParams(n=20, k=4, ell=8, m_target=3000, rho=1.0, seed=5)
    a, b, z = sample_planted_split(params, zeta=0.3)
    full, z_full = sample_planted(params)
    assert np.array_equal(z.values, z_full.values)
    assert a.total_mass + b.total_mass == full.total_mass
    frac = a.total_mass / full.total_mass
    assert abs(frac - 0.3) < 0.05
    print(f"  ✓ Halves partition the inclusions, first half holds {frac:.3f}")

    for zeta in (0.0, 1.0):
        try:
            sample_planted_split(params, zeta)
            raise AssertionError(f"zeta={zeta} accepted")
        except ValueError:
            pass
    print("  ✓ zeta outside (0, 1) rejected")

    print("✓ Split tests passed\n")


def test_asymmetric_embedding():
    """Test ordered sampling and the block embedding on N = k n variables."""
    print("Testing asymmetric sampling and embedding...")

    params = ProblemParams(n=7, k=4, ell=4, m_target=0.2 * 7 ** 4, rho=1.0, seed=4)
    sample, spike = sample_asymmetric_planted(params)
    assert len(spike) == 28 and spike.block_size == 7
    assert sample.tuples.min() >= 1 and sample.tuples.max() <= 7
    print(f"  ✓ {sample.m} ordered entries over [7]^4")

    t = symmetric_embed(sample)
    assert t.n == 28 and t.block_size == 7 and not t.symmetric_flag
    assert np.all(block_counts(t.subsets, 7, 4) == 1)
    print("  ✓ Every embedded subset takes one index per block")

    assert np.all(t.weights * spike.parity(t.subsets) > 0)
    print("  ✓ Embedded weights carry the block spike parity")

    print("✓ Asymmetric tests passed\n")


def test_full_tensor():
    """Test the full ordered tensor and its distinct-index part."""
    print("Testing sample_full_planted...")

    params = ProblemParams(n=20, k=4, ell=8, m_target=2000, rho=1.0, seed=6)
    full, z = sample_full_planted(params)
    assert full.tuples.shape[1] == 4
    repeated = np.any(np.diff(np.sort(full.tuples, axis=1), axis=1) == 0, axis=1)
    assert repeated.any()
    print(f"  ✓ {full.m} ordered entries, {int(repeated.sum())} with a repeated index")

    sym = distinct_part(full)
    assert isinstance(sym, SparseSignedTensor)
    assert np.all(sym.weights * z.parity(sym.subsets) > 0)
    assert abs(sym.total_mass - 2000) <= 5 * math.sqrt(2000)
    print(f"  ✓ Distinct part has mass {sym.total_mass}, distributed like a planted instance")

    print("✓ Full tensor tests passed\n")


def test_targets_and_files():
    """Test the m rule, observation fractions and tensor files."""
    print("Testing m rules and tensor files...")

    assert abs(table_m(20) - 4000 * math.log(20)) < 1e-9
    assert observation_target(20, 4, 0.5) == 0.5 * 4845
    assert observation_target(7, 4, 0.1, asymmetric=True) == 0.1 * 7 ** 4
    print("  ✓ m = 10 n^2 ln n and observation fractions")

    params = ProblemParams(n=12, k=4, ell=4, m_target=300, rho=0.5, seed=9)
    t, z = sample_planted(params)
    with tempfile.TemporaryDirectory() as tmp:
        for name in ("t.txt", "t.json"):
            path = save_tensor(t, Path(tmp) / name, config={"seed": 9})
            back = load_tensor(path)
            assert back.n == t.n and back.k == t.k
            assert np.array_equal(back.subsets, t.subsets)
            assert np.array_equal(back.weights, t.weights)
        spike = load_spike(save_spike(z, Path(tmp) / "spike.json"))
        assert np.array_equal(spike.values, z.values) and spike.block_size is None
    print("  ✓ Text and JSON files reload bit-exactly, spike files too")

    print("✓ File tests passed\n")


def run_all_tests():
    """Run all model tests."""
    print("=" * 60)
    print("MODEL - UNIT TESTS")
    print("=" * 60)
    print()

    try:
        test_problem_params()
        test_rng_streams()
        test_planted_sampling()
        test_random_and_simple()
        test_split()
        test_asymmetric_embedding()
        test_full_tensor()
        test_targets_and_files()

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
