#!/usr/bin/env python3
"""
End-to-end tests for the run_pipeline CLI.

Each test drives main() with an argument list and a temporary --out directory,
then reads back the artifacts it wrote.

Usage:
    python test_pipeline.py
"""

import json
import sys
import tempfile
from pathlib import Path

import pandas as pd

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from generate_report import generate_report
from run_pipeline import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, main
from tensorpca.model import table_m


def _body(path: Path) -> list:
    return [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]


def _cert(out: Path) -> dict:
    return json.loads((out / "certificate.json").read_text())


def test_sample_and_detect():
    """Test sample -> detect on planted, random and under-sampled files."""
    print("Testing sample / detect...")

    m = str(table_m(12))
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "planted"
        assert main(["sample", "--n", "12", "--ell", "4", "--rho", "1", "--out", str(out)]) == EXIT_OK
        tensor = out / "tensor.txt"
        assert tensor.exists() and (out / "spike.json").exists()
        assert tensor.read_text().startswith("# config:")
        assert (out / "pipeline_log.txt").exists()

        code = main(["detect", "--tensor", str(tensor), "--ell", "4", "--rho", "1", "--m", m,
                     "--out", str(out)])
        cert = _cert(out)
        assert code == EXIT_OK and cert["verdict"] == "planted", cert
        assert cert["config"]["problem"]["ell"] == 4
        print(f"  ✓ Planted file: lambda_hat={cert['lambda_hat']:.2f} >= lambda*={cert['lambda_star']:.2f}")

        out = Path(tmp) / "random"
        assert main(["sample", "--n", "12", "--ell", "4", "--random", "--out", str(out)]) == EXIT_OK
        code = main(["detect", "--tensor", str(out / "tensor.txt"), "--ell", "4", "--rho", "1", "--m", m,
                     "--out", str(out)])
        assert code == EXIT_OK and _cert(out)["verdict"] == "random"
        print("  ✓ Random file: verdict random")

        out = Path(tmp) / "sparse"
        assert main(["sample", "--n", "12", "--ell", "4", "--m", "20", "--rho", "0.2", "--out", str(out)]) == 0
        code = main(["detect", "--tensor", str(out / "tensor.txt"), "--ell", "4", "--rho", "0.2",
                     "--out", str(out)])
        assert code == EXIT_INCONCLUSIVE and _cert(out)["verdict"] == "inconclusive"
        print("  ✓ Under-sampled file: exit code 2")

    print("✓ sample / detect tests passed\n")


def test_determinism():
    """Test that the same (config, seed) reproduces every output."""
    print("Testing determinism...")

    m = str(table_m(12))
    with tempfile.TemporaryDirectory() as tmp:
        certs = []
        for name in ("a", "b"):
            out = Path(tmp) / name
            assert main(["sample", "--n", "12", "--ell", "4", "--seed", "3", "--out", str(out)]) == 0
            code = main(["detect", "--tensor", str(out / "tensor.txt"), "--ell", "4", "--m", m,
                         "--seed", "3", "--out", str(out)])
            assert code in (EXIT_OK, EXIT_INCONCLUSIVE)
            cert = _cert(out)
            cert.pop("config")
            certs.append(cert)
        a, b = Path(tmp) / "a", Path(tmp) / "b"
        assert _body(a / "tensor.txt") == _body(b / "tensor.txt")
        assert json.loads((a / "spike.json").read_text())["values"] == \
            json.loads((b / "spike.json").read_text())["values"]
        assert certs[0] == certs[1]

        out = Path(tmp) / "c"
        assert main(["sample", "--n", "12", "--ell", "4", "--seed", "4", "--out", str(out)]) == 0
        assert _body(out / "tensor.txt") != _body(a / "tensor.txt")
    print("  ✓ Identical tensors, spikes and certificates for one seed, different for another")

    print("✓ Determinism tests passed\n")


def test_recover_with_boosting():
    """Test recover on a sampled instance with its full tensor."""
    print("Testing recover...")

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        assert main(["sample", "--n", "12", "--ell", "4", "--full", "--seed", "47", "--out", str(out)]) == 0
        assert (out / "full_tensor.txt").exists()
        code = main(["recover", "--tensor", str(out / "tensor.txt"), "--spike", str(out / "spike.json"),
                     "--full-tensor", str(out / "full_tensor.txt"), "--ell", "4", "--seed", "1",
                     "--strategy", "top_eigvec", "--out", str(out)])
        assert code == EXIT_OK
        doc = json.loads((out / "recovery.json").read_text())
        assert doc["boosted"] is True
        assert doc["correlation"] >= 0.9 and doc["metadata"]["weak_correlation"] >= 0.9
        assert len(doc["candidate"]) == 12 and "config" in doc
        print(f"  ✓ weak {doc['metadata']['weak_correlation']:.3f} -> boosted {doc['correlation']:.3f}")

        code = main(["recover", "--tensor", str(out / "tensor.txt"), "--full-tensor",
                     str(out / "tensor.txt"), "--ell", "4", "--out", str(out)])
        assert code == EXIT_ERROR
        print("  ✓ Unordered boosting tensor rejected with exit code 1")

    print("✓ recover tests passed\n")


def test_estimate():
    """Test the single-row report and the four-row table."""
    print("Testing estimate...")

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        assert main(["estimate", "--table1", "--out", str(out)]) == EXIT_OK
        table = pd.read_csv(out / "table1.csv", comment="#")
        assert len(table) == 4
        assert list(table["Logical Qubits"]) == [525, 720, 900, 1110]
        assert (out / "table1.csv").read_text().startswith("# config:")
        print("  ✓ Four-row CSV with 525 / 720 / 900 / 1110 qubits")

        assert main(["estimate", "--n", "100", "--out", str(out)]) == EXIT_OK
        report = json.loads((out / "resources.json").read_text())
        assert report["L"] == 201 and report["logical_qubits"] == 900
        assert report["config"]["estimator"]["n"] == 100
        assert (out / "resources.md").exists()
        print("  ✓ n=100 report: L = 201")

        assert main(["estimate", "--n", "100", "--ell", "18", "--out", str(out)]) == EXIT_ERROR
        print("  ✓ ell not a multiple of k rejected")

    print("✓ estimate tests passed\n")


def test_usage_errors():
    """Test that bad flags exit with the error code, not the inconclusive one."""
    print("Testing usage errors...")

    with tempfile.TemporaryDirectory() as tmp:
        tensor = str(Path(tmp) / "tensor.txt")
        assert main(["detect", "--tensor", tensor, "--ell", "abc"]) == EXIT_ERROR
        print("  ✓ Non-integer --ell: exit code 1")

        assert main(["detect", "--ell", "4"]) == EXIT_ERROR
        print("  ✓ Missing --tensor: exit code 1")

        assert main(["fig2", "--rhos", "0,x"]) == EXIT_ERROR
        assert main(["no-such-command"]) == EXIT_ERROR
        print("  ✓ Bad list value and unknown command: exit code 1")

        assert main(["estimate", "--help"]) == EXIT_OK
        print("  ✓ --help: exit code 0")

    print("✓ usage error tests passed\n")


def test_verify_circuits():
    """Test the circuit property suite with a config file and flag overrides."""
    print("Testing verify-circuits...")

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        cfg = out / "run.json"
        cfg.write_text(json.dumps({"circuits": {"dicke_l": [1, 3], "dicke_count_l": [1, 2, 3],
                                                "oracle_instances": [[6, 2, 2, 3]]}}))
        code = main(["verify-circuits", "--dicke-l", "2", "--config", str(cfg), "--out", str(out)])
        doc = json.loads((out / "circuit_checks.json").read_text())
        assert code == EXIT_OK and doc["passed"], [c for c in doc["checks"] if not c["passed"]]
        assert doc["config"]["circuits"]["dicke_l"] == [2]
        assert doc["config"]["circuits"]["dicke_count_l"] == [1, 2, 3]
        names = [c["check"] for c in doc["checks"]]
        assert "dicke_conditions l=2" in names and "dicke_conditions l=3" not in names
        assert any(name.startswith("block_encoding") for name in names)
        print(f"  ✓ {len(names)} checks passed; flag beats config file beats defaults")

        assert main(["verify-circuits", "--counts-only", "--shuffle-c", "2", "--out", str(out)]) == EXIT_OK
        print("  ✓ Counts-only run")

    print("✓ verify-circuits tests passed\n")


def test_fig2_and_bench():
    """Test a tiny grid run, the HTML report and the matvec benchmark."""
    print("Testing fig2 / bench...")

    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp)
        code = main(["fig2", "--n", "12", "--ell", "4", "--rhos", "0,1", "--fractions", "0.5",
                     "--trials", "2", "--top", "1", "--threads", "2", "--out", str(out)])
        assert code == EXIT_OK
        table = pd.read_csv(out / "fig2_symmetric.csv", comment="#")
        assert len(table) == 2 and list(table["trials"]) == [2, 2]
        doc = json.loads((out / "fig2_symmetric.json").read_text())
        assert doc["config"]["run"]["grid"]["trials"] == 2
        print("  ✓ Two cells written to CSV and JSON")

        assert main(["estimate", "--table1", "--out", str(out)]) == EXIT_OK
        html = generate_report(str(out), str(out / "report.html")).read_text()
        assert "Mean correlation (symmetric)" in html and "Resource estimates" in html
        assert "1110" in html
        print("  ✓ HTML report rendered from the grid and table CSVs")

        assert main(["bench", "--n", "10", "--ell", "4", "--repeats", "2", "--out", str(out)]) == EXIT_OK
        bench = json.loads((out / "bench.json").read_text())
        assert [r["mode"] for r in bench["matvec"]] == ["explicit", "implicit"]
        assert bench["matvec"][0]["nnz"] == bench["matvec"][1]["nnz"]
        assert bench["model_flops"] > 0
        print(f"  ✓ Explicit and implicit matvecs timed, edge ratio {bench['edge_ratio']:.2f}")

    print("✓ fig2 / bench tests passed\n")


def run_all_tests():
    """Run all pipeline tests."""
    print("=" * 60)
    print("PIPELINE CLI - END-TO-END TESTS")
    print("=" * 60)
    print()

    try:
        test_sample_and_detect()
        test_determinism()
        test_recover_with_boosting()
        test_estimate()
        test_usage_errors()
        test_verify_circuits()
        test_fig2_and_bench()

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
