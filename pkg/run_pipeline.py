#!/usr/bin/env python3
"""
Unified CLI Pipeline Runner for the Kikuchi Spectral Method

MAIN ENTRY POINT that ties the tensorpca modules into reproducible runs:
- sample: draw a planted, random or asymmetric kXOR instance (optionally the full tensor T')
- detect: top Kikuchi eigenvalue against lambda* and the random bound
- recover: voting matrix, weak recovery, and boosting when T' is available
- fig2: recovery correlation over a (rho, observation fraction) grid
- estimate: quantum resource report for one row, or the four-row table
- verify-circuits: simulate the gadgets and oracles at tiny sizes
- bench: classical matvec timing against the FLOPs model

Every output file embeds the run configuration. Precedence: flags > --config file > defaults.

Usage:
    # Planted instance, then detection on it
    python run_pipeline.py sample --n 12 --ell 4 --rho 1 --out output/run1
    python run_pipeline.py detect --tensor output/run1/tensor.txt --ell 4 --out output/run1

    # Recovery with boosting
    python run_pipeline.py sample --n 12 --ell 4 --full --out output/run2
    python run_pipeline.py recover --tensor output/run2/tensor.txt --spike output/run2/spike.json \\
        --full-tensor output/run2/full_tensor.txt --ell 4 --out output/run2

    # Resource table
    python run_pipeline.py estimate --table1

Author: Aditya Aman
Created: 2026-01-07
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from tqdm import tqdm

from tensorpca.circuits.gadgets import (
    dicke_conditions,
    dicke_prep,
    dicke_resources,
    guiding_prep_check,
    shuffle_check,
)
from tensorpca.circuits.ir import count
from tensorpca.circuits.oracles import block_encoding_check, p_gadget, per_term_circuit
from tensorpca.circuits.qsp import load_phases, qsp_error_sweep, random_phases
from tensorpca.config import RunConfig
from tensorpca.errors import DegenerateInputError, DimensionCapError, TensorPCAError
from tensorpca.io import load_spike, load_tensor, save_spike, save_tensor
from tensorpca.kikuchi import build, matvec
from tensorpca.model import (
    AsymmetricTensorSample,
    ProblemParams,
    SparseSignedTensor,
    distinct_part,
    make_rng,
    sample_asymmetric_planted,
    sample_full_planted,
    sample_planted,
    sample_random,
    symmetric_embed,
)
from tensorpca.recovery import Setting, fig2_experiment, monotonicity_violations, recover
from tensorpca.resources import (
    classical_flops,
    compare_to_reference,
    emit_table1,
    estimate,
    table_markdown,
    write_table1,
)
from tensorpca.spectral import Verdict, detect

# Conditional imports for optional features
try:
    from rich.console import Console
    from rich.panel import Panel
    from rich.table import Table
    from rich.text import Text
    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_INTERRUPTED = 130

COMMANDS = ("sample", "detect", "recover", "fig2", "estimate", "verify-circuits", "bench")


# ============================================================================
# Logging
# ============================================================================

def setup_logging(output_dir: Path, verbose: bool = False) -> logging.Logger:
    """Configure logging for the pipeline and every tensorpca module under it."""
    output_dir.mkdir(parents=True, exist_ok=True)
    log_file = output_dir / "pipeline_log.txt"

    logger = logging.getLogger("tensorpca")
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    # Console handler
    console = logging.StreamHandler(sys.stdout)
    console.setLevel(logging.DEBUG if verbose else logging.INFO)
    console.setFormatter(logging.Formatter(
        '%(asctime)s | %(levelname)s | %(message)s',
        datefmt='%H:%M:%S'
    ))

    # File handler
    file_handler = logging.FileHandler(log_file, mode='a')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s | %(levelname)s | %(funcName)s:%(lineno)d | %(message)s'
    ))

    logger.addHandler(console)
    logger.addHandler(file_handler)
    logger.propagate = False

    return logger


# ============================================================================
# Configuration
# ============================================================================

def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Map parsed flags onto dotted RunConfig keys; unset flags stay None and are skipped."""
    get = lambda name: getattr(args, name, None)
    out = {
        "seed": get("seed"),
        "threads": get("threads"),
        "out": str(args.out) if get("out") is not None else None,
        "problem.n": get("n"),
        "problem.k": get("k"),
        "problem.ell": get("ell"),
        "problem.m": get("m"),
        "problem.rho": get("rho"),
        "problem.setting": get("setting"),
        "problem.simple_signs": True if get("simple_signs") else None,
        "spectral.tol": get("tol"),
        "spectral.method": get("method"),
    }
    if args.command == "fig2":
        out.update({
            "grid.setting": get("setting"),
            "grid.n": get("n"),
            "grid.k": get("k"),
            "grid.ell": get("ell"),
            "grid.rhos": get("rhos"),
            "grid.fractions": get("fractions"),
            "grid.trials": get("trials"),
            "grid.strategy": get("strategy"),
            "grid.top": get("top"),
            "problem.n": None,
            "problem.ell": None,
            "problem.setting": None,
        })
    elif args.command == "estimate":
        out.update({
            "estimator.n": get("n"),
            "estimator.k": get("k"),
            "estimator.ell": get("ell"),
            "estimator.m": get("m"),
            "estimator.rho": get("rho"),
            "estimator.q_qsp": get("q_qsp"),
            "estimator.flops_model": get("flops_model"),
            "problem.n": None,
            "problem.k": None,
            "problem.ell": None,
            "problem.m": None,
            "problem.rho": None,
        })
    elif args.command == "verify-circuits":
        out.update({
            "circuits.dicke_l": get("dicke_l"),
            "circuits.shuffle_c": get("shuffle_c"),
            "circuits.qsp_phases": get("qsp_phases"),
        })
    return out


def load_run_config(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.from_file(args.config) if args.config else RunConfig()
    return base.merged(overrides_from_args(args))


# ============================================================================
# Pipeline Runner
# ============================================================================

class PipelineRunner:
    """
    Dispatches one command against a validated RunConfig.

    Each cmd_* method writes its artifacts under config.out and returns an exit code.
    """

    def __init__(self, config: RunConfig, args: argparse.Namespace):
        """Initialize the pipeline runner."""
        self.config = config
        self.args = args
        self.out = Path(config.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.header = config.header()
        self.summary: Dict[str, Any] = {"command": args.command, "output_dir": str(self.out)}

        self.logger = setup_logging(self.out, verbose=getattr(args, "verbose", False))
        if RICH_AVAILABLE:
            self.console = Console()

        self.logger.info(f"Pipeline initialized. Command: {args.command}, output: {self.out}")

    def _print_header(self) -> None:
        """Print run startup header."""
        p = self.config.problem
        if RICH_AVAILABLE:
            header = Text()
            header.append("Kikuchi Spectral Pipeline\n", style="bold blue")
            header.append(f"Command: {self.args.command}\n")
            header.append(f"Seed: {self.config.seed}  Threads: {self.config.threads}\n")
            header.append(f"Problem: n={p.n}, k={p.k}, ell={p.ell}, rho={p.rho}", style="dim")
            self.console.print(Panel(header, title="Starting Run"))
        else:
            print("=" * 60)
            print("Kikuchi Spectral Pipeline")
            print("=" * 60)
            print(f"Command: {self.args.command}")
            print(f"Seed: {self.config.seed}  Threads: {self.config.threads}")
            print("-" * 60)

    def _print_table(self, title: str, columns: List[str], rows: List[List[Any]]) -> None:
        if RICH_AVAILABLE:
            table = Table(title=title)
            for col in columns:
                table.add_column(col)
            for row in rows:
                table.add_row(*[str(v) for v in row])
            self.console.print(table)
        else:
            print(title)
            print(" | ".join(columns))
            for row in rows:
                print(" | ".join(str(v) for v in row))

    def _write_json(self, name: str, doc: Dict[str, Any]) -> Path:
        path = self.out / name
        doc = dict(doc, config=self.header)
        path.write_text(json.dumps(doc, indent=2, default=str))
        self.logger.info(f"Wrote {path}")
        return path

    def run(self) -> int:
        self._print_header()
        handler = {
            "sample": self.cmd_sample,
            "detect": self.cmd_detect,
            "recover": self.cmd_recover,
            "fig2": self.cmd_fig2,
            "estimate": self.cmd_estimate,
            "verify-circuits": self.cmd_verify_circuits,
            "bench": self.cmd_bench,
        }[self.args.command]
        start = time.time()
        code = handler()
        self.summary["elapsed_seconds"] = time.time() - start
        self.summary["exit_code"] = code
        return code

    # ------------------------------------------------------------------
    # sample
    # ------------------------------------------------------------------

    def cmd_sample(self) -> int:
        p = self.config.problem
        params = p.to_params(seed=self.config.seed)
        random_null = getattr(self.args, "random", False)
        full = getattr(self.args, "full", False)

        if p.setting == Setting.ASYMMETRIC:
            if random_null:
                params = ProblemParams(n=params.n, k=params.k, ell=params.ell, m_target=params.m_target,
                                       rho=0.0, seed=params.seed)
            sample, spike = sample_asymmetric_planted(params)
            t = symmetric_embed(sample)
            save_tensor(sample, self.out / "ordered_tensor.txt", self.header)
            save_spike(spike, self.out / "spike.json", self.header)
        elif random_null:
            t, spike = sample_random(params, simple_signs=p.simple_signs), None
        elif full:
            full_t, spike = sample_full_planted(params)
            t = distinct_part(full_t)
            save_tensor(full_t, self.out / "full_tensor.txt", self.header)
            save_spike(spike, self.out / "spike.json", self.header)
        else:
            t, spike = sample_planted(params, simple_signs=p.simple_signs)
            save_spike(spike, self.out / "spike.json", self.header)

        path = save_tensor(t, self.out / "tensor.txt", self.header)
        self.summary.update({"tensor": str(path), "entries": t.m, "mass": t.total_mass})
        self.logger.info(f"Sampled {t.m} entries (mass {t.total_mass}) -> {path}")
        return EXIT_OK

    # ------------------------------------------------------------------
    # detect
    # ------------------------------------------------------------------

    def _load_symmetric(self, path: Path) -> SparseSignedTensor:
        t = load_tensor(path)
        if isinstance(t, AsymmetricTensorSample):
            self.logger.info("Ordered tensor given; using its symmetric embedding")
            t = symmetric_embed(t)
        return t

    def cmd_detect(self) -> int:
        t = self._load_symmetric(self.args.tensor)
        s = self.config.spectral
        cert = detect(t, self.config.problem.ell, rho=self.config.problem.rho, gamma=s.gamma,
                      kappa=s.kappa, eps_prob=s.eps_prob, m=self.config.problem.m, seed=self.config.seed,
                      tol=s.tol, method=s.method.value)
        self._write_json("certificate.json", cert.to_dict())
        self._print_table("Detection", ["lambda_hat", "lambda*", "random bound", "verdict"],
                          [[f"{cert.lambda_hat:.4f}", f"{cert.lambda_star:.4f}",
                            f"{cert.random_bound:.4f}", cert.verdict.value]])
        self.summary["verdict"] = cert.verdict.value
        return EXIT_INCONCLUSIVE if cert.verdict is Verdict.INCONCLUSIVE else EXIT_OK

    # ------------------------------------------------------------------
    # recover
    # ------------------------------------------------------------------

    def cmd_recover(self) -> int:
        t = self._load_symmetric(self.args.tensor)
        spike = load_spike(self.args.spike) if self.args.spike else None
        full = load_tensor(self.args.full_tensor) if self.args.full_tensor else None
        if full is not None and not isinstance(full, AsymmetricTensorSample):
            raise ValueError(f"{self.args.full_tensor}: boosting needs an ordered tensor file")
        strategy = self.args.strategy or self.config.grid.strategy.value
        top = self.args.top or 1
        result = recover(t, self.config.problem.ell, seed=self.config.seed, strategy=strategy,
                         spike=spike, top=top, full_tensor=full)
        self._write_json("recovery.json", result.to_dict())
        corr = "n/a" if result.correlation is None else f"{result.correlation:.4f}"
        weak = result.metadata.get("weak_correlation")
        self._print_table("Recovery", ["strategy", "boosted", "weak corr", "corr"],
                          [[result.strategy, result.boosted,
                            "n/a" if weak is None else f"{weak:.4f}", corr]])
        self.summary["correlation"] = result.correlation
        return EXIT_OK

    # ------------------------------------------------------------------
    # fig2
    # ------------------------------------------------------------------

    def cmd_fig2(self) -> int:
        g = self.config.grid
        result = fig2_experiment(g.setting, rhos=g.rhos, fractions=g.fractions_resolved, trials=g.trials,
                                 n=g.n, k=g.k, ell=g.ell, seed=self.config.seed,
                                 workers=self.config.threads, strategy=g.strategy, top=g.top,
                                 progress=True)
        result.config["run"] = self.header
        name = f"fig2_{g.setting.value}"
        result.write_csv(self.out / f"{name}.csv")
        result.write_json(self.out / f"{name}.json")

        pivot = result.table.pivot(index="rho", columns="obs_fraction", values="mean_corr")
        self._print_table(f"Mean correlation ({g.setting.value})", ["rho"] + [f"{f:g}" for f in pivot.columns],
                          [[f"{rho:g}"] + [f"{v:.3f}" for v in row] for rho, row in pivot.iterrows()])
        for issue in monotonicity_violations(result.table):
            self.logger.warning(f"Non-monotone cell: {issue}")
        self.summary["cells"] = len(result.table)
        return EXIT_OK

    # ------------------------------------------------------------------
    # estimate
    # ------------------------------------------------------------------

    def cmd_estimate(self) -> int:
        cfg = self.config.estimator
        if self.args.table1:
            table = emit_table1(config=cfg)
            write_table1(table, self.out / "table1.csv", config=self.header)
            (self.out / "table1.md").write_text(table_markdown(table))
            ratios = compare_to_reference(table)
            self.logger.info(f"Ratios to the reference rows:\n{ratios.to_string(index=False)}")
            self._print_table("Resource estimates", list(table.columns),
                              [[f"{v:.4g}" if isinstance(v, float) else v for v in row]
                               for row in table.itertuples(index=False)])
            self.summary["rows"] = len(table)
            return EXIT_OK

        report = estimate(cfg)
        self._write_json("resources.json", report.to_dict())
        (self.out / "resources.md").write_text(report.to_markdown())
        for flag in report.flags:
            self.logger.warning(f"Reference discrepancy: {flag}")
        if RICH_AVAILABLE:
            self.console.print(report.to_markdown())
        else:
            print(report.to_markdown())
        self.summary["total_gates"] = report.total_gates
        return EXIT_OK

    # ------------------------------------------------------------------
    # verify-circuits
    # ------------------------------------------------------------------

    def _tiny_instance(self, n: int, k: int, m: int, seed: int, need_pair: bool = False,
                       ell: int = 0) -> SparseSignedTensor:
        """Distinct +/-1 clauses; resampled until a disjoint c-tuple exists when need_pair."""
        for attempt in range(20):
            params = ProblemParams(n=n, k=k, ell=max(ell, k // 2), m_target=m, rho=1.0, seed=seed + attempt)
            t, _ = sample_planted(params, simple_signs=True)
            if not need_pair:
                return t
            sets = [set(S) for S in t.subsets.tolist()]
            if any(not (a & b) for i, a in enumerate(sets) for b in sets[i + 1:]):
                return t
        raise DegenerateInputError(f"no instance with disjoint clauses at n={n}, k={k}, m={m}")

    def cmd_verify_circuits(self) -> int:
        cc = self.config.circuits
        tol = cc.tolerance
        checks: List[Dict[str, Any]] = []

        def record(name: str, passed: bool, **detail) -> None:
            checks.append({"check": name, "passed": bool(passed), **detail})
            level = logging.INFO if passed else logging.ERROR
            self.logger.log(level, f"{name}: {'pass' if passed else 'FAIL'} {detail}")

        for l in cc.dicke_count_l:
            report = count(dicke_prep(l))
            cost = report.toffoli_count + 2 * report.ch_count
            record(f"dicke_count l={l}", cost == dicke_resources(l), cost=cost, expected=2 ** l + l - 1)
        for l in cc.dicke_l:
            d = dicke_conditions(l)
            record(f"dicke_conditions l={l}", d.passed, zero=d.zero_deviation, d1=d.d1_deviation,
                   leakage=d.leakage)
        for c in cc.shuffle_c:
            s = shuffle_check(c)
            record(f"one_hot_shuffle c={c}", s.passed, weight1=s.weight1_probs, leakage=s.leakage)

        if not self.args.counts_only:
            pg = p_gadget()
            record("weight_check k=4", (pg.toffoli_count, pg.depth) == (45, 13),
                   toffoli=pg.toffoli_count, depth=pg.depth)
            _, term = per_term_circuit()
            record("per_term_oracle k=4", (term.toffoli_count, term.depth) == (210, 60),
                   toffoli=term.toffoli_count, depth=term.depth)

            for n, k, ell, m in cc.oracle_instances:
                t = self._tiny_instance(n, k, m, self.config.seed, ell=ell)
                be = block_encoding_check(t, ell)
                record(f"block_encoding n={n} k={k} ell={ell}", be.max_deviation <= tol,
                       max_deviation=be.max_deviation, qubits=be.qubits)

            n, k, ell, m = cc.guiding_instance
            t = self._tiny_instance(n, k, m, self.config.seed, need_pair=True, ell=ell)
            gp = guiding_prep_check(t, ell)
            record(f"guiding_prep n={n} k={k} ell={ell}",
                   gp.prob_deviation <= tol and gp.state_deviation <= tol,
                   success_prob=gp.success_prob, expected=gp.expected_prob)

            phases = (load_phases(self.args.phases) if self.args.phases
                      else random_phases(cc.qsp_phases, seed=self.config.seed))
            sweep = qsp_error_sweep(phases)
            record(f"qsp_rounding d={len(phases)}", sweep.within_bound and abs(sweep.slope - 1) <= 0.1,
                   slope=sweep.slope, deviations=sweep.deviations)

        self._write_json("circuit_checks.json", {"checks": checks,
                                                 "passed": all(c["passed"] for c in checks)})
        self._print_table("Circuit checks", ["check", "result"],
                          [[c["check"], "pass" if c["passed"] else "FAIL"] for c in checks])
        failed = [c["check"] for c in checks if not c["passed"]]
        self.summary["checks"] = len(checks)
        self.summary["failed"] = failed
        return EXIT_ERROR if failed else EXIT_OK

    # ------------------------------------------------------------------
    # bench
    # ------------------------------------------------------------------

    def cmd_bench(self) -> int:
        p = self.config.problem
        params = p.to_params(seed=self.config.seed)
        t, _ = sample_planted(params, simple_signs=p.simple_signs)
        repeats = self.args.repeats
        rows = []
        for mode in ("explicit", "implicit"):
            try:
                op = build(t, p.ell, mode=mode, workers=self.config.threads)
            except DimensionCapError as e:
                self.logger.warning(f"{mode} operator skipped: {e}")
                continue
            x = make_rng(self.config.seed, "bench").standard_normal(op.dim)
            matvec(op, x)
            start = time.perf_counter()
            for _ in tqdm(range(repeats), desc=f"{mode} matvec", leave=False):
                matvec(op, x)
            per_call = (time.perf_counter() - start) / repeats
            nnz = int(op.column_sparsity.sum())
            rows.append({"mode": op.mode, "dim": op.dim, "nnz": nnz, "d_max": op.d_max,
                         "seconds_per_matvec": per_call,
                         "flops_per_second": 2 * nnz / per_call if per_call > 0 else float("nan")})

        model = classical_flops(p.n, p.k, p.ell, p.m_resolved, model=self.config.estimator.flops_model,
                                rho=p.rho if p.rho > 0 else 1.0)
        doc: Dict[str, Any] = {"matvec": rows, "model_flops": model.flops, "model_edges": model.edges,
                               "model_iters": model.iters, "flops_model": model.model}
        if rows:
            measured_edges = rows[0]["nnz"] / 2
            doc["edge_ratio"] = measured_edges / model.edges if model.edges else float("nan")
            doc["projected_seconds"] = model.flops / max(r["flops_per_second"] for r in rows)
        self._write_json("bench.json", doc)
        self._print_table("Matvec timing", ["mode", "dim", "nnz", "s/matvec"],
                          [[r["mode"], r["dim"], r["nnz"], f"{r['seconds_per_matvec']:.3e}"] for r in rows])
        self.logger.info(f"FLOPs model ({model.model}): {model.flops:.3e} over {model.iters:.1f} iterations")
        self.summary["modes"] = [r["mode"] for r in rows]
        return EXIT_OK


# ============================================================================
# CLI
# ============================================================================

class PipelineArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with EXIT_ERROR, not argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    """Create argument parser for CLI."""
    common = argparse.ArgumentParser(add_help=False)
    run_group = common.add_argument_group("Run")
    run_group.add_argument("--seed", type=int, default=None, help="Master seed (default: 0)")
    run_group.add_argument("--threads", type=int, default=None,
                           help="Worker threads (default: $TENSORPCA_THREADS or 1)")
    run_group.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    run_group.add_argument("--out", type=Path, default=None, help="Output directory (default: output)")
    run_group.add_argument("--verbose", "-v", action="store_true", help="Debug logging on the console")

    problem = argparse.ArgumentParser(add_help=False)
    p_group = problem.add_argument_group("Problem")
    p_group.add_argument("--n", type=int, default=None, help="Variables (block size when asymmetric)")
    p_group.add_argument("--k", type=int, default=None, help="Tensor order, even")
    p_group.add_argument("--ell", type=int, default=None, help="Kikuchi level")
    p_group.add_argument("--m", type=float, default=None, help="Expected observations (default: 10 n^2 ln n)")
    p_group.add_argument("--rho", type=float, default=None, help="Planted advantage 1 - 2 eta")

    spectral = argparse.ArgumentParser(add_help=False)
    s_group = spectral.add_argument_group("Eigensolver")
    s_group.add_argument("--tol", type=float, default=None, help="Eigensolver tolerance")
    s_group.add_argument("--method", choices=["auto", "lanczos", "power", "dense"], default=None)

    parser = PipelineArgumentParser(
        description="Kikuchi spectral method for planted kXOR / spiked tensor PCA",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Sample and detect
  python run_pipeline.py sample --n 12 --ell 4 --out output/run1
  python run_pipeline.py detect --tensor output/run1/tensor.txt --ell 4 --out output/run1

  # Recovery grid on 4 threads
  python run_pipeline.py fig2 --setting symmetric --trials 30 --threads 4

  # Resource estimates
  python run_pipeline.py estimate --n 100
  python run_pipeline.py estimate --table1

  # Circuit checks at tiny sizes
  python run_pipeline.py verify-circuits --dicke-l 2

Exit codes: 0 success, 2 inconclusive detection, 1 error, 130 interrupted.
        """
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command",
                                parser_class=PipelineArgumentParser)

    sp = sub.add_parser("sample", parents=[common, problem], help="Draw an instance")
    sp.add_argument("--setting", choices=[s.value for s in Setting], default=None)
    sp.add_argument("--simple-signs", action="store_true", help="Distinct subsets with +/-1 signs")
    sp.add_argument("--random", action="store_true", help="Null instance (rho = 0)")
    sp.add_argument("--full", action="store_true", help="Also write the full ordered tensor T'")

    sp = sub.add_parser("detect", parents=[common, problem, spectral], help="Planted vs random")
    sp.add_argument("--tensor", type=Path, required=True, help="Tensor file (.txt or .json)")

    sp = sub.add_parser("recover", parents=[common, problem, spectral], help="Recover the spike")
    sp.add_argument("--tensor", type=Path, required=True, help="Tensor file (.txt or .json)")
    sp.add_argument("--spike", type=Path, default=None, help="Spike JSON for the correlation")
    sp.add_argument("--full-tensor", type=Path, default=None, help="Ordered tensor T' for boosting")
    sp.add_argument("--strategy", choices=["gaussian_1rdm", "top_eigvec"], default=None)
    sp.add_argument("--top", type=int, default=None, help="Eigenvectors combined (default: 1)")

    sp = sub.add_parser("fig2", parents=[common], help="Recovery correlation grid")
    g_group = sp.add_argument_group("Grid")
    g_group.add_argument("--setting", choices=[s.value for s in Setting], default=None)
    g_group.add_argument("--n", type=int, default=None)
    g_group.add_argument("--k", type=int, default=None)
    g_group.add_argument("--ell", type=int, default=None)
    g_group.add_argument("--rhos", type=_floats, default=None, help="Comma-separated rho values")
    g_group.add_argument("--fractions", type=_floats, default=None, help="Comma-separated observation fractions")
    g_group.add_argument("--trials", type=int, default=None)
    g_group.add_argument("--strategy", choices=["gaussian_1rdm", "top_eigvec"], default=None)
    g_group.add_argument("--top", type=int, default=None)

    sp = sub.add_parser("estimate", parents=[common, problem], help="Quantum resource estimates")
    sp.add_argument("--table1", action="store_true", help="Four-row table for n = 60/80/100/120")
    sp.add_argument("--q-qsp", type=int, default=None, help="QSP sequence length")
    sp.add_argument("--flops-model", choices=["calibrated", "gap"], default=None)

    sp = sub.add_parser("verify-circuits", parents=[common], help="Simulate gadgets and oracles")
    sp.add_argument("--dicke-l", type=_ints, default=None, help="Comma-separated Dicke sizes")
    sp.add_argument("--shuffle-c", type=_ints, default=None, help="Comma-separated shuffle widths")
    sp.add_argument("--qsp-phases", type=int, default=None, help="Random phase count")
    sp.add_argument("--phases", type=Path, default=None, help="Phase file (JSON array)")
    sp.add_argument("--counts-only", action="store_true", help="Dicke and shuffle checks only")

    sp = sub.add_parser("bench", parents=[common, problem], help="Classical matvec timing")
    sp.add_argument("--repeats", type=int, default=20)
    sp.add_argument("--simple-signs", action="store_true")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help exits 0; usage errors exit EXIT_ERROR
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    try:
        config = load_run_config(args)
        runner = PipelineRunner(config, args)
        code = runner.run()
        summary = runner.summary

        # Print final summary
        print("\n" + "=" * 60)
        print("PIPELINE COMPLETE" if code == EXIT_OK else "PIPELINE FINISHED")
        print("=" * 60)
        print(f"Command: {summary['command']}")
        print(f"Elapsed: {summary.get('elapsed_seconds', 0):.1f} seconds")
        for key, value in summary.items():
            if key not in ("command", "elapsed_seconds", "exit_code", "output_dir"):
                print(f"{key}: {value}")
        print(f"Output directory: {summary['output_dir']}")
        print("=" * 60)
        return code

    except KeyboardInterrupt:
        print("\n\nPipeline interrupted by user")
        return EXIT_INTERRUPTED
    except (TensorPCAError, ValueError, OSError) as e:
        print(f"\nPipeline failed: {e}")
        return EXIT_ERROR
    except Exception as e:
        print(f"\nPipeline failed: {e}")
        import traceback
        traceback.print_exc()
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
