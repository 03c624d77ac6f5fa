"""
Generate HTML report from pipeline outputs (recovery grids, resource table, circuit checks).
"""

import json
import argparse
from pathlib import Path
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from jinja2 import Environment, FileSystemLoader

from tensorpca.resources import compare_to_reference


def load_csv(csv_path: Path) -> Tuple[pd.DataFrame, Dict[str, Any]]:
    """Load a pipeline CSV and the config from its `# config:` header line."""
    config: Dict[str, Any] = {}
    with open(csv_path) as f:
        first = f.readline()
    if first.startswith("# config:"):
        config = json.loads(first[len("# config:"):])
    return pd.read_csv(csv_path, comment="#"), config


def score_class(corr: float) -> str:
    if corr >= 0.9:
        return "score-high"
    if corr >= 0.5:
        return "score-medium"
    return "score-low"


def load_grid(csv_path: Path) -> Dict[str, Any]:
    """Pivot a recovery grid into rho rows and observation-fraction columns."""
    table, config = load_csv(csv_path)
    pivot = table.pivot(index="rho", columns="obs_fraction", values="mean_corr")
    rows = []
    for rho, values in pivot.iterrows():
        rows.append({
            'rho': f"{rho:g}",
            'cells': [{'value': f"{v:.3f}", 'cls': score_class(v)} for v in values],
        })
    best = float(table['mean_corr'].max()) if len(table) else 0.0
    return {
        'setting': table['setting'].iloc[0] if len(table) else config.get('setting', ''),
        'fractions': [f"{f:g}" for f in pivot.columns],
        'rows': rows,
        'trials': int(table['trials'].max()) if len(table) else 0,
        'best': f"{best:.3f}",
        'n': config.get('n'),
        'ell': config.get('ell'),
    }


def load_table1(csv_path: Path) -> Dict[str, Any]:
    """Resource rows with their ratios to the reference estimates."""
    table, _ = load_csv(csv_path)
    ratios = compare_to_reference(table)
    fmt = lambda v: f"{v:.4g}" if isinstance(v, float) else str(v)
    return {
        'columns': list(table.columns),
        'rows': [[fmt(v) for v in row] for row in table.itertuples(index=False)],
        'ratio_columns': list(ratios.columns),
        'ratios': [[fmt(v) for v in row] for row in ratios.itertuples(index=False)],
    }


def load_json(path: Path) -> Optional[Dict[str, Any]]:
    return json.loads(path.read_text()) if path.exists() else None


def generate_report(
    results_dir: str,
    output_path: str,
    title: str = "Kikuchi Spectral Method",
):
    """Generate HTML report from the CSV and JSON files in a pipeline output directory."""
    results = Path(results_dir)

    # Load results
    grids = [load_grid(p) for p in sorted(results.glob("fig2_*.csv"))]
    table1 = load_table1(results / "table1.csv") if (results / "table1.csv").exists() else None
    checks = load_json(results / "circuit_checks.json")
    certificate = load_json(results / "certificate.json")
    if not (grids or table1 or checks or certificate):
        raise FileNotFoundError(f"no pipeline outputs found in {results}")

    # Load template
    template_dir = Path(__file__).parent
    env = Environment(loader=FileSystemLoader(template_dir), autoescape=True)
    template = env.get_template('report_template.html')

    # Render
    html = template.render(
        report_date=datetime.now().strftime("%Y-%m-%d %H:%M"),
        title=title,
        results_dir=str(results),
        grids=grids,
        table1=table1,
        checks=checks,
        certificate=certificate,
    )

    # Write output
    output_file = Path(output_path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    output_file.write_text(html, encoding='utf-8')

    print(f"Report generated: {output_file}")
    print(f"\nSummary:")
    for grid in grids:
        print(f"  Recovery grid ({grid['setting']}): best mean correlation {grid['best']}")
    if table1:
        print(f"  Resource table:  {len(table1['rows'])} rows")
    if checks:
        passed = sum(1 for c in checks['checks'] if c['passed'])
        print(f"  Circuit checks:  {passed}/{len(checks['checks'])} passed")
    if certificate:
        print(f"  Detection:       {certificate['verdict']}")

    return output_file


def main():
    parser = argparse.ArgumentParser(description='Generate HTML report from pipeline outputs')
    parser.add_argument('--results', '-r', default='output', help='Pipeline output directory')
    parser.add_argument('--out', '-o', default='output/report.html', help='Output HTML path')
    parser.add_argument('--title', default='Kikuchi Spectral Method', help='Report title')

    args = parser.parse_args()

    generate_report(
        results_dir=args.results,
        output_path=args.out,
        title=args.title,
    )


if __name__ == '__main__':
    main()
