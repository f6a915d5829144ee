#!/usr/bin/env python3
"""
recompute_report.py

Version: 1.0.0

Rebuilds the report.csv of an eval run from its results.jsonl and the unit
catalog. Imports nothing from the app package; reads only the raw episode
lines and catalog.json.

Typical usage:
    ./recompute_report.py runs/eval            # print the recomputed CSV
    ./recompute_report.py runs/eval --check    # exit 1 if report.csv differs
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

__version__ = "1.0.0"

DEFAULT_CATALOG = Path(__file__).resolve().parent.parent / "app" / "assets" / "catalog.json"

COLUMNS = [
    "mode",
    "difficulty",
    "episodes",
    "wins",
    "draws",
    "losses",
    "win_rate",
    "mean_advanced_units",
    "mean_total_units",
    "advanced_ratio",
    "production_empty",
]


def load_results(path: Path) -> List[Dict[str, Any]]:
    """Eine JSON-Zeile pro Episode, Leerzeilen werden übersprungen."""
    text = path.read_text(encoding="utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def army_tiers(catalog_path: Path) -> Dict[str, str]:
    """Name -> Tier aller Armee-Einheiten in Katalog-Reihenfolge, ohne Arbeiter."""
    catalog = json.loads(catalog_path.read_text(encoding="utf-8"))
    return {u["name"]: u["tier"] for u in catalog["units"] if not u.get("is_worker", False)}


def _fmt(value: Fraction) -> str:
    return f"{float(value):.2f}"


def recompute(results: List[Dict[str, Any]], tiers: Dict[str, str]) -> str:
    cells: Dict[Tuple[str, int], List[Dict[str, Any]]] = {}
    for result in results:
        cells.setdefault((result["mode"], result["difficulty"]), []).append(result)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COLUMNS + [f"share_{name}" for name in tiers])
    for (mode, difficulty), cell in sorted(cells.items()):
        n = len(cell)
        outcomes = [r["outcome"] for r in cell]
        wins = outcomes.count("win")

        per_type = {name: 0 for name in tiers}
        for result in cell:
            for name, count in result.get("early_production", {}).items():
                if name in per_type:
                    per_type[name] += count
        total = sum(per_type.values())
        advanced = sum(c for name, c in per_type.items() if tiers[name] == "advanced")

        def share(count: int) -> Fraction:
            return Fraction(count * 100, total) if total else Fraction(0)

        writer.writerow(
            [
                mode,
                difficulty,
                n,
                wins,
                outcomes.count("draw"),
                outcomes.count("loss"),
                _fmt(Fraction(wins * 100, n)),
                _fmt(Fraction(advanced, n)),
                _fmt(Fraction(total, n)),
                _fmt(share(advanced)),
                int(total == 0),
            ]
            + [_fmt(share(count)) for count in per_type.values()]
        )
    return buffer.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Recompute report.csv from results.jsonl")
    parser.add_argument("run_dir", type=Path, help="Output directory of an eval run")
    parser.add_argument("--catalog", type=Path, default=DEFAULT_CATALOG)
    parser.add_argument(
        "--check", action="store_true", help="Compare with run_dir/report.csv instead of printing"
    )
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    csv_text = recompute(load_results(args.run_dir / "results.jsonl"), army_tiers(args.catalog))
    if not args.check:
        sys.stdout.write(csv_text)
        return 0

    stored = (args.run_dir / "report.csv").read_text(encoding="utf-8")
    if stored != csv_text:
        print("report.csv differs from the recomputed report", file=sys.stderr)
        return 1
    print("report.csv matches results.jsonl")
    return 0


if __name__ == "__main__":
    sys.exit(main())
