#!/usr/bin/env python3
"""Render figures from emitted CSV/JSON artifacts: `render.py --job <json>`.

A job file names the inputs and the figure kind:

    {"kind": "interference_scan",
     "csv": "out/demos/interference_scan.csv",
     "out": "out/figures/scan.png"}

Rules (validation before rendering, in that order):
  * the CSV must have a sibling `.manifest.json` — unmanifested data is refused;
  * the CSV schema tag must match the figure kind's registry entry;
  * an empty CSV renders an empty-axes figure with a warning annotation.

This package is a pure consumer: it never recomputes physics; every number
comes from the CSV.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from kinds import REGISTRY  # noqa: E402


@dataclass(frozen=True)
class PlotJob:
    kind: str
    csv: str
    out: str
    manifest: Optional[str] = None

    @classmethod
    def from_file(cls, path: str) -> "PlotJob":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - {"kind", "csv", "out", "manifest"}
        if unknown:
            raise ValueError(f"unknown job keys: {sorted(unknown)}")
        for key in ("kind", "csv", "out"):
            if key not in data:
                raise ValueError(f"job file missing required key {key!r}")
        return cls(**data)


def load_csv(path: Path, manifest: Optional[str] = None):
    """(schema, header, float-rows); refuses unmanifested inputs."""
    man = Path(manifest) if manifest else path.with_suffix(".manifest.json")
    if not man.exists():
        raise FileNotFoundError(f"refusing unmanifested CSV {path} (expected {man})")
    json.loads(man.read_text())   # must at least parse
    lines = path.read_text().strip().splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError(f"{path}: missing '# schema=' header")
    schema = lines[0].split("=", 1)[1]
    header = lines[1].split(",") if len(lines) > 1 else []
    rows = []
    for ln in lines[2:]:
        rows.append([_cell(v) for v in ln.split(",")])
    return schema, header, rows


def _cell(v: str):
    try:
        return float(v)
    except ValueError:
        return v


def render(job: PlotJob) -> Path:
    if job.kind not in REGISTRY:
        raise ValueError(f"unknown figure kind {job.kind!r}; "
                         f"known: {sorted(REGISTRY)}")
    entry = REGISTRY[job.kind]
    schema, header, rows = load_csv(Path(job.csv), job.manifest)
    if schema not in entry.schemas:
        raise ValueError(f"schema mismatch: {job.kind} expects one of "
                         f"{sorted(entry.schemas)}, CSV carries {schema!r}")
    fig, ax = plt.subplots(figsize=(7.2, 4.6))
    if not rows:
        ax.text(0.5, 0.5, f"empty CSV: {Path(job.csv).name}", ha="center",
                va="center", transform=ax.transAxes, color="crimson")
        ax.set_title(f"{job.kind} (no data)")
    else:
        entry.fn(ax, header, rows)
    out = Path(job.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)
    return out


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--job", required=True, help="JSON job file")
    args = ap.parse_args(argv)
    try:
        out = render(PlotJob.from_file(args.job))
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
