"""Deterministic CSV + manifest emission.

Every CSV carries a `# schema=<tag> v<version>` header comment and gets a
sibling `<name>.manifest.json` with the config hash, code version, grid and
quadrature diagnostics, and wall-clock. CSV bytes are reproducible: fixed
field order, floats through repr-faithful %.17g, no timestamps. Wall-clock
lives only in the manifest (explicitly excluded from byte-identity checks).
"""

from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence

from . import __version__


def fmt(x) -> str:
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, complex):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: Path, schema: str, header: Sequence[str],
              rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# schema={schema}", ",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_manifest(csv_path: Path, config_hash: str, schema: str,
                   diagnostics: Optional[Dict] = None,
                   wall_clock: Optional[float] = None) -> Path:
    csv_path = Path(csv_path)
    man = {
        "config_hash": config_hash,
        "schema": schema,
        "code_version": __version__,
        "diagnostics": diagnostics or {},
        "wall_clock_s": wall_clock if wall_clock is not None else time.time(),
    }
    path = csv_path.with_suffix(".manifest.json")
    path.write_text(json.dumps(man, sort_keys=True, indent=1, default=str) + "\n")
    return path


def read_csv(path: Path):
    """(schema, header, rows-as-strings); refuses unmanifested data."""
    path = Path(path)
    man = path.with_suffix(".manifest.json")
    if not man.exists():
        raise FileNotFoundError(f"refusing unmanifested CSV: {path} (no {man.name})")
    lines = path.read_text().strip().splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError(f"{path}: missing schema header")
    schema = lines[0].split("=", 1)[1]
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return schema, header, rows
