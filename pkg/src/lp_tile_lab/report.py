"""CSV and JSON reports of experiment results."""
import json
import math
import platform
from dataclasses import dataclass
from dataclasses import field
from importlib import metadata
from importlib import resources
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Optional
from typing import Sequence

import numpy as np
import scipy

from lp_tile_lab.config import ExperimentConfig
from lp_tile_lab.fileutils import csv_bytes
from lp_tile_lab.fileutils import sha256sum
from lp_tile_lab.fileutils import write_atomic


Scalar = float | int | str | bool | None
Writer = Callable[[Path], None]


@dataclass
class ExperimentResult:
    """Table and summary produced by one experiment.

    ``artifacts`` maps a file suffix to a writer; each is written next to the
    report as ``<experiment>.<suffix>``.
    """

    name: str
    columns: tuple[str, ...]
    rows: list[Sequence[Any]] = field(default_factory=list)
    summary: dict[str, Scalar] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    artifacts: dict[str, Writer] = field(default_factory=dict)

    def add(self, *row: Any) -> None:
        """Append one table row."""
        self.rows.append(row)

    def attach(self, suffix: str, writer: Writer) -> None:
        """Register WRITER for ``<experiment>.<suffix>``."""
        self.artifacts[suffix] = writer

    def check(self, condition: bool, message: str) -> None:
        """Record ``message`` as a failure unless ``condition`` holds."""
        if not condition:
            self.failures.append(message)


def versions() -> dict[str, str]:
    """Versions of the package, numpy, scipy and the interpreter."""
    try:
        own = metadata.version("lp-tile-lab")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {
        "lp_tile_lab": own,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _plain(value: Any) -> Any:
    """JSON-ready value: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def load_schema() -> dict[str, Any]:
    """The JSON schema every report validates against."""
    text = resources.files("lp_tile_lab").joinpath("report.schema.json").read_text("utf-8")
    schema: dict[str, Any] = json.loads(text)
    return schema


def emit_report(
    result: ExperimentResult,
    config: ExperimentConfig,
    out_dir: Path,
    wall_time: Optional[float],
    log: Callable[[str], None],
) -> tuple[Path, Path]:
    """Write ``<experiment>.csv``, ``<experiment>.json`` and the artifacts to OUT_DIR.

    ``wall_time_s`` is recorded only when WALL_TIME is given. Without it a rerun
    with the same configuration and seed writes identical bytes.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{result.name}.csv"
    json_path = out_dir / f"{result.name}.json"
    write_atomic(csv_path, csv_bytes(result.columns, result.rows))
    artifacts = {}
    for suffix, writer in sorted(result.artifacts.items()):
        path = out_dir / f"{result.name}.{suffix}"
        writer(path)
        artifacts[path.name] = sha256sum(path)
        log(f"wrote '{path}'")
    document: dict[str, Any] = {
        "experiment": result.name,
        "seed": config.seed,
        "n": config.used.get("n"),
        "config": config.used,
        "versions": versions(),
        "summary": result.summary,
        "failures": result.failures,
        "columns": list(result.columns),
        "csv_sha256": sha256sum(csv_path),
        "artifacts": artifacts,
    }
    if wall_time is not None:
        document["wall_time_s"] = wall_time
    text = json.dumps(_plain(document), sort_keys=True, indent=2, allow_nan=False) + "\n"
    write_atomic(json_path, text.encode("utf-8"))
    log(f"wrote '{csv_path}'")
    log(f"wrote '{json_path}'")
    return csv_path, json_path
