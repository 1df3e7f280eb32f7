"""
Execute a RunSpec: sweeps, the coincidence report and the output files.
"""

import json
import logging
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from geotherm import __version__
from geotherm.app.analysis import SweepSeries, ThermoGeometry, coincidence_report, sweep, sweep_grid
from geotherm.app.config import build_model
from geotherm.app.errors import (
    DegenerateMetric,
    DivisionByZeroExpression,
    DomainError,
    ExpressionBlowup,
    NonPositiveBase,
)
from geotherm.app.schemas import COLUMN_NAMES, QUANTITIES, RunSpec, TransitionReport
from geotherm.app.settings import get_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VERDICT = 3
EXIT_INTERRUPTED = 130

CSV_COLUMNS = ["x"] + [COLUMN_NAMES[q] for q in QUANTITIES] + ["pole_flags"]
NUMERIC_ERRORS = (ExpressionBlowup, DegenerateMetric, DivisionByZeroExpression, DomainError, NonPositiveBase)


@dataclass
class RunResult:
    exit_code: int
    output_dir: Optional[Path] = None
    report: Optional[TransitionReport] = None
    frame: Optional[pd.DataFrame] = None
    files: List[Path] = field(default_factory=list)
    message: str = ""


def thread_count(jobs: int) -> int:
    limit = get_settings().THREADS
    cpus = os.cpu_count() or 1
    return max(1, min(jobs, limit if limit is not None else cpus))


def compute_series(spec: RunSpec, geometry: ThermoGeometry) -> Dict[str, SweepSeries]:
    """Sweep every requested quantity; sweeps run concurrently on a thread pool"""
    sweep_spec = spec.sweep_spec()
    quantities = spec.analysis.quantities
    n_jobs = thread_count(len(quantities))
    logger.info(f"Sweeping {', '.join(quantities)} on {n_jobs} thread(s)")
    results = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(sweep)(geometry.model, q, sweep_spec, spec.tolerances, geometry) for q in quantities
    )
    return dict(zip(quantities, results))


def build_frame(x: np.ndarray, series: Dict[str, SweepSeries]) -> pd.DataFrame:
    data = {"x": x}
    flags = [[] for _ in range(len(x))]
    for q in QUANTITIES:
        s = series.get(q)
        column = COLUMN_NAMES[q]
        if s is None or not s.defined:
            data[column] = np.full(len(x), np.nan)
            continue
        data[column] = s.values
        for j in np.flatnonzero(s.flags):
            flags[j].append(column)
    data["pole_flags"] = [";".join(f) for f in flags]
    return pd.DataFrame(data, columns=CSV_COLUMNS)


def write_outputs(directory: Path, frame: pd.DataFrame, report: TransitionReport, manifest: dict) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / "sweep.csv"
    report_path = directory / "report.json"
    manifest_path = directory / "manifest.json"

    frame.to_csv(csv_path, index=False, float_format="%.16e", na_rep="", lineterminator="\n")
    report_path.write_text(json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n")
    manifest["files"] = [p.name for p in (csv_path, report_path, manifest_path)]
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    logger.info(f"Wrote {csv_path}, {report_path.name}, {manifest_path.name}")
    return [csv_path, report_path, manifest_path]


def run(spec: RunSpec, output_dir: Optional[str] = None) -> RunResult:
    """
    Run sweeps and the coincidence report, then write sweep.csv, report.json
    and manifest.json.

    Returns:
        RunResult with exit code 0 (ok), 2 (numeric failure) or 3 (a requested
        coincidence verdict failed)
    """
    started = time.perf_counter()
    model = build_model(spec.model)
    geometry = ThermoGeometry(model, eta_s=spec.model.eta_s)
    sweep_spec = spec.sweep_spec()

    try:
        series = compute_series(spec, geometry)
        report = coincidence_report(
            model, sweep_spec, spec.tolerances, spec.analysis.coincidence_metric, geometry
        )
    except NUMERIC_ERRORS as e:
        logger.error(f"Numeric failure: {e}")
        return RunResult(EXIT_NUMERIC, message=str(e))

    for name, s in series.items():
        if s.defined and not np.any(np.isfinite(s.values)):
            message = f"{name} is non-finite on the whole sweep"
            logger.error(message)
            return RunResult(EXIT_NUMERIC, message=message)

    frame = build_frame(sweep_grid(sweep_spec), series)
    manifest = {
        "spec": spec.model_dump(mode="json"),
        "version": __version__,
        "wall_time_seconds": round(time.perf_counter() - started, 3),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    root = Path(output_dir or spec.output.directory or get_settings().OUTPUT_DIR)
    directory = root / spec.output.name
    files = write_outputs(directory, frame, report, manifest)

    exit_code = EXIT_OK
    message = f"verdict {report.verdict}"
    if spec.analysis.verify_coincidence and not report.passed:
        exit_code = EXIT_VERDICT
        message = f"coincidence verdict failed ({spec.analysis.coincidence_metric} metric)"
        logger.error(message)
    return RunResult(exit_code, directory, report, frame, files, message)
