"""
CSV and JSON artifact writers.

CSV floats are written with 9 significant digits and ``\\n`` line endings so
that reruns diff cleanly across platforms. JSON artifacts carry no wall-clock
fields.
"""

import json
import math
from pathlib import Path
from typing import Any, Sequence, Union

import pandas as pd
from pydantic import BaseModel

from smartem.arrays import BitsSpec, EnvelopePoint
from smartem.outage import LengthRow, SrcEstimate
from smartem.simulate import CoverageReport

FLOAT_FORMAT = "%.9g"


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write ``frame`` without its index."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_json(data: Union[BaseModel, dict[str, Any]], path: Path) -> Path:
    """Write a model or a plain mapping as indented JSON."""
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, BaseModel):
        text = data.model_dump_json(indent=2)
    else:
        text = json.dumps(data, indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n")
    return path


def coverage_frame(report: CoverageReport) -> pd.DataFrame:
    """One row per evaluated grid point."""
    return pd.DataFrame(
        {
            "x": [r.x for r in report.results],
            "y": [r.y for r in report.results],
            "rx_power_dbm": [r.rx_power_dbm for r in report.results],
            "capacity_bps": [r.capacity_bps for r in report.results],
            "serving_path": [r.path_id for r in report.results],
        }
    )


def cdf_frame(pairs: Sequence[tuple[float, float]], value_column: str) -> pd.DataFrame:
    """Two-column empirical CDF."""
    return pd.DataFrame(
        {
            value_column: [v for v, _ in pairs],
            "probability": [p for _, p in pairs],
        }
    )


def bits_label(bits: BitsSpec) -> str:
    if bits == "continuous":
        return "continuous"
    if isinstance(bits, int):
        return f"{bits}bit"
    if all(b == bits[0] for b in bits):
        return f"{bits[0]}bit"
    return "hybrid"


def envelope_frame(columns: dict[str, list[EnvelopePoint]]) -> pd.DataFrame:
    """Scan angle in degrees followed by one directivity column per bit assignment."""
    first = next(iter(columns.values()))
    data: dict[str, list[float]] = {
        "angle_deg": [round(math.degrees(p.angle_rad), 9) for p in first]
    }
    for label, points in columns.items():
        data[f"{label}_dbi"] = [p.directivity_dbi for p in points]
    return pd.DataFrame(data)


def src_frame(estimates: Sequence[SrcEstimate]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "separation_deg": [e.separation_deg for e in estimates],
            "outage_probability": [e.outage_probability for e in estimates],
            "ci_low": [e.ci_low for e in estimates],
            "ci_high": [e.ci_high for e in estimates],
            "primary_blocked": [e.primary_blocked_fraction for e in estimates],
            "reflected_blocked": [e.reflected_blocked_fraction for e in estimates],
            "trials": [e.trials for e in estimates],
        }
    )


def length_frame(rows: Sequence[LengthRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows])
