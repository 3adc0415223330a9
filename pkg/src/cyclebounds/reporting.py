"""File output and series ingestion.

All files are written atomically (temp file in the target directory, then
rename) so a crashed run never leaves a truncated artifact.  Reals are
serialized with 17 significant digits ("%.17g"), which round-trips IEEE
doubles exactly: re-reading an emitted series and re-evaluating the bounds
reproduces the original values bit for bit.

Formats
-------
``series.csv``
    Header ``k,R,sigma``; one row per cycle index from 0.
``coeffs.csv``
    Header ``k,w``; inequality coefficient vectors.
``report.json``
    Detection results: per-member records (``n``, ``S``, ``sigma_S``,
    ``violated``), the optimized three-cycle record, an optional
    extrapolation block, and ``first_violation_n``.

Ingestion accepts CSV with header ``k,R,sigma,shots`` (``sigma`` and
``shots`` optional; a missing sigma is inferred binomially when shots are
present, else taken as 0) or JSON ``{"R": [...], "sigma": [...],
"shots": int}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .bounds import InequalityCoefficients
from .detection import DetectionReport, ExtrapolationReport
from .evolve import RecurrenceSeries


class SeriesFormatError(ValueError):
    """Malformed series file; maps to CLI exit code 2."""


def fmt(x: float) -> str:
    """A real with 17 significant digits (exact float64 round-trip)."""
    return format(float(x), ".17g")


def atomic_write_text(path: Union[str, os.PathLike], text: str) -> None:
    """Write-temp-then-rename so readers never observe a partial file."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def render_series_csv(series: RecurrenceSeries) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["k", "R", "sigma"])
    for k, (r, s) in enumerate(zip(series.values, series.sigmas)):
        writer.writerow([k, fmt(r), fmt(s)])
    return out.getvalue()


def write_series_csv(path, series: RecurrenceSeries) -> None:
    atomic_write_text(path, render_series_csv(series))


def render_coeffs_csv(coeffs: InequalityCoefficients) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["k", "w"])
    for k, w in enumerate(coeffs.w):
        writer.writerow([k, fmt(w)])
    return out.getvalue()


def write_coeffs_csv(path, coeffs: InequalityCoefficients) -> None:
    atomic_write_text(path, render_coeffs_csv(coeffs))


def _json_render(obj, indent: int = 0) -> str:
    # json.dumps prints floats in shortest-round-trip form; the output
    # contract wants a fixed 17-significant-digit rendering, so walk the
    # structure by hand.  Only the shapes report dicts actually use.
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{json.dumps(key)}: {_json_render(val, indent + 1)}"
                 for key, val in obj.items()]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{_json_render(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt(obj) if math.isfinite(obj) else json.dumps(None)
    return json.dumps(obj)


def render_json(obj) -> str:
    return _json_render(obj) + "\n"


def report_to_dict(
    report: DetectionReport,
    extrapolation: Optional[ExtrapolationReport] = None,
    meta: Optional[dict] = None,
) -> dict:
    """Flatten detection (+ optional extrapolation) results for report.json."""
    out: dict = {}
    if meta:
        out["meta"] = dict(meta)
    out["members"] = [
        {"n": rec.n, "S": rec.value, "sigma_S": rec.sigma, "violated": rec.violated}
        for rec in report.records
    ]
    if report.optimized is not None:
        opt = report.optimized
        out["optimized"] = {
            "governing": opt.governing,
            "value": opt.value,
            "sigma": opt.sigma,
            "bias": opt.bias,
            "shape": opt.result.shape,
            "simplified_value": opt.result.simplified_value,
            "stationary_value": opt.result.value,
            "x_min": opt.result.x_min,
            "y_min": opt.result.y_min,
            "discriminant": opt.result.discriminant,
            "violated": opt.violated,
        }
    else:
        out["optimized"] = None
    if extrapolation is not None:
        out["extrapolation"] = {
            "cutoff": extrapolation.cutoff,
            "records": [
                {"n": rec.n, "S": rec.value, "sigma_S": rec.sigma,
                 "error_bound": rec.error_bound, "violated": rec.violated}
                for rec in extrapolation.records
            ],
            "first_violation_n": extrapolation.first_violation_n,
        }
    else:
        out["extrapolation"] = None
    out["first_violation_n"] = report.first_violation_n
    return out


def write_report_json(path, payload: dict) -> None:
    atomic_write_text(path, render_json(payload))


@dataclass(frozen=True)
class IngestedSeries:
    """A recurrence series read from disk, with its provenance label."""

    series: RecurrenceSeries
    source: str


def _infer_sigma(r: float, shots: int) -> float:
    # Same plus-4 variance recurrence_sampled reports, reconstructed from
    # the success count implied by the quoted frequency.
    x = round(r * shots)
    v = (x + 2.0) / (shots + 4.0)
    return math.sqrt(v * (1.0 - v) / shots)


def _parse_series_csv(text: str, source: str) -> IngestedSeries:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise SeriesFormatError(f"{source}: empty series file")
    header = [cell.strip().lower() for cell in rows[0]]
    if header[:2] != ["k", "r"] or not set(header[2:]) <= {"sigma", "shots"}:
        raise SeriesFormatError(
            f"{source}: header must be k,R[,sigma][,shots], got {rows[0]}")
    col = {name: i for i, name in enumerate(header)}
    values, sigmas = [], []
    shots_seen: set[int] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            k = int(row[col["k"]])
            r = float(row[col["r"]])
        except (ValueError, IndexError):
            raise SeriesFormatError(f"{source}:{lineno}: bad k or R value") from None
        if k != len(values):
            raise SeriesFormatError(
                f"{source}:{lineno}: k must count 0,1,2,... (got {k})")
        shots = 0
        if "shots" in col and len(row) > col["shots"] and row[col["shots"]].strip():
            try:
                shots = int(row[col["shots"]])
            except ValueError:
                raise SeriesFormatError(f"{source}:{lineno}: bad shots value") from None
            if shots < 0:
                raise SeriesFormatError(f"{source}:{lineno}: shots must be >= 0")
        sigma_cell = ""
        if "sigma" in col and len(row) > col["sigma"]:
            sigma_cell = row[col["sigma"]].strip()
        if sigma_cell:
            try:
                sigma = float(sigma_cell)
            except ValueError:
                raise SeriesFormatError(f"{source}:{lineno}: bad sigma value") from None
        elif shots > 0:
            sigma = _infer_sigma(r, shots)
        else:
            sigma = 0.0
        values.append(r)
        sigmas.append(sigma)
        shots_seen.add(shots)
    shots = max(shots_seen) if shots_seen else 0
    try:
        series = RecurrenceSeries(np.array(values), np.array(sigmas), shots=shots)
    except ValueError as exc:
        raise SeriesFormatError(f"{source}: {exc}") from None
    return IngestedSeries(series=series, source=source)


def _parse_series_json(obj, source: str) -> IngestedSeries:
    if not isinstance(obj, dict) or "R" not in obj:
        raise SeriesFormatError(f"{source}: JSON series needs an 'R' array")
    values = obj["R"]
    if not isinstance(values, list) or not values:
        raise SeriesFormatError(f"{source}: 'R' must be a non-empty array")
    shots = obj.get("shots", 0)
    if not isinstance(shots, int) or isinstance(shots, bool) or shots < 0:
        raise SeriesFormatError(f"{source}: 'shots' must be a nonnegative integer")
    sigmas = obj.get("sigma")
    if sigmas is None:
        if shots > 0:
            sigmas = [_infer_sigma(float(r), shots) for r in values]
        else:
            sigmas = [0.0] * len(values)
    elif not isinstance(sigmas, list) or len(sigmas) != len(values):
        raise SeriesFormatError(f"{source}: 'sigma' must match 'R' in length")
    try:
        series = RecurrenceSeries(np.array(values, dtype=float),
                                  np.array(sigmas, dtype=float), shots=shots)
    except (TypeError, ValueError) as exc:
        raise SeriesFormatError(f"{source}: {exc}") from None
    return IngestedSeries(series=series, source=source)


def read_series(path) -> IngestedSeries:
    """Load a measured recurrence series from a CSV or JSON file."""
    path = os.fspath(path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SeriesFormatError(f"cannot read series {path}: {exc}") from None
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SeriesFormatError(f"{path}: invalid JSON ({exc})") from None
        return _parse_series_json(obj, path)
    return _parse_series_csv(text, path)
