"""Deterministic file export: CSV tables, JSON payloads.

Every artifact carries a ``#``-prefixed (CSV) or embedded (JSON)
metadata block — tool version plus whatever identifies the run (seed,
generator, tolerances) — and never a timestamp, so identical runs
produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import DensityTable, DiracMixture
from .domain import ValidationReport
from .errors import SpecError
from .montecarlo import GENERATOR_NAME, EmpiricalMeasure, FunctionalEstimate

__all__ = [
    "density_csv", "report_csv", "empirical_csv",
    "estimate_payload", "estimate_json",
    "measure_payload", "measure_json",
    "validation_payload", "validation_json",
    "probability_payload", "probability_json",
    "write_json",
]


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _metadata(fields: dict) -> str:
    lines = [f"# version = {__version__}"]
    lines += [f"# {key} = {value}" for key, value in fields.items()]
    return "\n".join(lines)


def density_csv(table: DensityTable, path: str | Path, extra: dict | None = None) -> None:
    """`y,g,contributing_pieces` rows at 17 significant digits."""
    meta = {
        "M": _fmt(table.domain_measure),
        "tail_bound": _fmt(table.tail_bound),
        "grid_size": len(table.grid),
        "q_tol": _fmt(table.q_tol),
    }
    meta.update(extra or {})
    rows = "\n".join(
        f"{_fmt(y)},{_fmt(g)},{c}"
        for y, g, c in zip(table.grid, table.values, table.contributing_counts)
    )
    Path(path).write_text(
        _metadata(meta) + "\ny,g,contributing_pieces\n" + rows + "\n",
        encoding="utf-8",
    )


def report_csv(
    rows,
    path: str | Path,
    *,
    suite_description: str,
    reference_type: str,
    extra: dict | None = None,
) -> None:
    """Ladder convergence: `level,gap,atom_count` ordered by level."""
    meta = {"suite": suite_description, "reference": reference_type}
    meta.update(extra or {})
    body = "\n".join(f"{r.level},{_fmt(r.gap)},{r.atom_count}" for r in rows)
    Path(path).write_text(
        _metadata(meta) + "\nlevel,gap,atom_count\n" + body + "\n",
        encoding="utf-8",
    )


def sketch_indices(n: int, cap: int) -> np.ndarray:
    """Indices of an evenly-thinned quantile sketch of n sorted samples."""
    return np.linspace(0, n - 1, cap).round().astype(int)


def empirical_csv(
    e: EmpiricalMeasure,
    path: str | Path,
    *,
    cap: int | None = None,
    extra: dict | None = None,
) -> None:
    """One sample per row.  With ``cap``, an evenly-thinned quantile
    sketch of the sorted samples is written and noted in the metadata."""
    samples = e.samples
    meta = {
        "seed": e.seed,
        "generator": GENERATOR_NAME,
        "n": e.n,
        "rejected": e.rejected,
    }
    if cap is not None and cap < e.n:
        samples = samples[sketch_indices(e.n, cap)]
        meta["capped"] = f"{cap} of {e.n} sorted samples, evenly thinned"
    meta.update(extra or {})
    body = "\n".join(_fmt(y) for y in samples)
    Path(path).write_text(
        _metadata(meta) + "\ny\n" + body + "\n", encoding="utf-8"
    )


def write_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, allow_nan=False) + "\n", encoding="utf-8"
    )


def estimate_payload(est: FunctionalEstimate) -> dict:
    out = {
        "value": est.value,
        "stderr": est.stderr,
        "n": est.n,
        "seed": est.seed,
        "method": est.method,
        "generator": GENERATOR_NAME if est.method == "monte-carlo" else "trapezoid",
        "version": __version__,
    }
    if est.rejected:
        out["rejected"] = est.rejected
    if est.failures:
        out["failures"] = est.failures
    if est.note:
        out["note"] = est.note
    return out


def estimate_json(est: FunctionalEstimate, path: str | Path) -> None:
    write_json(estimate_payload(est), path)


def measure_payload(measure) -> dict:
    if isinstance(measure, DiracMixture):
        return {
            "variant": "atoms",
            "atoms": [[p, w] for p, w in measure.atoms],
            "tail_bound": measure.tail_bound,
            "version": __version__,
        }
    if isinstance(measure, DensityTable):
        return {
            "variant": "density",
            "grid": [float(v) for v in measure.grid],
            "values": [float(v) for v in measure.values],
            "tail_bound": measure.tail_bound,
            "q_tol": measure.q_tol,
            "domain_measure": measure.domain_measure,
            "version": __version__,
        }
    if isinstance(measure, EmpiricalMeasure):
        return {
            "variant": "empirical",
            "samples": [float(v) for v in measure.samples],
            "seed": measure.seed,
            "n": measure.n,
            "rejected": measure.rejected,
            "generator": GENERATOR_NAME,
            "version": __version__,
        }
    raise SpecError(f"not a measure representation: {type(measure).__name__}")


def measure_json(measure, path: str | Path) -> None:
    write_json(measure_payload(measure), path)


def validation_payload(report: ValidationReport) -> dict:
    return {
        "ok": report.ok,
        "overlaps": [list(pair) for pair in report.overlaps],
        "outside_domain": list(report.outside_domain),
        "defect": report.defect,
        "image_escape_count": report.image_escape_count,
        "image_escapes": [
            {"piece": k, "x": list(x), "value": list(v)}
            for k, x, v in report.image_escapes
        ],
        "inverse_defects": [
            {"piece": k, "y": y, "residual": r} for k, y, r in report.inverse_defects
        ],
        "evaluation_failures": [
            {"piece": k, "x": list(x), "error": msg}
            for k, x, msg in report.evaluation_failures
        ],
        "samples_per_piece": report.samples_per_piece,
        "version": __version__,
    }


def validation_json(report: ValidationReport, path: str | Path) -> None:
    write_json(validation_payload(report), path)


def probability_payload(value: float, tail_bound: float, intervals) -> dict:
    return {
        "value": value,
        "tail_bound": tail_bound,
        "intervals": [[float(a), float(b)] for a, b in intervals],
        "version": __version__,
    }


def probability_json(value: float, tail_bound: float, intervals, path: str | Path) -> None:
    write_json(probability_payload(value, tail_bound, intervals), path)
