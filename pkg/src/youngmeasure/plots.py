"""Self-contained SVG renderings: density polylines and sample histograms.

Hand-assembled markup — fixed canvas, fixed precision, no timestamps —
so identical inputs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .analytic import DensityTable
from .errors import SpecError
from .montecarlo import EmpiricalMeasure

__all__ = ["emit_plot", "HISTOGRAM_BINS"]

HISTOGRAM_BINS = 128

_W, _H = 800, 500
_L, _R, _T, _B = 70, 20, 20, 50  # margins


def _px(v: float) -> str:
    return f"{v:.2f}"


def _scales(x_lo, x_hi, y_lo, y_hi):
    def sx(x):
        return _L + (x - x_lo) / (x_hi - x_lo) * (_W - _L - _R)

    def sy(y):
        return _H - _B - (y - y_lo) / (y_hi - y_lo) * (_H - _T - _B)

    return sx, sy


def _axes(sx, sy, x_lo, x_hi, y_lo, y_hi) -> list[str]:
    parts = [
        f'<line x1="{_px(sx(x_lo))}" y1="{_px(sy(y_lo))}" x2="{_px(sx(x_hi))}" '
        f'y2="{_px(sy(y_lo))}" stroke="black" stroke-width="1"/>',
        f'<line x1="{_px(sx(x_lo))}" y1="{_px(sy(y_lo))}" x2="{_px(sx(x_lo))}" '
        f'y2="{_px(sy(y_hi))}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(5):
        x = x_lo + (x_hi - x_lo) * i / 4
        y = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<text x="{_px(sx(x))}" y="{_px(_H - _B + 18)}" font-family="monospace" '
            f'font-size="11" text-anchor="middle">{x:.4g}</text>'
        )
        parts.append(
            f'<text x="{_px(_L - 8)}" y="{_px(sy(y) + 4)}" font-family="monospace" '
            f'font-size="11" text-anchor="end">{y:.4g}</text>'
        )
    return parts


def _polyline(xs, ys, sx, sy, color: str) -> str:
    pts = " ".join(f"{_px(sx(x))},{_px(sy(y))}" for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'


def _document(desc: str, body: list[str]) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'width="{_W}" height="{_H}">',
        f"<desc>{desc}; version {__version__}</desc>",
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _density_svg(table: DensityTable, breakpoints: Sequence[float]) -> str:
    xs, ys = table.grid, table.values
    x_lo, x_hi = float(xs[0]), float(xs[-1])
    y_hi = float(ys.max()) * 1.05 or 1.0
    sx, sy = _scales(x_lo, x_hi, 0.0, y_hi)
    body = _axes(sx, sy, x_lo, x_hi, 0.0, y_hi)
    body.append(_polyline(xs, ys, sx, sy, "#1f5fa8"))
    for b in breakpoints:
        if x_lo <= b <= x_hi:
            body.append(
                f'<line x1="{_px(sx(b))}" y1="{_px(_H - _B)}" x2="{_px(sx(b))}" '
                f'y2="{_px(_H - _B - 10)}" stroke="#c23b22" stroke-width="1.5"/>'
            )
    return _document("density g(y) with piece-boundary ticks", body)


def _histogram_svg(e: EmpiricalMeasure, reference: Callable | None) -> str:
    samples = e.samples
    x_lo, x_hi = float(samples[0]), float(samples[-1])
    if x_hi == x_lo:  # degenerate but legal: all mass at one point
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    counts, edges = np.histogram(samples, bins=HISTOGRAM_BINS, range=(x_lo, x_hi))
    width = edges[1] - edges[0]
    heights = counts / (e.n * width)  # density normalization
    y_hi = float(heights.max()) * 1.15 or 1.0
    ref_ys = None
    if reference is not None:
        ref_xs = np.linspace(x_lo, x_hi, 256)
        ref_ys = np.asarray(reference(ref_xs), dtype=float)
        y_hi = max(y_hi, float(ref_ys.max()) * 1.15)
    sx, sy = _scales(x_lo, x_hi, 0.0, y_hi)
    body = _axes(sx, sy, x_lo, x_hi, 0.0, y_hi)
    for k in range(HISTOGRAM_BINS):
        if counts[k] == 0:
            continue
        x0, x1 = sx(edges[k]), sx(edges[k + 1])
        y0 = sy(heights[k])
        body.append(
            f'<rect x="{_px(x0)}" y="{_px(y0)}" width="{_px(x1 - x0)}" '
            f'height="{_px(sy(0) - y0)}" fill="#9ecae1" stroke="none"/>'
        )
    if ref_ys is not None:
        body.append(_polyline(np.linspace(x_lo, x_hi, 256), ref_ys, sx, sy, "#c23b22"))
    return _document(
        f"histogram of {e.n} samples (seed {e.seed})"
        + ("; reference density overlay" if ref_ys is not None else ""),
        body,
    )


def emit_plot(
    obj,
    path: str | Path,
    *,
    reference: Callable | None = None,
    breakpoints: Sequence[float] = (),
) -> None:
    """Render a DensityTable or EmpiricalMeasure to an SVG file.

    All validation happens before the file is opened; a failing call
    leaves nothing on disk.
    """
    if isinstance(obj, DensityTable):
        text = _density_svg(obj, breakpoints)
    elif isinstance(obj, EmpiricalMeasure):
        text = _histogram_svg(obj, reference)
    else:
        raise SpecError(f"cannot plot a {type(obj).__name__}")
    Path(path).write_text(text, encoding="utf-8")
