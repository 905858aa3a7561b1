"""Volumetric positioning of benchmark results and the chart/table writers.

Charts are hand-written SVG with fixed number formatting so the same input
always gives the same bytes.

Fidelity color map (piecewise linear in RGB, clamped to [0, 1]):

    0.0  #d7191c   red
    0.5  #ffffbf   pale yellow
    1.0  #1a9641   green

Background squares are ``#d9d9d9`` where the volume-based extrapolation
predicts success and ``#ffffff`` elsewhere.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import CircuitShape, depth
from .qv import qv_circuit
from .seeding import mix
from .transpile import transpile_standard

COLOR_STOPS = ((0.0, (0xD7, 0x19, 0x1C)), (0.5, (0xFF, 0xFF, 0xBF)), (1.0, (0x1A, 0x96, 0x41)))
SUCCESS_FILL = "#d9d9d9"
FAIL_FILL = "#ffffff"
BINS_PER_DECADE = 10


class InvalidQv(ValueError):
    pass


# -- bucketing -------------------------------------------------------------------
def depth_bucket(d: float) -> int:
    return int(round(BINS_PER_DECADE * math.log10(max(d, 1))))


def bucket_depth(b: int) -> float:
    """Representative depth of bucket ``b``."""
    return 10 ** (b / BINS_PER_DECADE)


@dataclass
class VolumetricCell:
    width: int
    depth_bucket: int
    mean_depth: float
    mean_fidelity: float
    count: int
    benchmarks: list[str] = field(default_factory=list)


def _field(r, name):
    return r[name] if isinstance(r, dict) else getattr(r, name)


def _fidelity(r) -> float | None:
    f = _field(r, "fidelity")
    if f is None:
        return None
    return f["f_normalized"] if isinstance(f, dict) else f.f_normalized


def bucket(records: Iterable) -> list[VolumetricCell]:
    """Merge records sharing (width, depth bucket); records without a fidelity are ignored."""
    groups: dict[tuple[int, int], list] = {}
    for r in records:
        fid = _fidelity(r)
        d = _field(r, "normalized_depth")
        if fid is None or d is None:
            continue
        groups.setdefault((_field(r, "width"), depth_bucket(d)), []).append((d, fid, _field(r, "benchmark")))
    cells = []
    for (w, b), items in sorted(groups.items()):
        cells.append(VolumetricCell(
            width=w, depth_bucket=b,
            mean_depth=math.fsum(d for d, _, _ in items) / len(items),
            mean_fidelity=math.fsum(f for _, f, _ in items) / len(items),
            count=len(items),
            benchmarks=sorted({name for _, _, name in items}),
        ))
    return cells


# -- background ---------------------------------------------------------------------
def _log2_volume(vq: int) -> int:
    if not isinstance(vq, int) or vq < 2 or vq & (vq - 1):
        raise InvalidQv(f"quantum volume must be a power of two >= 2, got {vq!r}")
    return vq.bit_length() - 1


def background_predict(vq: int, shape: CircuitShape) -> bool:
    """Extrapolated success: ``width * depth <= log2(vq)**2`` (boundary counts as success)."""
    k = _log2_volume(vq)
    return shape.width * shape.depth <= k * k


@dataclass
class Background:
    """Success region implied by a quantum volume.

    ``qv_depth`` is the normalized depth of the passing volume circuits; it
    bounds the volume region and converts normalized depth into volume
    layers (``qv_depth / log2(vq)`` per layer) for the area rule.
    """

    vq: int
    qv_depth: float | None = None

    def __post_init__(self):
        self.k = _log2_volume(self.vq)

    @property
    def layer_depth(self) -> float:
        return (self.qv_depth / self.k) if self.qv_depth else 1.0

    def predict(self, width: int, depth: float) -> bool:
        return width * (depth / self.layer_depth) <= self.k * self.k * (1 + 1e-12)

    def in_qv_region(self, width: int, depth: float) -> bool:
        return width <= self.k and depth <= (self.qv_depth if self.qv_depth else self.k)


def qv_circuit_depth(n: int, seed: int = 0, samples: int = 5) -> float:
    """Mean normalized depth of width-``n`` volume circuits (deterministic in ``seed``)."""
    vals = [depth(transpile_standard(qv_circuit(n, np.random.default_rng(mix(seed, "qv-depth", n, i)))))
            for i in range(samples)]
    return sum(vals) / len(vals)


# -- colors and number formatting --------------------------------------------------------
def fidelity_color(f: float) -> str:
    f = min(max(float(f), 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(COLOR_STOPS, COLOR_STOPS[1:]):
        if f <= x1:
            t = (f - x0) / (x1 - x0)
            rgb = [round(a + (b - a) * t) for a, b in zip(c0, c1)]
            return "#" + "".join(f"{v:02x}" for v in rgb)
    return "#%02x%02x%02x" % COLOR_STOPS[-1][1]


def _n(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Svg:
    def __init__(self, w: float, h: float):
        self.w, self.h = w, h
        self.parts: list[str] = []

    def rect(self, x, y, w, h, fill, stroke="none", sw=1.0, extra=""):
        self.parts.append(f'<rect x="{_n(x)}" y="{_n(y)}" width="{_n(w)}" height="{_n(h)}" fill="{fill}" '
                          f'stroke="{stroke}" stroke-width="{_n(sw)}"{extra}/>')

    def line(self, x1, y1, x2, y2, stroke="#000000", sw=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" stroke="{stroke}" '
                          f'stroke-width="{_n(sw)}"{d}/>')

    def text(self, x, y, s, size=11, anchor="middle", rotate=None, fill="#000000"):
        tr = f' transform="rotate({rotate} {_n(x)} {_n(y)})"' if rotate is not None else ""
        self.parts.append(f'<text x="{_n(x)}" y="{_n(y)}" font-size="{size}" text-anchor="{anchor}" '
                          f'font-family="sans-serif" fill="{fill}"{tr}>{_esc(str(s))}</text>')

    def polyline(self, pts, stroke, sw=1.5):
        p = " ".join(f"{_n(x)},{_n(y)}" for x, y in pts)
        self.parts.append(f'<polyline points="{p}" fill="none" stroke="{stroke}" stroke-width="{_n(sw)}"/>')

    def circle(self, x, y, r, fill):
        self.parts.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(r)}" fill="{fill}"/>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(self.w)}" height="{_n(self.h)}" '
                f'viewBox="0 0 {_n(self.w)} {_n(self.h)}">')
        body = "\n".join(self.parts)
        return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n<rect width="100%" height="100%" fill="#ffffff"/>\n{body}\n</svg>\n'


# -- volumetric chart -----------------------------------------------------------------------
def volumetric_svg(cells: Sequence[VolumetricCell], background: Background | None = None,
                   title: str = "Volumetric benchmark results") -> str:
    cw, rh = 16.0, 22.0
    left, top, right, bottom = 60.0, 40.0, 130.0, 50.0
    max_w = max([c.width for c in cells] + ([background.k] if background else []) + [2])
    max_b = max([c.depth_bucket for c in cells] + [2 * BINS_PER_DECADE])
    if background and background.qv_depth:
        max_b = max(max_b, depth_bucket(background.qv_depth))
    max_b = int(math.ceil((max_b + 1) / BINS_PER_DECADE) * BINS_PER_DECADE)
    plot_w, plot_h = cw * (max_b + 1), rh * max_w
    svg = _Svg(left + plot_w + right, top + plot_h + bottom)
    svg.text(left + plot_w / 2, 22, title, size=14)

    def x_of(b: float) -> float:
        return left + cw * b

    def y_of(w: float) -> float:
        return top + plot_h - rh * w

    if background is not None:
        for w in range(1, max_w + 1):
            for b in range(max_b + 1):
                fill = SUCCESS_FILL if background.predict(w, bucket_depth(b)) else FAIL_FILL
                if fill != FAIL_FILL:
                    svg.rect(x_of(b), y_of(w), cw, rh, fill)
        qd = background.qv_depth if background.qv_depth else background.k
        qb = BINS_PER_DECADE * math.log10(max(qd, 1)) + 0.5
        svg.rect(x_of(0), y_of(background.k), cw * qb, rh * background.k, "none", stroke="#404040", sw=2.0)
        svg.text(left + plot_w + 8, top + 14 + 16 * 6, f"QV = {background.vq}", anchor="start")

    for c in cells:
        x, y = x_of(c.depth_bucket), y_of(c.width)
        svg.rect(x + 1, y + 1, cw - 2, rh - 2, fidelity_color(c.mean_fidelity), stroke="#303030", sw=0.5)

    # axes
    svg.rect(left, top, plot_w, plot_h, "none", stroke="#000000")
    for w in range(1, max_w + 1):
        svg.text(left - 6, y_of(w) + rh / 2 + 4, w, size=10, anchor="end")
    for dec in range(0, max_b // BINS_PER_DECADE + 1):
        b = dec * BINS_PER_DECADE
        svg.line(x_of(b) + cw / 2, top + plot_h, x_of(b) + cw / 2, top + plot_h + 5)
        svg.text(x_of(b) + cw / 2, top + plot_h + 18, f"{10 ** dec}", size=10)
    svg.text(left + plot_w / 2, top + plot_h + 38, "Normalized circuit depth (log scale)", size=12)
    svg.text(18, top + plot_h / 2, "Circuit width", size=12, rotate=-90)

    # legend
    lx = left + plot_w + 20
    svg.text(lx, top + 4, "Fidelity", anchor="start")
    for i, f in enumerate((1.0, 0.8, 0.6, 0.4, 0.2, 0.0)):
        ly = top + 14 + 16 * i
        svg.rect(lx, ly - 10, 14, 12, fidelity_color(f), stroke="#303030", sw=0.5)
        svg.text(lx + 20, ly, f"{f:.1f}", size=10, anchor="start")
    return svg.render()


# -- line plots -------------------------------------------------------------------------------
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _ticks(lo: float, hi: float, integer: bool = False) -> list[float]:
    """Round tick values covering [lo, hi] (about five of them)."""
    raw = (hi - lo) / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    if integer:
        step = max(1.0, round(step))
    first = math.ceil(lo / step - 1e-9)
    out = []
    k = first
    while k * step <= hi + 1e-9:
        out.append(round(k * step, 10))
        k += 1
    return out


def line_plot_svg(title: str, xlabel: str, ylabel: str, series: dict[str, list[tuple[float, float]]],
                  ylim: tuple[float, float] | None = None, log_y: bool = False) -> str:
    left, top, pw, ph = 60.0, 40.0, 360.0, 220.0
    svg = _Svg(left + pw + 140, top + ph + 50)
    svg.text(left + pw / 2, 22, title, size=14)
    pts = [p for s in series.values() for p in s]
    xs = [p[0] for p in pts] or [0, 1]
    ys = [p[1] for p in pts] or [0, 1]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1

    def ty(v):
        return math.log10(max(v, 1e-9)) if log_y else v

    if ylim is None:
        lo, hi = min(ty(v) for v in ys), max(ty(v) for v in ys)
        if lo == hi:
            lo, hi = lo - 1, hi + 1
        pad = 0.05 * (hi - lo)
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = ylim

    def px(x):
        return left + pw * (x - x0) / (x1 - x0)

    def py(y):
        return top + ph - ph * (ty(y) - lo) / (hi - lo)

    svg.rect(left, top, pw, ph, "none", stroke="#000000")
    for v in _ticks(lo, hi, integer=log_y):
        y = top + ph - ph * (v - lo) / (hi - lo)
        svg.line(left - 4, y, left, y)
        label = f"{10 ** v:g}" if log_y else f"{v:g}"
        svg.text(left - 6, y + 4, label, size=10, anchor="end")
    for x in sorted(set(int(v) for v in xs if float(v).is_integer())):
        svg.line(px(x), top + ph, px(x), top + ph + 4)
        svg.text(px(x), top + ph + 16, x, size=10)
    svg.text(left + pw / 2, top + ph + 36, xlabel, size=12)
    svg.text(18, top + ph / 2, ylabel, size=12, rotate=-90)
    for i, (name, s) in enumerate(series.items()):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        s = sorted(s)
        if len(s) > 1:
            svg.polyline([(px(x), py(y)) for x, y in s], color)
        for x, y in s:
            svg.circle(px(x), py(y), 3, color)
        ly = top + 10 + 18 * i
        svg.line(left + pw + 14, ly - 4, left + pw + 32, ly - 4, stroke=color, sw=2)
        svg.text(left + pw + 38, ly, name, size=10, anchor="start")
    return svg.render()


# -- tables -----------------------------------------------------------------------------------------
def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def cells_csv(cells: Sequence[VolumetricCell]) -> str:
    return _csv(["width", "depth_bucket", "mean_depth", "mean_fidelity", "count", "benchmarks"],
                ([c.width, c.depth_bucket, c.mean_depth, c.mean_fidelity, c.count, ";".join(c.benchmarks)]
                 for c in cells))


def groups_csv(groups) -> str:
    cols = ["benchmark", "n", "width", "count", "errors", "mean_fidelity", "mean_raw_fidelity",
            "mean_algorithmic_depth", "mean_normalized_depth"]
    return _csv(cols, ([_field(g, c) for c in cols] for g in groups))


def timing_csv(groups) -> str:
    cols = ["benchmark", "n", "width", "mean_t_create", "mean_t_compile", "mean_t_quantum"]
    return _csv(cols, ([_field(g, c) for c in cols] for g in groups))


# -- output ---------------------------------------------------------------------------------------
def render(cells: Sequence[VolumetricCell], background: Background | None, aggregates, out_dir) -> list[Path]:
    """Write the chart, tables and per-benchmark line plots; returns the written paths.

    ``*_time.svg`` and ``timing.csv`` carry wall-clock data and are the only
    outputs that differ between repeated runs.
    """
    aggregates = list(aggregates)
    if not cells and not aggregates:
        raise ValueError("nothing to render")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {
        "volumetric.svg": volumetric_svg(cells, background),
        "cells.csv": cells_csv(cells),
        "groups.csv": groups_csv(aggregates),
        "timing.csv": timing_csv(aggregates),
    }
    names = []
    for g in aggregates:
        if _field(g, "benchmark") not in names:
            names.append(_field(g, "benchmark"))
    for name in names:
        gs = [g for g in aggregates if _field(g, "benchmark") == name]

        def pts(attr):
            return [(_field(g, "width"), _field(g, attr)) for g in gs if _field(g, attr) is not None]

        files[f"{name}_fidelity.svg"] = line_plot_svg(
            f"{name}: result fidelity", "Circuit width", "Fidelity",
            {"normalized": pts("mean_fidelity"), "raw (Hellinger)": pts("mean_raw_fidelity")}, ylim=(0.0, 1.05))
        files[f"{name}_depth.svg"] = line_plot_svg(
            f"{name}: circuit depth", "Circuit width", "Depth",
            {"algorithmic": pts("mean_algorithmic_depth"), "normalized": pts("mean_normalized_depth")})
        files[f"{name}_time.svg"] = line_plot_svg(
            f"{name}: execution time", "Circuit width", "t_quantum (s)",
            {"t_quantum": [(w, max(t, 1e-6)) for w, t in pts("mean_t_quantum")]}, log_y=True)
    paths = []
    for fname, text in files.items():
        p = out / fname
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        paths.append(p)
    return paths
