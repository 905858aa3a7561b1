import os
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from appbench.circuit import CircuitShape
from appbench.report import (
    FAIL_FILL, SUCCESS_FILL, Background, InvalidQv, background_predict, bucket, cells_csv, depth_bucket,
    fidelity_color, line_plot_svg, render, volumetric_svg,
)
from appbench.runner import RunConfig, run_suite

GOLDEN = Path(__file__).parent / "golden"


def _rec(width, depth, fid, name="X"):
    return {"benchmark": name, "width": width, "normalized_depth": depth, "fidelity": {"f_normalized": fid}}


FIXED = [
    _rec(2, 12, 0.98, "BV1"), _rec(2, 13, 0.94, "DJ"), _rec(3, 30, 0.81, "QFT1"), _rec(4, 30, 1.0, "HS"),
    _rec(4, 104, 0.40, "GROVER"), _rec(4, 100, 0.30, "QFT2"), _rec(5, 420, 0.05, "PE"), _rec(6, 82, 0.55, "HAMSIM"),
]


def test_bucket_examples():
    cells = bucket([_rec(4, 100, 0.2), _rec(4, 104, 0.4)])
    assert len(cells) == 1 and cells[0].depth_bucket == 20 and cells[0].mean_fidelity == pytest.approx(0.3)
    assert len(bucket([_rec(4, 30, 1.0), _rec(5, 30, 1.0)])) == 2
    assert len(bucket([_rec(4, 10, 1.0), _rec(4, 100, 1.0)])) == 2
    assert depth_bucket(0) == 0


def test_bucket_conserves_records_and_skips_failures():
    recs = FIXED + [{"benchmark": "E", "width": 3, "normalized_depth": None, "fidelity": None}]
    cells = bucket(recs)
    assert sum(c.count for c in cells) == len(FIXED)
    assert all(0 <= c.mean_fidelity <= 1 for c in cells)


@pytest.mark.parametrize("shape,ok", [((5, 5), True), ((2, 12), True), ((6, 5), False), ((1, 25), True), ((1, 26), False)])
def test_background_boundary(shape, ok):
    assert background_predict(32, CircuitShape(*shape)) is ok


@pytest.mark.parametrize("vq", [0, 1, 3, 48, 2.0])
def test_invalid_qv(vq):
    with pytest.raises(InvalidQv):
        background_predict(vq, CircuitShape(1, 1))


@given(st.integers(1, 40), st.integers(1, 200), st.integers(0, 40), st.integers(0, 200), st.integers(1, 12))
def test_background_antitone(w, d, dw, dd, k):
    vq = 2 ** k
    if background_predict(vq, CircuitShape(w + dw, d + dd)):
        assert background_predict(vq, CircuitShape(w, d))


@given(st.integers(1, 12), st.integers(1, 30), st.floats(1, 400), st.floats(10, 300))
def test_qv_region_inside_success_region(w, k, d, qv_depth):
    bg = Background(2 ** k, qv_depth)
    if bg.in_qv_region(w, d):
        assert bg.predict(w, d)
    bare = Background(2 ** k)
    if bare.in_qv_region(w, d):
        assert bare.predict(w, d)


def test_color_map_stops():
    assert fidelity_color(0.0) == "#d7191c"
    assert fidelity_color(0.5) == "#ffffbf"
    assert fidelity_color(1.0) == "#1a9641"
    assert fidelity_color(-1.0) == "#d7191c" and fidelity_color(2.0) == "#1a9641"


def test_volumetric_golden():
    svg = volumetric_svg(bucket(FIXED), Background(32, 56.0))
    path = GOLDEN / "volumetric.svg"
    if os.environ.get("APPBENCH_REGEN_GOLDEN"):
        path.write_text(svg)
    assert svg == path.read_text()
    assert SUCCESS_FILL in svg and FAIL_FILL in svg


def test_line_plot_golden():
    svg = line_plot_svg("BV1: result fidelity", "Circuit width", "Fidelity",
                        {"normalized": [(3, 1.0), (4, 0.93), (5, 0.88)], "raw (Hellinger)": [(3, 1.0), (4, 0.95)]},
                        ylim=(0.0, 1.05))
    path = GOLDEN / "line_plot.svg"
    if os.environ.get("APPBENCH_REGEN_GOLDEN"):
        path.write_text(svg)
    assert svg == path.read_text()


def test_chart_without_background():
    svg = volumetric_svg(bucket([_rec(4, 30, 1.0)]), None)
    assert SUCCESS_FILL not in svg
    assert fidelity_color(1.0) in svg


def test_cells_csv():
    text = cells_csv(bucket([_rec(4, 100, 0.2, "A"), _rec(4, 104, 0.4, "B")]))
    header, row = text.strip().splitlines()
    assert header == "width,depth_bucket,mean_depth,mean_fidelity,count,benchmarks"
    assert row.startswith("4,20,102.0,") and row.endswith(",2,A;B")


def test_render_deterministic_except_timing(tmp_path):
    cfg = dict(benchmarks=["BV1", "QFT1"], min_size=2, max_size=4, num_circuits=2, shots=100)
    outs = []
    for name in ("a", "b"):
        res = run_suite(RunConfig(**cfg))
        files = render(bucket(res.records), Background(16, 40.0), res.groups, tmp_path / name)
        outs.append({p.name: p.read_bytes() for p in files})
    assert set(outs[0]) == set(outs[1])
    assert {"volumetric.svg", "cells.csv", "groups.csv", "timing.csv", "BV1_fidelity.svg", "QFT1_depth.svg",
            "QFT1_time.svg"} <= set(outs[0])
    for name in outs[0]:
        if name.endswith("_time.svg") or name == "timing.csv":
            continue
        assert outs[0][name] == outs[1][name], name


def test_render_nothing_raises(tmp_path):
    with pytest.raises(ValueError):
        render([], None, [], tmp_path)
