"""
CSV tables and standalone SVG line charts for sweep results.

Both writers are deterministic: identical results produce identical bytes.
"""
import csv
import io
import math
import xml.etree.ElementTree as ET
from typing import IO, List, Optional, Sequence, Union

from stereobudget.core.errors import DomainError
from stereobudget.core.sweep import SweepResult

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "sweep_variable",
    "bearing_deg",
    "depth_m",
    "range_m",
    "model",
    "analytic_depth_error_m",
    "analytic_range_error_m",
    "oracle_range_error_m",
    "oracle_relative_deviation",
]

SVG_WIDTH = 800
SVG_HEIGHT = 500
MARGIN_LEFT = 80
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
SERIES_COLOURS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"]

AXIS_LABELS = {
    "bearing_deg": "Angle of incidence (deg)",
    "depth_m": "Depth Z (m)",
    "baseline_m": "Baseline B (m)",
}


def _as_results(results: Union[SweepResult, Sequence[SweepResult]]) -> List[SweepResult]:
    if isinstance(results, SweepResult):
        return [results]
    return list(results)


def _number(value: Optional[float]) -> str:
    """Shortest round-trip decimal; empty for missing values."""
    if value is None or math.isnan(value):
        return ""
    return repr(float(value))


def emit_csv(results: Union[SweepResult, Sequence[SweepResult]], destination: IO[str]) -> None:
    """Write one row per grid point (per result) with the fixed column order."""
    results = _as_results(results)
    if not results or not any(result.rows for result in results):
        raise DomainError("Nothing to write: the sweep result has no rows")

    writer = csv.writer(destination, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for result in results:
        for row in result.rows:
            bearing_deg = None if math.isnan(row.bearing_rad) else math.degrees(row.bearing_rad)
            writer.writerow([
                _number(row.sweep_value),
                _number(bearing_deg),
                _number(row.depth_m),
                _number(row.range_m),
                row.model.value,
                _number(row.analytic_depth_error_m),
                _number(row.analytic_range_error_m),
                _number(row.oracle_range_error_m),
                _number(row.oracle_relative_deviation),
            ])


def csv_text(results: Union[SweepResult, Sequence[SweepResult]]) -> str:
    buffer = io.StringIO()
    emit_csv(results, buffer)
    return buffer.getvalue()


def nice_ticks(low: float, high: float, min_ticks: int = 5, max_ticks: int = 8) -> List[float]:
    """
    Round-number ticks (1, 2, 2.5 or 5 times a power of ten) covering
    [low, high], between ``min_ticks`` and ``max_ticks`` of them when possible.
    """
    if not high > low:
        high = low + 1.0
    exponent = math.floor(math.log10(high - low))
    best = None
    for power in range(exponent - 2, exponent + 2):
        for mantissa in (1.0, 2.0, 2.5, 5.0):
            step = mantissa * 10.0 ** power
            first = math.floor(low / step + 1e-9)
            last = math.ceil(high / step - 1e-9)
            count = last - first + 1
            if min_ticks <= count <= max_ticks:
                return [round(i * step, 12) for i in range(first, last + 1)]
            if count >= 2 and (best is None or abs(count - max_ticks) < abs(best[2] - max_ticks)):
                best = (first, step, count)
    first, step, count = best
    return [round((first + i) * step, 12) for i in range(count)]


def _tick_label(value: float) -> str:
    return f"{value:g}"


def _series(results: List[SweepResult]):
    series = []
    for result in results:
        name = result.model.value
        series.append((f"{name} analytic", [(r.sweep_value, r.analytic_range_error_m) for r in result.rows]))
        oracle = [(r.sweep_value, r.oracle_range_error_m) for r in result.rows if r.oracle_range_error_m is not None]
        if oracle:
            series.append((f"{name} oracle", oracle))
    return series


def _check_grids(results: List[SweepResult]) -> None:
    reference = results[0]
    for result in results[1:]:
        if result.variable != reference.variable or result.grid != reference.grid:
            raise DomainError(
                f"Cannot plot results on different grids ({reference.variable} vs {result.variable})"
            )


def build_plot(results: Union[SweepResult, Sequence[SweepResult]]) -> ET.Element:
    """SVG element tree: one polyline per (result, error kind), range error in cm."""
    results = _as_results(results)
    if not results:
        raise DomainError("Nothing to plot")
    _check_grids(results)

    series = _series(results)
    xs = [x for _, points in series for x, y in points if not math.isnan(y)]
    ys = [y * 100 for _, points in series for x, y in points if not math.isnan(y)]
    x_ticks = nice_ticks(min(xs), max(xs))
    y_ticks = nice_ticks(0.0, max(ys))
    x_lo, x_hi = x_ticks[0], x_ticks[-1]
    y_lo, y_hi = y_ticks[0], y_ticks[-1]

    plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x: float) -> str:
        return f"{MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w:.2f}"

    def py(y: float) -> str:
        return f"{MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h:.2f}"

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=str(SVG_WIDTH),
        height=str(SVG_HEIGHT),
        viewBox=f"0 0 {SVG_WIDTH} {SVG_HEIGHT}",
    )
    ET.SubElement(svg, "rect", x="0", y="0", width=str(SVG_WIDTH), height=str(SVG_HEIGHT), fill="white")

    axes = ET.SubElement(svg, "g", stroke="black", fill="none")
    ET.SubElement(axes, "rect", x=str(MARGIN_LEFT), y=str(MARGIN_TOP), width=str(plot_w), height=str(plot_h))

    labels = ET.SubElement(svg, "g", {"font-family": "sans-serif", "font-size": "12", "fill": "black"})
    for tick in x_ticks:
        ET.SubElement(axes, "line", x1=px(tick), y1=py(y_lo), x2=px(tick), y2=f"{float(py(y_lo)) + 5:.2f}")
        text = ET.SubElement(labels, "text", {"x": px(tick), "y": f"{float(py(y_lo)) + 20:.2f}", "text-anchor": "middle"})
        text.text = _tick_label(tick)
    for tick in y_ticks:
        ET.SubElement(axes, "line", x1=f"{MARGIN_LEFT - 5}", y1=py(tick), x2=str(MARGIN_LEFT), y2=py(tick))
        text = ET.SubElement(labels, "text", {"x": f"{MARGIN_LEFT - 8}", "y": f"{float(py(tick)) + 4:.2f}", "text-anchor": "end"})
        text.text = _tick_label(tick)

    x_label = ET.SubElement(labels, "text", {"x": f"{MARGIN_LEFT + plot_w / 2:.2f}", "y": str(SVG_HEIGHT - 15), "text-anchor": "middle"})
    x_label.text = AXIS_LABELS.get(results[0].variable, results[0].variable)
    y_label = ET.SubElement(labels, "text", {
        "x": "20",
        "y": f"{MARGIN_TOP + plot_h / 2:.2f}",
        "text-anchor": "middle",
        "transform": f"rotate(-90 20 {MARGIN_TOP + plot_h / 2:.2f})",
    })
    y_label.text = "Range error (cm)"

    lines = ET.SubElement(svg, "g", {"fill": "none", "stroke-width": "2"})
    legend = ET.SubElement(svg, "g", {"font-family": "sans-serif", "font-size": "12"})
    for index, (name, points) in enumerate(series):
        colour = SERIES_COLOURS[index % len(SERIES_COLOURS)]
        coords = " ".join(f"{px(x)},{py(y * 100)}" for x, y in points if not math.isnan(y))
        attrs = {"points": coords, "stroke": colour}
        if name.endswith("oracle"):
            attrs["stroke-dasharray"] = "6 4"
        ET.SubElement(lines, "polyline", attrs)

        row_y = MARGIN_TOP + 15 + index * 18
        ET.SubElement(legend, "line", {
            "x1": str(MARGIN_LEFT + 15), "y1": str(row_y - 4), "x2": str(MARGIN_LEFT + 40), "y2": str(row_y - 4),
            "stroke": colour, "stroke-width": "2",
        })
        label = ET.SubElement(legend, "text", {"x": str(MARGIN_LEFT + 46), "y": str(row_y)})
        label.text = name

    return svg


def emit_plot(results: Union[SweepResult, Sequence[SweepResult]], destination: IO[bytes]) -> None:
    svg = build_plot(results)
    destination.write(b'<?xml version="1.0" encoding="UTF-8"?>\n')
    destination.write(ET.tostring(svg, encoding="utf-8", xml_declaration=False))
    destination.write(b"\n")
