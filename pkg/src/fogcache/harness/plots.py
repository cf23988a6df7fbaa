"""Self-contained SVG line charts for the metrics and sweep CSVs.

The SVG is assembled by hand (no plotting library) so identical inputs give
byte-identical files: time series are seed-averaged per slot and smoothed
with a trailing rolling mean before drawing.
"""

from __future__ import annotations

import math
from pathlib import Path

from .runner import read_csv

WIDTH, HEIGHT = 880, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 170, 40, 55
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def rolling_mean(values, window: int):
    """Trailing mean over up to ``window`` samples (shorter at the start)."""
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _fmt_tick(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:g}"


class _Chart:
    """Minimal line chart with axes, ticks, and a legend."""

    def __init__(self, title, x_label, y_label, x_range, y_range):
        self.parts = []
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if self.x_hi <= self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi <= self.y_lo:
            self.y_hi = self.y_lo + 1.0
        self.legend = []
        self._frame(title, x_label, y_label)

    def _x(self, v: float) -> float:
        span = WIDTH - MARGIN_L - MARGIN_R
        return MARGIN_L + (v - self.x_lo) / (self.x_hi - self.x_lo) * span

    def _y(self, v: float) -> float:
        span = HEIGHT - MARGIN_T - MARGIN_B
        return HEIGHT - MARGIN_B - (v - self.y_lo) / (self.y_hi - self.y_lo) * span

    def _frame(self, title, x_label, y_label):
        p = self.parts
        p.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
        p.append(f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
                 f'font-size="16" font-family="sans-serif">{title}</text>')
        x0, x1 = MARGIN_L, WIDTH - MARGIN_R
        y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
        p.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
        p.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
        for v in _nice_ticks(self.x_lo, self.x_hi):
            if not self.x_lo <= v <= self.x_hi:
                continue
            x = self._x(v)
            p.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" '
                     'stroke="black"/>')
            p.append(f'<text x="{x:.2f}" y="{y0 + 20}" text-anchor="middle" '
                     f'font-size="12" font-family="sans-serif">{_fmt_tick(v)}</text>')
        for v in _nice_ticks(self.y_lo, self.y_hi):
            if not self.y_lo <= v <= self.y_hi:
                continue
            y = self._y(v)
            p.append(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" '
                     'stroke="black"/>')
            p.append(f'<text x="{x0 - 8}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-size="12" font-family="sans-serif">{_fmt_tick(v)}</text>')
        p.append(f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 12}" '
                 'text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif">{x_label}</text>')
        p.append(f'<text x="18" y="{(y0 + y1) // 2}" text-anchor="middle" '
                 f'font-size="13" font-family="sans-serif" '
                 f'transform="rotate(-90 18 {(y0 + y1) // 2})">{y_label}</text>')

    def add_series(self, name, xs, ys, color):
        pts = " ".join(f"{self._x(x):.2f},{self._y(y):.2f}"
                       for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" '
                          f'stroke="{color}" stroke-width="1.5"/>')
        self.legend.append((name, color))

    def render(self) -> str:
        p = list(self.parts)
        lx = WIDTH - MARGIN_R + 18
        for i, (name, color) in enumerate(self.legend):
            ly = MARGIN_T + 14 + 22 * i
            p.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
            p.append(f'<text x="{lx + 30}" y="{ly + 4}" font-size="12" '
                     f'font-family="sans-serif">{name}</text>')
        body = "\n".join(p)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
                f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n'
                f'{body}\n</svg>\n')


_TIMESERIES = {
    "delay": ("delay_ms", "average delay vs time", "delay (ms)"),
    "gain": ("local_caching_gain", "local caching gain vs time",
             "local caching gain"),
}


def render_timeseries(csv_path, out_path, kind: str = "delay",
                      window: int = 50) -> Path:
    """Seed-averaged, rolling-mean time series, one line per scheme."""
    column, title, y_label = _TIMESERIES[kind]
    rows = read_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")
    series = {}
    for row in rows:
        series.setdefault(row["scheme"], {}).setdefault(
            row["slot"], []).append(row[column])
    chart_data = {}
    for scheme, by_slot in sorted(series.items()):
        slots = sorted(by_slot)
        means = [sum(by_slot[s]) / len(by_slot[s]) for s in slots]
        chart_data[scheme] = (slots, rolling_mean(means, window))
    all_y = [y for slots, ys in chart_data.values() for y in ys]
    all_x = [x for slots, _ in chart_data.values() for x in slots]
    chart = _Chart(title, "time slot", y_label,
                   (min(all_x), max(all_x)),
                   (0.0, max(all_y) * 1.05))
    for i, (scheme, (xs, ys)) in enumerate(sorted(chart_data.items())):
        chart.add_series(scheme, xs, ys, PALETTE[i % len(PALETTE)])
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(chart.render())
    return out_path


def render_sweep(summary_csv_path, out_path, x_label: str = "") -> Path:
    """Converged mean delay per scheme against the swept parameter."""
    lines = Path(summary_csv_path).read_text().splitlines()
    if not lines or lines[0] != "parameter,value,scheme,mean_delay_ms,std_delay_ms,n_seeds":
        raise ValueError(f"{summary_csv_path}: not a sweep summary CSV")
    if len(lines) < 2:
        raise ValueError(f"{summary_csv_path}: no data rows")
    series = {}
    parameter = ""
    for line in lines[1:]:
        parameter, value, scheme, mean, _, _ = line.split(",")
        series.setdefault(scheme, []).append((float(value), float(mean)))
    xs_all = [x for pts in series.values() for x, _ in pts]
    ys_all = [y for pts in series.values() for _, y in pts]
    chart = _Chart(f"converged delay vs {parameter}",
                   x_label or parameter, "delay (ms)",
                   (min(xs_all), max(xs_all)), (0.0, max(ys_all) * 1.05))
    for i, (scheme, pts) in enumerate(sorted(series.items())):
        pts.sort()
        chart.add_series(scheme, [x for x, _ in pts], [y for _, y in pts],
                         PALETTE[i % len(PALETTE)])
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(chart.render())
    return out_path


def render_plots(csv_path, out_dir, kinds=("delay", "gain"),
                 window: int = 50):
    """Standard chart set for a metrics CSV; returns the written paths."""
    out_dir = Path(out_dir)
    paths = []
    for kind in kinds:
        paths.append(render_timeseries(csv_path, out_dir / f"{kind}.svg",
                                       kind=kind, window=window))
    return paths
