"""Map serialization: canonical CSV and a self-contained two-panel SVG.

CSV is the canonical result format.  Rows are sorted by (beta, gamma) and
floats rendered with 17 significant digits, so identical maps always produce
byte-identical files.  The SVG renderer draws the log-RR surface (diverging
color scale clipped at |log RR| = 2, with a marker on clipped cells) above a
categorical direction-bias panel, with no external dependencies.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigError
from .estimators import (
    CellResult,
    DIRECTION_BIASED,
    DIRECTION_UNBIASED,
    INDETERMINATE,
    NULL_CONSISTENT,
)
from .sweep import GridSpec, MapResult

__all__ = ["write_map_csv", "read_map_csv", "render_heatmap_svg"]

CSV_HEADER = "beta,gamma,mean_log_rr,se,replicates_used,replicates_dropped,classification,status"

#: Color scale saturates at this |log RR|; clipped cells get an over/under dot.
COLOR_CLIP = 2.0

_CLASS_COLORS = {
    DIRECTION_UNBIASED: "#4393c3",
    DIRECTION_BIASED: "#d6604d",
    NULL_CONSISTENT: "#f7f7f7",
    INDETERMINATE: "#bbbbbb",
}
_MISSING_COLOR = "#999999"


def _fmt(value):
    if value is None:
        return "nan"
    return format(float(value), ".17g")


def _sorted_cells(result):
    return sorted(result.cells, key=lambda c: (c.beta, c.gamma))


def write_map_csv(result, path):
    """Write a MapResult as canonical CSV; byte-stable for identical maps."""
    lines = [CSV_HEADER]
    for c in _sorted_cells(result):
        lines.append(",".join([
            _fmt(c.beta),
            _fmt(c.gamma),
            _fmt(c.mean_log_rr),
            _fmt(c.se),
            str(c.replicates_used),
            str(c.replicates_dropped),
            c.classification,
            c.status.replace(",", ";").replace("\n", " "),
        ]))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(data)


def _parse_float_field(raw, field, lineno):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(field, f"bad number {raw!r} on line {lineno}") from None
    return None if math.isnan(value) else value


def read_map_csv(path):
    """Read a map CSV back into a MapResult (mode `csv`, grid inferred)."""
    with open(path, encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError("header", f"unexpected CSV header in {path}")
    cells = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 8:
            raise ConfigError("row", f"expected 8 fields on line {lineno}, got {len(parts)}")
        beta = _parse_float_field(parts[0], "beta", lineno)
        gamma = _parse_float_field(parts[1], "gamma", lineno)
        if beta is None or gamma is None:
            raise ConfigError("row", f"beta/gamma missing on line {lineno}")
        cells.append(CellResult(
            beta=beta,
            gamma=gamma,
            mean_log_rr=_parse_float_field(parts[2], "mean_log_rr", lineno),
            se=_parse_float_field(parts[3], "se", lineno),
            replicates_used=int(parts[4]),
            replicates_dropped=int(parts[5]),
            classification=parts[6],
            status=parts[7],
        ))
    grid = _infer_grid(cells)
    return MapResult(grid, cells, mode="csv", fingerprint="")


def _infer_grid(cells):
    betas = np.unique([c.beta for c in cells])
    gammas = np.unique([c.gamma for c in cells])
    bstep = float(np.diff(betas).min()) if len(betas) > 1 else 1.0
    gstep = float(np.diff(gammas).min()) if len(gammas) > 1 else 1.0
    return GridSpec(float(betas[0]), float(betas[-1]), bstep,
                    float(gammas[0]), float(gammas[-1]), gstep)


def _lerp(lo, hi, t):
    return tuple(round(a + (b - a) * t) for a, b in zip(lo, hi))


def _diverging_color(value):
    """Blue-white-red scale over [-COLOR_CLIP, COLOR_CLIP]."""
    blue, white, red = (33, 102, 172), (247, 247, 247), (178, 24, 43)
    v = max(-COLOR_CLIP, min(COLOR_CLIP, value))
    if v <= 0:
        rgb = _lerp(white, blue, -v / COLOR_CLIP)
    else:
        rgb = _lerp(white, red, v / COLOR_CLIP)
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _axis_ticks(values):
    step = max(1, math.ceil(len(values) / 7))
    return list(range(0, len(values), step))


def render_heatmap_svg(result, path):
    """Render a MapResult as a two-panel SVG: log-RR surface + bias regions."""
    betas = [float(b) for b in result.grid.betas()]
    gammas = [float(g) for g in result.grid.gammas()]
    lookup = {(c.beta, c.gamma): c for c in result.cells}

    cell = 18
    left, top, gap, bottom = 60, 30, 55, 40
    width = left + cell * len(betas) + 20
    panel_h = cell * len(gammas)
    height = top + 2 * panel_h + gap + bottom

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]

    def panel(y0, title, fill_fn):
        parts.append(
            f'<text x="{left}" y="{y0 - 8}" font-size="13">{escape(title)}</text>'
        )
        for i, b in enumerate(betas):
            for j, g in enumerate(gammas):
                c = lookup.get((b, g))
                # gamma increases upward
                x = left + i * cell
                y = y0 + (len(gammas) - 1 - j) * cell
                fill, marker = fill_fn(c)
                parts.append(
                    f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                    f'fill="{fill}" stroke="#dddddd" stroke-width="0.5"/>'
                )
                if marker:
                    parts.append(
                        f'<circle cx="{x + cell / 2}" cy="{y + cell / 2}" '
                        f'r="2" fill="black"/>'
                    )
        for i in _axis_ticks(betas):
            x = left + i * cell + cell / 2
            parts.append(
                f'<text x="{x}" y="{y0 + panel_h + 14}" text-anchor="middle">'
                f'{betas[i]:g}</text>'
            )
        for j in _axis_ticks(gammas):
            y = y0 + (len(gammas) - 1 - j) * cell + cell / 2 + 4
            parts.append(
                f'<text x="{left - 8}" y="{y}" text-anchor="end">{gammas[j]:g}</text>'
            )
        parts.append(
            f'<text x="{left + cell * len(betas) / 2}" '
            f'y="{y0 + panel_h + 30}" text-anchor="middle" '
            f'font-style="italic">&#946;</text>'
        )
        parts.append(
            f'<text x="14" y="{y0 + panel_h / 2}" text-anchor="middle" '
            f'font-style="italic" transform="rotate(-90 14 {y0 + panel_h / 2})">'
            f'&#947;</text>'
        )

    def value_fill(c):
        if c is None or c.mean_log_rr is None:
            return _MISSING_COLOR, False
        return _diverging_color(c.mean_log_rr), abs(c.mean_log_rr) > COLOR_CLIP

    def class_fill(c):
        if c is None:
            return _MISSING_COLOR, False
        return _CLASS_COLORS.get(c.classification, _MISSING_COLOR), False

    panel(top, "log RR", value_fill)
    panel(top + panel_h + gap, "direction bias", class_fill)

    meta = f"mode={result.mode} fingerprint={result.fingerprint}"
    if result.master_seed is not None:
        meta += f" seed={result.master_seed}"
    parts.append(
        f'<text x="{left}" y="{height - 10}" font-size="9" fill="#666666">'
        f'{escape(meta)}</text>'
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts) + "\n")
