"""Result tables, manifests and SVG line charts, written atomically."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

# fixed column order of results.csv
COLUMNS = ("experiment", "case", "k", "n", "s", "lambda", "computed", "reference", "abs_error")


def fmt(x: float | None) -> str:
    """17 significant digits, enough for an exact float round trip."""
    if x is None:
        return ""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    case: str
    computed: float
    reference: float
    k: int | None = None
    n: int | None = None
    s: float | None = None
    lam: float | None = None

    @property
    def abs_error(self) -> float:
        return abs(self.computed - self.reference)

    def as_record(self) -> list[str]:
        return [
            self.experiment,
            self.case,
            "" if self.k is None else str(self.k),
            "" if self.n is None else str(self.n),
            fmt(self.s),
            fmt(self.lam),
            fmt(self.computed),
            fmt(self.reference),
            fmt(self.abs_error),
        ]


def atomic_write_text(path: Path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def results_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(row.as_record())
    return buf.getvalue()


def write_results(path: Path, rows: Iterable[ResultRow]) -> None:
    atomic_write_text(path, results_csv(rows))


def load_results(path: Path) -> list[ResultRow]:
    """Read results.csv back and verify that every error equals |computed - reference|."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected header {header}")
        for rec in reader:
            opt_int = lambda v: None if v == "" else int(v)  # noqa: E731
            opt_float = lambda v: None if v == "" else float(v)  # noqa: E731
            row = ResultRow(
                experiment=rec[0],
                case=rec[1],
                k=opt_int(rec[2]),
                n=opt_int(rec[3]),
                s=opt_float(rec[4]),
                lam=opt_float(rec[5]),
                computed=float(rec[6]),
                reference=float(rec[7]),
            )
            stored = float(rec[8])
            # 17 significant digits round-trip exactly, so equality is the right test
            if stored != row.abs_error:
                raise ValueError(f"stored error {stored} != recomputed {row.abs_error} in case {row.case}")
            rows.append(row)
    return rows


def write_manifest(path: Path, manifest: dict) -> None:
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
    logy: bool = False,
    width: int = 640,
    height: int = 420,
) -> str:
    """Minimal static SVG line chart. ``series`` is a list of ``(label, xs, ys)``."""
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
    tx = (lambda v: math.log10(v)) if logx else float
    ty = (lambda v: math.log10(max(v, 1e-300))) if logy else float
    pts = [(tx(x), ty(y)) for _, xs, ys in series for x, y in zip(xs, ys) if not (logx and x <= 0)]
    if not pts:
        pts = [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
    y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (tx(x) - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (ty(y) - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="14">{_esc(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>',
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{_esc(ylabel)}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        xl = f"1e{xv:.1f}" if logx else f"{xv:.3g}"
        yl = f"1e{yv:.1f}" if logy else f"{yv:.3g}"
        out.append(f'<text x="{left + frac * pw:.1f}" y="{top + ph + 16}" text-anchor="middle" font-family="sans-serif" font-size="10">{xl}</text>')
        out.append(f'<text x="{left - 6}" y="{top + ph - frac * ph + 3:.1f}" text-anchor="end" font-family="sans-serif" font-size="10">{yl}</text>')
    for i, (label, xs, ys) in enumerate(series):
        color = colors[i % len(colors)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys) if not (logx and x <= 0))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = top + 14 * (i + 1)
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly}" font-family="sans-serif" font-size="10">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
