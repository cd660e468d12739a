"""Minimal static SVG 1.1 output for phase portraits.

Output is a pure function of the inputs: coordinates are printed with a fixed
number of decimals and layers are emitted in the order given.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np


@dataclass
class Layer:
    name: str
    points: np.ndarray
    style: str = "polyline"  # "polyline", "closed" or "dots"
    color: str = "#000000"
    width: float = 1.0


def _split_visible(pts: np.ndarray, box) -> list[np.ndarray]:
    """Break a polyline where it leaves ``box`` or jumps across infinity."""
    xmin, xmax, ymin, ymax = box
    inside = ((pts[:, 0] >= xmin) & (pts[:, 0] <= xmax)
              & (pts[:, 1] >= ymin) & (pts[:, 1] <= ymax))
    diag = np.hypot(xmax - xmin, ymax - ymin)
    runs, cur = [], []
    for i, ok in enumerate(inside):
        if ok and cur and np.hypot(*(pts[i] - pts[cur[-1]])) > 0.25 * diag:
            runs.append(cur)
            cur = []
        if ok:
            cur.append(i)
        elif cur:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return [pts[r] for r in runs if len(r) > 1]


class Figure:
    def __init__(self, box, size: int = 640, margin: int = 20, title: str = ""):
        xmin, xmax, ymin, ymax = box
        span = max(xmax - xmin, ymax - ymin)
        cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
        self.box = (cx - span / 2, cx + span / 2, cy - span / 2, cy + span / 2)
        self.size = size
        self.margin = margin
        self.scale = (size - 2 * margin) / span
        self.title = title
        self.layers: list[Layer] = []

    def add(self, layer: Layer) -> None:
        self.layers.append(layer)

    def _xy(self, pts: np.ndarray) -> str:
        x0, _, _, y1 = self.box
        sx = self.margin + (pts[:, 0] - x0) * self.scale
        sy = self.margin + (y1 - pts[:, 1]) * self.scale
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(sx, sy))

    def to_string(self) -> str:
        out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
               f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{self.size}" height="{self.size}" viewBox="0 0 {self.size} {self.size}">']
        if self.title:
            out.append(f"  <title>{escape(self.title)}</title>")
        out.append(f'  <rect x="0" y="0" width="{self.size}" height="{self.size}" fill="#ffffff"/>')
        for layer in self.layers:
            pts = np.asarray(layer.points, dtype=float).reshape(-1, 2)
            out.append(f'  <g id="{escape(layer.name)}">')
            if layer.style == "dots":
                x0, _, _, y1 = self.box
                r = max(layer.width, 0.5)
                for x, y in pts:
                    sx = self.margin + (x - x0) * self.scale
                    sy = self.margin + (y1 - y) * self.scale
                    if 0 <= sx <= self.size and 0 <= sy <= self.size:
                        out.append(f'    <circle cx="{sx:.3f}" cy="{sy:.3f}" r="{r:.2f}" fill="{layer.color}"/>')
            elif layer.style == "closed":
                out.append(f'    <polygon points="{self._xy(pts)}" fill="none" '
                           f'stroke="{layer.color}" stroke-width="{layer.width:.2f}"/>')
            else:
                for run in _split_visible(pts, self.box):
                    out.append(f'    <polyline points="{self._xy(run)}" fill="none" '
                               f'stroke="{layer.color}" stroke-width="{layer.width:.2f}"/>')
            out.append("  </g>")
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_string())


def bounding_box(*arrays, pad: float = 0.08):
    pts = np.concatenate([np.asarray(a, float).reshape(-1, 2) for a in arrays if len(a)])
    xmin, ymin = pts.min(axis=0)
    xmax, ymax = pts.max(axis=0)
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    return (xmin - pad * span, xmax + pad * span, ymin - pad * span, ymax + pad * span)
