"""Phase-portrait SVGs in the figure conventions of the geodesic portraits.

Timelike curves are solid, spacelike dashed, isotropic bold solid and the
discriminant dotted. All styling lives in ``STYLES`` so that regression tests
can rely on byte-stable output; matplotlib is run with a fixed hash salt, no
date metadata and ids derived from the trace index.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .metric import ISOTROPIC, SPACELIKE, TIMELIKE  # noqa: E402

__all__ = ["STYLES", "Polyline", "PortraitSpec", "render_svg", "emit_svg", "split_by_label"]

DISCRIMINANT = "discriminant"
SINGULAR = "singular"

STYLES: dict[str, dict] = {
    TIMELIKE: {"color": "black", "linestyle": "-", "linewidth": 0.9},
    SPACELIKE: {"color": "black", "linestyle": (0, (4.0, 2.5)), "linewidth": 0.9},
    ISOTROPIC: {"color": "black", "linestyle": "-", "linewidth": 2.4},
    DISCRIMINANT: {"color": "0.35", "linestyle": (0, (1.0, 2.0)), "linewidth": 1.2},
    SINGULAR: {"color": "black", "marker": "o", "markersize": 3.5, "linestyle": "none"},
}

_RC = {
    "svg.hashsalt": "sigflow",
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.linewidth": 0.6,
}


@dataclass
class Polyline:
    x: np.ndarray
    y: np.ndarray
    style: str
    gid: str = ""


@dataclass
class PortraitSpec:
    region: tuple[float, float, float, float]
    title: str = ""
    size: tuple[float, float] = (4.0, 4.0)
    points: Sequence[tuple[float, float]] = field(default_factory=tuple)
    axes: bool = True


def split_by_label(x: np.ndarray, y: np.ndarray, labels: Sequence[str], gid: str = "") -> list[Polyline]:
    """Cut a curve into runs of constant causal label (neighbouring runs share an endpoint)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out: list[Polyline] = []
    if len(x) == 0:
        return out
    start = 0
    for i in range(1, len(x) + 1):
        if i == len(x) or labels[i] != labels[start]:
            stop = min(i + 1, len(x))
            out.append(Polyline(x[start:stop], y[start:stop], labels[start], f"{gid}-{len(out)}"))
            start = i
    return out


def render_svg(spec: PortraitSpec, curves: Sequence[Polyline], discriminant: Sequence[Polyline] = ()) -> bytes:
    """Render to SVG bytes. The axes box is the region, clipped to it."""
    if not curves and not discriminant:
        raise ValueError("nothing to draw: need at least one polyline")
    x0, x1, y0, y1 = spec.region
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=spec.size)
        try:
            for d in discriminant:
                ax.plot(d.x, d.y, gid=d.gid or None, **STYLES[DISCRIMINANT])
            for c in curves:
                ax.plot(c.x, c.y, gid=c.gid or None, **STYLES[c.style])
            if spec.points:
                px, py = zip(*spec.points)
                ax.plot(px, py, gid="singular-points", **STYLES[SINGULAR])
            ax.set_xlim(x0, x1)
            ax.set_ylim(y0, y1)
            ax.set_aspect("auto")
            if spec.title:
                ax.set_title(spec.title)
            if not spec.axes:
                ax.set_axis_off()
            buf = io.BytesIO()
            fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        finally:
            plt.close(fig)
    return buf.getvalue()


def emit_svg(path, spec: PortraitSpec, curves: Sequence[Polyline], discriminant: Sequence[Polyline] = ()) -> None:
    from .report import atomic_write_bytes

    atomic_write_bytes(path, render_svg(spec, curves, discriminant))
