"""Static SVG pictures of instances and plans."""

from __future__ import annotations

import numpy as np

from ..planner import Instance, PlanResult

MARGIN = 3.0
SCALE = 20.0  # pixels per world unit
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf")


def _fmt(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def viewport(instance: Instance) -> tuple[float, float, float, float]:
    """World box shown in the picture: the bounds when known, else a padded bounding box."""
    if instance.bounds is not None:
        return instance.bounds
    meta_bounds = (instance.metadata or {}).get("bounds")
    pts = [np.asarray(instance.starts + instance.goals, dtype=float)]
    pts += [np.asarray(o, dtype=float) for o in instance.obstacles]
    P = np.vstack(pts)
    lo = P.min(axis=0) - MARGIN
    hi = P.max(axis=0) + MARGIN
    if meta_bounds is not None:
        lo = np.minimum(lo, meta_bounds[:2])
        hi = np.maximum(hi, meta_bounds[2:])
    return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def render_svg(instance: Instance, plan: PlanResult | None = None) -> bytes:
    x0, y0, x1, y1 = viewport(instance)

    def xy(p) -> str:
        return f"{_fmt(p[0])},{_fmt(y0 + y1 - p[1])}"  # flip y so north is up

    w, h = x1 - x0, y1 - y0
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w * SCALE)}" height="{_fmt(h * SCALE)}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        "<style>"
        ".obstacle{fill:#888;stroke:#444;stroke-width:0.05}"
        ".start{fill-opacity:0.25;stroke-width:0.06}"
        ".goal{fill:none;stroke-width:0.06;stroke-dasharray:0.2 0.1}"
        ".path{fill:none;stroke-width:0.08}"
        ".prefix-6b{stroke:#000;stroke-width:0.16;stroke-dasharray:0.25 0.12}"
        "</style>",
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" height="{_fmt(h)}" fill="#fff"/>',
    ]
    for ring in instance.obstacles:
        out.append(f'<polygon class="obstacle" points="{" ".join(xy(v) for v in ring)}"/>')
    for i, s in enumerate(instance.starts):
        c = PALETTE[i % len(PALETTE)]
        cx, cy = xy(s).split(",")
        out.append(f'<circle class="start" cx="{cx}" cy="{cy}" r="1" fill="{c}" stroke="{c}"/>')
    for j, g in enumerate(instance.goals):
        cx, cy = xy(g).split(",")
        out.append(f'<circle class="goal" cx="{cx}" cy="{cy}" r="1" stroke="#333"/>')
    if plan is not None:
        branches = [tr.branch for tr in plan.traces]
        for k, mv in enumerate(plan.moves):
            c = PALETTE[mv.agent % len(PALETTE)]
            pts = " ".join(xy(p) for p in mv.path.waypoints)
            out.append(f'<polyline class="path" points="{pts}" stroke="{c}"/>')
            if k < len(branches) and branches[k] == "6b":
                a, b = mv.path.waypoints[0], mv.path.waypoints[1]
                ax, ay = xy(a).split(",")
                bx, by = xy(b).split(",")
                out.append(f'<line class="prefix-6b" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}"/>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")
