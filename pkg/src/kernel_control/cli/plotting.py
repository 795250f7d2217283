from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from ..invariance import GridEvaluation, LyapunovCert

SVG_NS = "http://www.w3.org/2000/svg"
CANVAS = 600
PAD = 40


def _props(d: dict) -> str:
    return " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in d.items())


def _num(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


class _Frame:
    """Maps state coordinates in a 2-D box onto SVG pixels (y axis up)."""

    def __init__(self, box) -> None:
        (self.x0, self.x1), (self.y0, self.y1) = box
        self.scale = (CANVAS - 2 * PAD) / max(self.x1 - self.x0, self.y1 - self.y0)

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        return PAD + (x - self.x0) * self.scale, CANVAS - PAD - (y - self.y0) * self.scale


def ellipse_points(c: LyapunovCert, num: int = 180) -> np.ndarray:
    """Boundary of {x^T P^-1 x = gamma} from the eigendecomposition of P."""
    eigvals, eigvecs = np.linalg.eigh(c.P)
    theta = np.linspace(0.0, 2.0 * np.pi, num + 1)
    circle = np.vstack([np.cos(theta), np.sin(theta)])
    return eigvecs @ (np.sqrt(c.gamma * eigvals)[:, None] * circle)


def render_invariance_svg(
    ev: GridEvaluation,
    c: LyapunovCert,
    trajectories: np.ndarray | None = None,
    title: str = "",
) -> str:
    """Grey cells for the decrease set, a blue R_gamma ellipse, red trajectories.

    trajectories has shape (steps + 1, 2, N).
    """
    if ev.grid is None or ev.grid.n != 2:
        raise ValueError("SVG rendering needs a two-dimensional grid evaluation")
    frame = _Frame(ev.grid.box)
    dx, dy = ev.grid.spacing
    w, h = dx * frame.scale, dy * frame.scale
    body = [
        f'<rect {_props({"x": 0, "y": 0, "width": CANVAS, "height": CANVAS, "fill": "white"})}/>',
    ]
    cells = []
    for k in np.flatnonzero(ev.in_X):
        px, py = frame(ev.points[0, k] - dx / 2, ev.points[1, k] + dy / 2)
        cells.append(f'<rect x="{_num(px)}" y="{_num(py)}" width="{_num(w)}" height="{_num(h)}"/>')
    body.append('<g fill="#bbbbbb" stroke="none">' + "".join(cells) + "</g>")

    pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in (frame(x, y) for x, y in ellipse_points(c).T))
    body.append(f'<polygon {_props({"points": pts, "fill": "#4a90d9", "fill_opacity": 0.35, "stroke": "#1f5fa8"})}/>')

    if trajectories is not None:
        lines = []
        for j in range(trajectories.shape[2]):
            run = trajectories[:, :, j]
            run = run[np.all(np.isfinite(run), axis=1)]
            pts = " ".join(f"{_num(a)},{_num(b)}" for a, b in (frame(x, y) for x, y in run))
            lines.append(f'<polyline points="{pts}"/>')
        body.append('<g fill="none" stroke="#c0392b" stroke-width="0.8">' + "".join(lines) + "</g>")

    ox, oy = frame(0.0, 0.0)
    body.append(f'<circle {_props({"cx": _num(ox), "cy": _num(oy), "r": 2.5, "fill": "black"})}/>')
    if title:
        body.append(f'<text x="{PAD}" y="{PAD / 2}" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    header = _props({"xmlns": SVG_NS, "width": CANVAS, "height": CANVAS, "viewBox": f"0 0 {CANVAS} {CANVAS}"})
    return f"<svg {header}>\n" + "\n".join(body) + "\n</svg>\n"
