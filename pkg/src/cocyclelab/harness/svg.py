"""Tiny hand-rolled SVG writers (no plotting dependency, byte-deterministic)."""

from __future__ import annotations

import numpy as np

__all__ = ["scatter_annulus", "heatmap"]


def _f(x: float) -> str:
    return f"{x:.4f}"


def scatter_annulus(points, rho: float, title: str = "",
                    size: int = 640) -> str:
    """Scatter of complex points with the unit circle and annulus overlay.

    The view spans [-(1+rho+margin), +(1+rho+margin)]^2; the unit circle
    is drawn solid, the annulus boundaries dashed.
    """
    lim = (1.0 + rho) * 1.08
    scale = size / (2.0 * lim)

    def sx(x):
        return _f((x + lim) * scale)

    def sy(y):
        return _f((lim - y) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    cx, cy = sx(0.0), sy(0.0)
    for r, dash in ((1.0, ""), (1.0 - rho, ' stroke-dasharray="4 4"'),
                    (1.0 + rho, ' stroke-dasharray="4 4"')):
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(r * scale)}" '
                   f'fill="none" stroke="#888" stroke-width="1"{dash}/>')
    for z in points:
        out.append(f'<circle cx="{sx(z.real)}" cy="{sy(z.imag)}" r="2.2" '
                   f'fill="#1f4e9c" fill-opacity="0.85"/>')
    if title:
        out.append(f'<text x="10" y="20" font-family="monospace" '
                   f'font-size="13">{title}</text>')
    out.append("</svg>\n")
    return "\n".join(out)


def heatmap(values: np.ndarray, x_axis, y_axis, title: str = "",
            cell: int = 10) -> str:
    """Grayscale heatmap of a matrix; darker cells are smaller values.

    Infinities render as white.  values[i, j] is the cell at x_axis[i],
    y_axis[j].
    """
    vals = np.asarray(values, dtype=float)
    finite = vals[np.isfinite(vals)]
    lo = float(np.min(finite)) if finite.size else 0.0
    hi = float(np.max(finite)) if finite.size else 1.0
    span = hi - lo if hi > lo else 1.0
    nx, ny = vals.shape
    wpix, hpix = nx * cell, ny * cell
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{wpix}" '
        f'height="{hpix + 24}" viewBox="0 0 {wpix} {hpix + 24}">',
        f'<rect width="{wpix}" height="{hpix + 24}" fill="white"/>',
    ]
    for i in range(nx):
        for j in range(ny):
            v = vals[i, j]
            if not np.isfinite(v):
                continue
            g = int(235 * (v - lo) / span)
            out.append(f'<rect x="{i * cell}" y="{(ny - 1 - j) * cell}" '
                       f'width="{cell}" height="{cell}" '
                       f'fill="rgb({g},{g},{g})"/>')
    if title:
        out.append(f'<text x="4" y="{hpix + 16}" font-family="monospace" '
                   f'font-size="12">{title}</text>')
    out.append("</svg>\n")
    return "\n".join(out)
