"""SVG rendering of three-node eigenspaces and trajectories.

Points of a three-coordinate projective vector plot in the plane through
their last two coordinates.  The eigenspace region is rasterized by testing
span membership on a grid; exactness lives in the membership test, pixels
are presentation.
"""

from __future__ import annotations

from typing import Sequence

from .core import in_span_float
from .perron import PerronTrajectory
from .spectral import SpectralData

REGION_TOL = 1e-9
_SIZE = 640.0
_MARGIN = 40.0


def _gradient(t: float) -> str:
    # yellow (early k) to purple (late k)
    a = (250, 220, 30)
    b = (100, 10, 150)
    rgb = tuple(round(x + (y - x) * t) for x, y in zip(a, b))
    return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"


def render_eigenspace_svg(
    sd: SpectralData,
    traj: PerronTrajectory | None = None,
    grid: int = 400,
    pad: float = 1.0,
) -> str:
    """SVG with the shaded span region, circled generators, and the trajectory.

    Only three-coordinate data can be drawn (plane projection); other sizes
    are rejected.
    """
    gens = [g.to_floats() for g in sd.generators]
    if any(len(g) != 3 for g in gens) or not gens:
        raise ValueError(
            "plotting is restricted to 3-dimensional data (plane projection of TP^2)"
        )
    if grid < 2:
        raise ValueError("grid must be at least 2")
    pts = [(g[1], g[2]) for g in gens]
    tpts: list[tuple[float, float]] = []
    if traj is not None:
        tpts = [(s.point.coords[1], s.point.coords[2]) for s in traj.samples]
    # region window: generator bounding box padded by `pad`
    x_lo = min(p[0] for p in pts) - pad
    x_hi = max(p[0] for p in pts) + pad
    y_lo = min(p[1] for p in pts) - pad
    y_hi = max(p[1] for p in pts) + pad
    # canvas covers the region window plus any trajectory points
    cx_lo = min([x_lo] + [p[0] for p in tpts])
    cx_hi = max([x_hi] + [p[0] for p in tpts])
    cy_lo = min([y_lo] + [p[1] for p in tpts])
    cy_hi = max([y_hi] + [p[1] for p in tpts])

    span = max(cx_hi - cx_lo, cy_hi - cy_lo)
    scale = (_SIZE - 2 * _MARGIN) / span

    def to_px(x: float, y: float) -> tuple[float, float]:
        return (
            _MARGIN + (x - cx_lo) * scale,
            _SIZE - _MARGIN - (y - cy_lo) * scale,  # SVG y axis points down
        )

    # cells are evaluated at their lower-left lattice point; with rational
    # inputs the generators land exactly on the lattice, so degenerate
    # (segment or point shaped) regions still light up
    dx = (x_hi - x_lo) / grid
    dy = (y_hi - y_lo) / grid
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SIZE:.0f}" height="{_SIZE:.0f}" '
        f'viewBox="0 0 {_SIZE:.0f} {_SIZE:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        '<g fill="#9db8d9">',
    ]
    # region cells, run-length merged per row to keep files small
    for iy in range(grid):
        y = y_lo + iy * dy
        run_start = None
        for ix in range(grid + 1):
            inside = False
            if ix < grid:
                x = x_lo + ix * dx
                inside = in_span_float([0.0, x, y], gens, REGION_TOL)
            if inside and run_start is None:
                run_start = ix
            elif not inside and run_start is not None:
                px0, py0 = to_px(x_lo + run_start * dx, y_lo + (iy + 1) * dy)
                w = (ix - run_start) * dx * scale
                h = dy * scale
                parts.append(
                    f'<rect x="{px0:.2f}" y="{py0:.2f}" '
                    f'width="{w + 0.5:.2f}" height="{h + 0.5:.2f}"/>'
                )
                run_start = None
    parts.append("</g>")
    # trajectory: yellow to purple with growing k
    if tpts:
        parts.append("<g>")
        denom = max(len(tpts) - 1, 1)
        for rank, (x, y) in enumerate(tpts):
            px, py = to_px(x, y)
            parts.append(
                f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" '
                f'fill="{_gradient(rank / denom)}"/>'
            )
        parts.append("</g>")
    # generators circled in red
    parts.append('<g fill="none" stroke="red" stroke-width="2">')
    for x, y in pts:
        px, py = to_px(x, y)
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="8"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
