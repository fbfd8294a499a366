"""Grid classification of the (s, s') parameter plane.

For a fixed advection velocity V and each relative velocity u in a list,
every grid point is labelled FEASIBLE (some alpha gives a non-negative
relaxation operator), NECESSARY_ONLY (inside the necessary-condition
polytope but not feasible), or OUTSIDE.  Grids serialize to CSV and to a
self-contained SVG picture with the feasible set filled gray and the
necessary region outlined with a dotted boundary.
"""

from __future__ import annotations

import io
import numpy as np
from dataclasses import dataclass

from .stability import (GUARD_BAND, TAU_STAB, chain_bounds, necessary_slacks,
                        pinned_gamma)

FEASIBLE = "FEASIBLE"
NECESSARY_ONLY = "NECESSARY_ONLY"
OUTSIDE = "OUTSIDE"

_CLASS_NAMES = (OUTSIDE, NECESSARY_ONLY, FEASIBLE)
_CLASS_CODES = {name: code for code, name in enumerate(_CLASS_NAMES)}

CSV_HEADER = "V,u,s,s_prime,class,gamma_lower,gamma_upper"


def default_u_list(V: float) -> tuple:
    """The relative velocities conventionally scanned alongside a given V."""
    return (-2.0 * V, -V, 0.0, V / 2.0, V, 2.0 * V)


@dataclass(frozen=True)
class ScanSpec:
    """What to scan: one V, several u, and the (s, s') grid."""

    V: float
    u_list: tuple = None
    s_range: tuple = (0.0, 2.2)
    s_prime_range: tuple = (0.0, 2.2)
    s_points: int = 221
    s_prime_points: int = 221
    guard: float = GUARD_BAND

    def __post_init__(self):
        if self.u_list is None:
            object.__setattr__(self, "u_list", default_u_list(self.V))
        else:
            object.__setattr__(self, "u_list", tuple(float(u) for u in self.u_list))
        for rng, npts, name in ((self.s_range, self.s_points, "s"),
                                (self.s_prime_range, self.s_prime_points, "s_prime")):
            if npts < 2:
                raise ValueError(f"{name}_points must be >= 2, got {npts}")
            if not rng[1] > rng[0]:
                raise ValueError(f"{name}_range must be non-degenerate, got {rng}")

    def s_values(self) -> np.ndarray:
        return np.linspace(self.s_range[0], self.s_range[1], self.s_points)

    def s_prime_values(self) -> np.ndarray:
        return np.linspace(self.s_prime_range[0], self.s_prime_range[1], self.s_prime_points)


@dataclass(frozen=True)
class RegionCell:
    s: float
    s_prime: float
    classification: str
    gamma_lower: float = None
    gamma_upper: float = None


@dataclass(frozen=True)
class RegionGrid:
    """Classified grid for one (V, u) pair.

    codes[i, j] classifies (s_values[i], s_prime_values[j]); gamma_lower and
    gamma_upper hold the feasible gamma interval where codes == FEASIBLE
    (NaN elsewhere).
    """

    V: float
    u: float
    s_values: np.ndarray
    s_prime_values: np.ndarray
    codes: np.ndarray
    gamma_lower: np.ndarray
    gamma_upper: np.ndarray

    def classification(self, i: int, j: int) -> str:
        return _CLASS_NAMES[self.codes[i, j]]

    def count(self, name: str) -> int:
        return int(np.sum(self.codes == _CLASS_CODES[name]))

    def cells(self):
        """Yield RegionCell values in s-major order (s outer, s' inner)."""
        for i, s in enumerate(self.s_values):
            for j, sp in enumerate(self.s_prime_values):
                name = _CLASS_NAMES[self.codes[i, j]]
                if name == FEASIBLE:
                    yield RegionCell(float(s), float(sp), name,
                                     float(self.gamma_lower[i, j]),
                                     float(self.gamma_upper[i, j]))
                else:
                    yield RegionCell(float(s), float(sp), name)


def _classify(V, u, S, SP, tol):
    lower, upper = chain_bounds(V, u, S, SP)
    glo, ghi = lower / 2.0, upper / 2.0
    feasible = glo <= ghi + tol
    # s' = 0 pins gamma at -u*s*V; feasibility is then membership of that value
    pinned = np.broadcast_to(pinned_gamma(V, u, S), glo.shape)
    degenerate = SP == 0.0
    feasible &= ~degenerate | ((pinned >= glo - tol) & (pinned <= ghi + tol))
    necessary = necessary_slacks(V, S, SP).min(axis=-1) >= -tol
    codes = np.where(feasible, _CLASS_CODES[FEASIBLE],
                     np.where(necessary, _CLASS_CODES[NECESSARY_ONLY], _CLASS_CODES[OUTSIDE]))
    glo = np.where(feasible, glo, np.nan)
    ghi = np.where(feasible, ghi, np.nan)
    return codes.astype(np.int8), glo, ghi


def scan(spec: ScanSpec) -> list:
    """Classify the grid for every u in the spec; one RegionGrid per u."""
    s = spec.s_values()
    sp = spec.s_prime_values()
    S, SP = np.meshgrid(s, sp, indexing="ij")
    grids = []
    for u in spec.u_list:
        codes, glo, ghi = _classify(spec.V, u, S, SP, TAU_STAB)
        grids.append(RegionGrid(V=spec.V, u=float(u), s_values=s, s_prime_values=sp,
                                codes=codes, gamma_lower=glo, gamma_upper=ghi))
    return grids


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_csv(grid: RegionGrid, out) -> None:
    """Write one grid as CSV (s-major row order, 17 significant digits).

    out is a text-mode file object or a path.  Non-feasible rows leave the
    gamma fields empty.  Output is a pure function of the grid, so identical
    scans serialize byte-identically.
    """
    if not hasattr(out, "write"):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            emit_csv(grid, fh)
        return
    out.write(CSV_HEADER + "\n")
    head = _fmt(grid.V) + "," + _fmt(grid.u) + ","
    for cell in grid.cells():
        if cell.classification == FEASIBLE:
            tail = f"{cell.classification},{_fmt(cell.gamma_lower)},{_fmt(cell.gamma_upper)}"
        else:
            tail = f"{cell.classification},,"
        out.write(head + _fmt(cell.s) + "," + _fmt(cell.s_prime) + "," + tail + "\n")


def parse_csv(source) -> RegionGrid:
    """Read back a grid written by emit_csv (exact round trip)."""
    if not hasattr(source, "read"):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_csv(fh)
    lines = [ln.strip() for ln in source if ln.strip()]
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unrecognized CSV header: {lines[0]!r}")
    rows = [ln.split(",") for ln in lines[1:]]
    V, u = float(rows[0][0]), float(rows[0][1])
    s_vals = sorted({float(r[2]) for r in rows})
    sp_vals = sorted({float(r[3]) for r in rows})
    index_s = {v: i for i, v in enumerate(s_vals)}
    index_sp = {v: j for j, v in enumerate(sp_vals)}
    shape = (len(s_vals), len(sp_vals))
    codes = np.zeros(shape, np.int8)
    glo = np.full(shape, np.nan)
    ghi = np.full(shape, np.nan)
    for r in rows:
        i, j = index_s[float(r[2])], index_sp[float(r[3])]
        codes[i, j] = _CLASS_CODES[r[4]]
        if r[4] == FEASIBLE:
            glo[i, j] = float(r[5])
            ghi[i, j] = float(r[6])
    return RegionGrid(V=V, u=u, s_values=np.array(s_vals), s_prime_values=np.array(sp_vals),
                      codes=codes, gamma_lower=glo, gamma_upper=ghi)


@dataclass(frozen=True)
class SvgStyle:
    width: int = 480
    height: int = 480
    margin: int = 48
    fill: str = "#b0b0b0"
    boundary: str = "#303030"


def _merge_rectangles(mask: np.ndarray):
    """Greedy decomposition of a cell mask into axis-aligned index rectangles.

    Columns (fixed i) are split into runs of consecutive True cells; runs
    identical across adjacent columns merge horizontally, so a fully True
    mask yields a single rectangle.
    """
    rects = []
    open_runs = {}
    for i in range(mask.shape[0]):
        runs = []
        j = 0
        col = mask[i]
        while j < len(col):
            if col[j]:
                j0 = j
                while j < len(col) and col[j]:
                    j += 1
                runs.append((j0, j - 1))
            else:
                j += 1
        next_open = {}
        for run in runs:
            next_open[run] = open_runs.pop(run, i)
        for (j0, j1), i0 in open_runs.items():
            rects.append((i0, i - 1, j0, j1))
        open_runs = next_open
    for (j0, j1), i0 in open_runs.items():
        rects.append((i0, mask.shape[0] - 1, j0, j1))
    return sorted(rects)


def _boundary_segments(mask: np.ndarray):
    """Unit edges separating True cells from False/off-grid neighbors.

    Returned in half-step cell-index coordinates: each segment is
    ((i0, j0), (i1, j1)) on the dual lattice bounding cell (i, j) between
    i +- 1/2 and j +- 1/2.
    """
    segs = []
    ni, nj = mask.shape
    for i in range(ni):
        for j in range(nj):
            if not mask[i, j]:
                continue
            if i == 0 or not mask[i - 1, j]:
                segs.append(((i - 0.5, j - 0.5), (i - 0.5, j + 0.5)))
            if i == ni - 1 or not mask[i + 1, j]:
                segs.append(((i + 0.5, j - 0.5), (i + 0.5, j + 0.5)))
            if j == 0 or not mask[i, j - 1]:
                segs.append(((i - 0.5, j - 0.5), (i + 0.5, j - 0.5)))
            if j == nj - 1 or not mask[i, j + 1]:
                segs.append(((i - 0.5, j + 0.5), (i + 0.5, j + 0.5)))
    return segs


def _ticks(lo: float, hi: float):
    step = 0.5 if hi - lo > 1.0 else 0.1
    t = np.arange(np.ceil(lo / step) * step, hi + step / 2, step)
    return [round(v, 6) for v in t]


def emit_svg(grid: RegionGrid, out, style: SvgStyle = None) -> None:
    """Render one grid to a static SVG.

    FEASIBLE cells are drawn as merged gray rectangles; the boundary of the
    necessary region (feasible plus necessary-only cells) is drawn dotted;
    axes are labelled s and s'.
    """
    if not hasattr(out, "write"):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            emit_svg(grid, fh, style)
        return
    st = style or SvgStyle()
    s = grid.s_values
    sp = grid.s_prime_values
    ds = (s[-1] - s[0]) / (len(s) - 1)
    dsp = (sp[-1] - sp[0]) / (len(sp) - 1)
    # plot window covers cell footprints (half a cell beyond the end values)
    x0, x1 = s[0] - ds / 2, s[-1] + ds / 2
    y0, y1 = sp[0] - dsp / 2, sp[-1] + dsp / 2
    W = st.width - 2 * st.margin
    H = st.height - 2 * st.margin

    def px(sv):
        return st.margin + (sv - x0) / (x1 - x0) * W

    def py(spv):
        return st.margin + (y1 - spv) / (y1 - y0) * H

    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
              f'width="{st.width}" height="{st.height}" '
              f'viewBox="0 0 {st.width} {st.height}">\n')
    buf.write(f'<rect x="0" y="0" width="{st.width}" height="{st.height}" fill="white"/>\n')
    buf.write(f'<text x="{st.width / 2:.1f}" y="{st.margin / 2:.1f}" text-anchor="middle" '
              f'font-size="13">V = {grid.V:g}, u = {grid.u:g}</text>\n')

    feasible = grid.codes == _CLASS_CODES[FEASIBLE]
    for i0, i1, j0, j1 in _merge_rectangles(feasible):
        rx = px(s[i0] - ds / 2)
        ry = py(sp[j1] + dsp / 2)
        rw = px(s[i1] + ds / 2) - rx
        rh = py(sp[j0] - dsp / 2) - ry
        buf.write(f'<rect x="{rx:.2f}" y="{ry:.2f}" width="{rw:.2f}" height="{rh:.2f}" '
                  f'fill="{st.fill}" stroke="none"/>\n')

    necessary = grid.codes >= _CLASS_CODES[NECESSARY_ONLY]
    if necessary.any():
        path = []
        for (ia, ja), (ib, jb) in _boundary_segments(necessary):
            xa, ya = px(s[0] + ia * ds), py(sp[0] + ja * dsp)
            xb, yb = px(s[0] + ib * ds), py(sp[0] + jb * dsp)
            path.append(f"M {xa:.2f} {ya:.2f} L {xb:.2f} {yb:.2f}")
        buf.write(f'<path d="{" ".join(path)}" stroke="{st.boundary}" stroke-width="1" '
                  f'stroke-dasharray="2,3" fill="none"/>\n')

    # axes with ticks and labels
    ax_y = py(y0)
    ax_x = px(x0)
    buf.write(f'<line x1="{ax_x:.1f}" y1="{ax_y:.1f}" x2="{px(x1):.1f}" y2="{ax_y:.1f}" '
              f'stroke="black" stroke-width="1"/>\n')
    buf.write(f'<line x1="{ax_x:.1f}" y1="{ax_y:.1f}" x2="{ax_x:.1f}" y2="{py(y1):.1f}" '
              f'stroke="black" stroke-width="1"/>\n')
    for t in _ticks(x0, x1):
        buf.write(f'<line x1="{px(t):.1f}" y1="{ax_y:.1f}" x2="{px(t):.1f}" y2="{ax_y + 4:.1f}" '
                  f'stroke="black" stroke-width="1"/>\n')
        buf.write(f'<text x="{px(t):.1f}" y="{ax_y + 16:.1f}" text-anchor="middle" '
                  f'font-size="10">{t:g}</text>\n')
    for t in _ticks(y0, y1):
        buf.write(f'<line x1="{ax_x - 4:.1f}" y1="{py(t):.1f}" x2="{ax_x:.1f}" y2="{py(t):.1f}" '
                  f'stroke="black" stroke-width="1"/>\n')
        buf.write(f'<text x="{ax_x - 7:.1f}" y="{py(t) + 3:.1f}" text-anchor="end" '
                  f'font-size="10">{t:g}</text>\n')
    buf.write(f'<text x="{px(x1) + 4:.1f}" y="{ax_y + 4:.1f}" font-size="12" '
              f'font-style="italic">s</text>\n')
    buf.write(f'<text x="{ax_x - 4:.1f}" y="{py(y1) - 8:.1f}" font-size="12" '
              f'font-style="italic" text-anchor="end">s&#8242;</text>\n')
    buf.write("</svg>\n")
    out.write(buf.getvalue())
