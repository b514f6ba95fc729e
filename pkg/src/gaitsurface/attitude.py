"""Singular attitudes in the roll-pitch square and the robustness margin.

The zero set of the full condition over ``(phi, theta)`` is traced with
marching squares (linear interpolation on cell edges, saddles split by the
sign of the cell-center average) and stitched into polylines.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .singularity import HALF_PI, full_condition_terms


@dataclass(frozen=True)
class AttitudeGrid:
    resolution: int = 401
    margin: float = 1e-6

    def __post_init__(self):
        if self.resolution < 3 or self.resolution % 2 == 0:
            raise ValueError("resolution must be odd and at least 3")
        if not 0 < self.margin < HALF_PI:
            raise ValueError("margin must lie in (0, pi/2)")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-HALF_PI + self.margin, HALF_PI - self.margin, self.resolution)

    @property
    def spacing(self) -> float:
        return (math.pi - 2 * self.margin) / (self.resolution - 1)

    def values(self, g) -> np.ndarray:
        """Condition on the grid; ``[i, j]`` is at ``(axis[i], axis[j])``."""
        ax = self.axis
        return full_condition_terms(*g, ax[:, None], ax[None, :])


# edge keys: ("h", i, j) joins node (i, j) to (i+1, j); ("v", i, j) joins (i, j) to (i, j+1)
# cell (i, j) sides in ring order: bottom, right, top, left
def _cell_edges(i, j):
    return (("v", i, j), ("h", i, j + 1), ("v", i + 1, j), ("h", i, j))


def _cell_segments(i, j, vals):
    """Segments (pairs of edge keys) crossing cell (i, j)."""
    f00, f01, f11, f10 = vals[i, j], vals[i, j + 1], vals[i + 1, j + 1], vals[i + 1, j]
    # corners in ring order matching _cell_edges: (i,j) -(v)- (i,j+1) -(h)- (i+1,j+1) -(v)- (i+1,j) -(h)- (i,j)
    corners = (f00, f01, f11, f10)
    pos = [c > 0 for c in corners]
    edges = _cell_edges(i, j)
    crossed = [k for k in range(4) if pos[k] != pos[(k + 1) % 4]]
    if len(crossed) == 2:
        return [(edges[crossed[0]], edges[crossed[1]])]
    if len(crossed) == 4:
        center_pos = (f00 + f01 + f11 + f10) / 4.0 > 0
        # join the edges around each corner whose sign differs from the center
        if pos[0] != center_pos:
            return [(edges[3], edges[0]), (edges[1], edges[2])]
        return [(edges[0], edges[1]), (edges[2], edges[3])]
    return []


def _edge_point(key, vals, ax):
    kind, i, j = key
    if kind == "h":
        f0, f1 = vals[i, j], vals[i + 1, j]
        t = f0 / (f0 - f1)
        return (ax[i] + t * (ax[i + 1] - ax[i]), ax[j])
    f0, f1 = vals[i, j], vals[i, j + 1]
    t = f0 / (f0 - f1)
    return (ax[i], ax[j] + t * (ax[j + 1] - ax[j]))


def marching_squares(vals: np.ndarray, ax: np.ndarray) -> list[np.ndarray]:
    """Zero-level polylines of ``vals`` sampled on ``ax x ax``.

    Returns ``(k, 2)`` arrays of ``(x, y)`` points with ``x = ax[i]``.
    Ordering is deterministic: open chains first, each started from its
    smallest edge key, then closed loops likewise.
    """
    vals = np.asarray(vals, dtype=float)
    pos = vals > 0
    mixed = (pos[:-1, :-1] != pos[1:, :-1]) | (pos[:-1, :-1] != pos[:-1, 1:]) | (pos[:-1, :-1] != pos[1:, 1:])
    adj: dict = {}
    for i, j in zip(*np.nonzero(mixed)):
        for a, b in _cell_segments(int(i), int(j), vals):
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
    if not adj:
        return []

    used = set()

    def walk(start):
        chain = [start]
        cur = start
        while True:
            nxt = None
            for cand in adj[cur]:
                seg = frozenset((cur, cand))
                if seg not in used:
                    nxt = cand
                    used.add(seg)
                    break
            if nxt is None:
                return chain
            chain.append(nxt)
            cur = nxt
            if cur == start:
                return chain

    lines = []
    for key in sorted(k for k, v in adj.items() if len(v) == 1):
        if any(frozenset((key, c)) not in used for c in adj[key]):
            lines.append(walk(key))
    for key in sorted(adj):
        while any(frozenset((key, c)) not in used for c in adj[key]):
            lines.append(walk(key))
    return [np.array([_edge_point(k, vals, ax) for k in chain]) for chain in lines]


@dataclass
class ContourSet:
    """Polylines of singular attitudes; ``t_indices[k]`` tags polyline ``k``."""

    polylines: list = field(default_factory=list)
    t_indices: list = field(default_factory=list)
    gait: str = ""
    sample: object = "union"
    resolution: int = 0

    def __len__(self):
        return len(self.polylines)

    @property
    def empty(self) -> bool:
        return not self.polylines

    def points(self) -> np.ndarray:
        if not self.polylines:
            return np.empty((0, 2))
        return np.vstack(self.polylines)


@dataclass(frozen=True)
class RobustnessMargin:
    value: float
    point: tuple | None = None

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.value)

    def __str__(self):
        if self.unbounded:
            return "Unbounded"
        return f"{self.value:.6f} rad at (phi, theta) = ({self.point[0]:.6f}, {self.point[1]:.6f})"


UNBOUNDED = RobustnessMargin(math.inf, None)


def singular_locus(g, grid: AttitudeGrid | None = None, name: str = "", t_index: int = 0) -> ContourSet:
    """Attitudes at which gait point ``g`` makes the decoupling matrix singular."""
    grid = grid or AttitudeGrid()
    lines = marching_squares(grid.values(g), grid.axis)
    return ContourSet(lines, [t_index] * len(lines), name, t_index, grid.resolution)


def time_sample_points(gait, time_samples: int) -> np.ndarray:
    if time_samples < 1:
        raise ValueError("need at least one time sample")
    ts = np.arange(time_samples) * gait.period_s / time_samples
    return np.array([gait.at(t) for t in ts])


def _locus_job(args):
    p, grid, name, k = args
    return singular_locus(p, grid, name, k)


def gait_singular_union(gait, time_samples: int = 64, grid: AttitudeGrid | None = None,
                        jobs: int = 1) -> ContourSet:
    """Union over the period of the per-sample singular loci."""
    grid = grid or AttitudeGrid()
    out = ContourSet(gait=gait.name, sample="union", resolution=grid.resolution)
    work = [(tuple(p), grid, gait.name, k) for k, p in enumerate(time_sample_points(gait, time_samples))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            loci = list(pool.map(_locus_job, work))
    else:
        loci = [_locus_job(w) for w in work]
    # merged in sample order whatever the schedule
    for c in loci:
        out.polylines.extend(c.polylines)
        out.t_indices.extend(c.t_indices)
    return out


def robustness_margin(c: ContourSet) -> RobustnessMargin:
    pts = c.points()
    if len(pts) == 0:
        return UNBOUNDED
    d = np.hypot(pts[:, 0], pts[:, 1])
    k = int(np.argmin(d))
    return RobustnessMargin(float(d[k]), (float(pts[k, 0]), float(pts[k, 1])))


@dataclass
class GaitComparison:
    margin_a: RobustnessMargin
    margin_b: RobustnessMargin
    contours_a: ContourSet
    contours_b: ContourSet

    @property
    def difference(self) -> float:
        a, b = self.margin_a.value, self.margin_b.value
        if math.isinf(a) and math.isinf(b):
            return 0.0
        return a - b

    def to_dict(self) -> dict:
        def m(x):
            return {"value": None if x.unbounded else x.value, "unbounded": x.unbounded,
                    "point": None if x.point is None else list(x.point)}
        return {"a": self.contours_a.gait, "b": self.contours_b.gait,
                "margin_a": m(self.margin_a), "margin_b": m(self.margin_b),
                "difference": None if math.isinf(self.difference) else self.difference,
                "a_more_robust": self.margin_a.value > self.margin_b.value}


def compare_gaits(a, b, grid: AttitudeGrid | None = None, time_samples: int = 64,
                  jobs: int = 1) -> GaitComparison:
    ca = gait_singular_union(a, time_samples, grid, jobs)
    cb = gait_singular_union(b, time_samples, grid, jobs)
    return GaitComparison(robustness_margin(ca), robustness_margin(cb), ca, cb)


# --------------------------------------------------------------------------
# output

CSV_COLUMNS = ("gait", "t_index", "polyline_id", "point_index", "phi", "theta")


def contours_to_csv(sets) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in sets:
        for pid, (line, t) in enumerate(zip(c.polylines, c.t_indices)):
            for k, (phi, theta) in enumerate(line):
                w.writerow((c.gait, t, pid, k, f"{phi:.12g}", f"{theta:.12g}"))
    return buf.getvalue()


SVG_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")


def contours_to_svg(sets, size: int = 480) -> str:
    """Static plot of the roll-pitch square, one path per polyline."""
    pad = 30
    scale = (size - 2 * pad) / math.pi

    def xy(phi, theta):
        return pad + (phi + HALF_PI) * scale, size - pad - (theta + HALF_PI) * scale

    cx, cy = xy(0.0, 0.0)
    lo, hi = pad, size - pad
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect x="{lo}" y="{lo}" width="{hi - lo}" height="{hi - lo}" fill="none" stroke="#000"/>',
           f'<line x1="{lo}" y1="{cy:.2f}" x2="{hi}" y2="{cy:.2f}" stroke="#888" stroke-dasharray="4 3"/>',
           f'<line x1="{cx:.2f}" y1="{lo}" x2="{cx:.2f}" y2="{hi}" stroke="#888" stroke-dasharray="4 3"/>',
           f'<text x="{hi}" y="{cy - 4:.2f}" text-anchor="end" font-size="12">phi</text>',
           f'<text x="{cx + 4:.2f}" y="{lo + 12}" font-size="12">theta</text>']
    for n, c in enumerate(sets):
        color = SVG_COLORS[n % len(SVG_COLORS)]
        out.append(f'<g stroke="{color}" fill="none" stroke-width="1"><title>{c.gait}</title>')
        for line in c.polylines:
            d = " ".join(("M" if k == 0 else "L") + "{:.2f},{:.2f}".format(*xy(p, t))
                         for k, (p, t) in enumerate(line))
            out.append(f'<path d="{d}"/>')
        out.append("</g>")
        out.append(f'<text x="{lo + n * 120}" y="{lo - 10}" font-size="12" fill="{color}">{c.gait}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
