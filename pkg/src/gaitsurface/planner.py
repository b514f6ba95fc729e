"""Closed rectangle gaits on the gait surface, biasing, and vertex extraction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .colormap import continue_branch, path_from, validate_gait_path
from .exceptions import BranchUnavailable, ValidationFailed
from .singularity import DOMAIN_SLACK, HALF_PI, GaitPoint
from .solver import Color, SolverConfig, fmt, labeled_root, residual, sign_of, solve_rear_angles

GAIT_FORMAT = "gaitsurface.gait/1"
IDENTITY = "identity"
BRANCHES = ("blue", "red", IDENTITY)


@dataclass(frozen=True)
class Gait:
    """Periodic sequence of gait points; ``alphas`` has shape ``(n, 4)``."""

    name: str
    times: np.ndarray
    alphas: np.ndarray
    period_s: float = 1.0
    closed: bool = True
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        a = np.asarray(self.alphas, dtype=float).reshape(-1, 4)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "alphas", a)
        if len(t) != len(a) or len(t) == 0:
            raise ValueError("need one time stamp per sample and at least one sample")
        if not self.period_s > 0:
            raise ValueError("period must be positive")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0) or t[-1] >= self.period_s:
            raise ValueError("sample times must start at 0, increase strictly and stay below the period")
        if not np.all(np.isfinite(a)) or np.any(np.abs(a) > HALF_PI + DOMAIN_SLACK):
            raise ValueError("tilting angles must be finite and inside [-pi/2, pi/2]")

    def __len__(self):
        return len(self.times)

    def __eq__(self, other):
        if not isinstance(other, Gait):
            return NotImplemented
        return (self.name == other.name and self.period_s == other.period_s
                and self.closed == other.closed and self.provenance == other.provenance
                and np.array_equal(self.times, other.times) and np.array_equal(self.alphas, other.alphas))

    __hash__ = None

    @property
    def points(self) -> list[GaitPoint]:
        return [GaitPoint(*map(float, row)) for row in self.alphas]

    def at(self, t: float) -> np.ndarray:
        """Gait point at time ``t`` by periodic linear interpolation."""
        t = float(t) % self.period_s
        tt = np.append(self.times, self.period_s)
        aa = np.vstack([self.alphas, self.alphas[:1]])
        return np.array([np.interp(t, tt, aa[:, k]) for k in range(4)])

    def surface_residual(self) -> np.ndarray:
        a = self.alphas
        return residual(a[:, 0], a[:, 1], a[:, 2], a[:, 3])


def constant_gait(point, n: int = 1, name: str = "constant", period_s: float = 1.0) -> Gait:
    g = GaitPoint.checked(*point)
    return Gait(name, np.arange(n) * period_s / n, np.tile(np.array(g, dtype=float), (n, 1)),
                period_s, True, {"kind": "constant"})


@dataclass(frozen=True)
class RectangleSpec:
    alpha1: tuple[float, float]
    alpha2: tuple[float, float]
    branch: str = "blue"
    direction: str = "ccw"
    samples: int = 128

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} range needs lo < hi")
            if lo < -HALF_PI - DOMAIN_SLACK or hi > HALF_PI + DOMAIN_SLACK:
                raise ValueError(f"{name} range leaves [-pi/2, pi/2]")
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")
        if self.direction not in ("ccw", "cw"):
            raise ValueError("direction must be 'ccw' or 'cw'")
        if self.samples < 8:
            raise ValueError("need at least 8 samples")

    def to_dict(self) -> dict:
        return {"alpha1": list(self.alpha1), "alpha2": list(self.alpha2), "branch": self.branch,
                "direction": self.direction, "samples": self.samples}


def rectangle_perimeter(spec: RectangleSpec) -> np.ndarray:
    """Front pairs at uniform times from the (min, min) corner.

    Each leg gets a whole number of samples in proportion to its length, so
    all four corners are samples; the speed is constant whenever the leg
    lengths allow it and otherwise differs between legs by rounding only.
    """
    (l1, h1), (l2, h2) = spec.alpha1, spec.alpha2
    corners = [(l1, l2), (h1, l2), (h1, h2), (l1, h2)]
    if spec.direction == "cw":
        corners = [corners[0]] + corners[:0:-1]
    corners = np.array(corners, dtype=float)
    legs = np.roll(corners, -1, axis=0) - corners
    lengths = np.hypot(legs[:, 0], legs[:, 1])
    # largest-remainder split of the samples over the legs, at least one each
    share = spec.samples * lengths / lengths.sum()
    counts = np.maximum(np.floor(share).astype(int), 1)
    while counts.sum() < spec.samples:
        counts[np.argmax(share - counts)] += 1
    while counts.sum() > spec.samples:
        counts[np.argmax(np.where(counts > 1, counts - share, -np.inf))] -= 1
    pts = [corners[k] + (np.arange(n) / n)[:, None] * legs[k] for k, n in enumerate(counts)]
    return np.vstack(pts)


def _initial_root(front, branch: str, cfg: SolverConfig):
    roots = solve_rear_angles(front, cfg)
    if branch == IDENTITY:
        for r in roots:
            if np.hypot(r.alpha3 - front[0], r.alpha4 - front[1]) <= 1e-8:
                return r
        raise BranchUnavailable(f"no identity root at {front}")
    want = Color(branch).root_type
    for r in roots:
        if r.labels == want and sign_of(r.r_value) < 0:
            return r
    raise BranchUnavailable(f"no {branch} root with R < 0 at {front}")


def rectangle_gait(spec: RectangleSpec, cfg: SolverConfig | None = None, name: str = "gait",
                   period_s: float = 1.0) -> Gait:
    """Lift a rectangle in the front plane onto the requested branch."""
    cfg = cfg or SolverConfig()
    fronts = rectangle_perimeter(spec)
    start = _initial_root(tuple(fronts[0]), spec.branch, cfg)
    # continue once around and back to the start to check periodicity
    loop = np.vstack([fronts, fronts[:1]])
    roots = continue_branch(loop, start.rear, cfg)
    closing = np.hypot(roots[-1].alpha3 - roots[0].alpha3, roots[-1].alpha4 - roots[0].alpha4)
    if closing > 1e-8:
        raise BranchUnavailable(f"branch does not close: end differs from start by {closing:.3g} rad")
    roots = roots[:-1]

    colors = None
    if spec.branch != IDENTITY:
        color = Color(spec.branch)
        for k, r in enumerate(roots):
            if r.labels != color.root_type or sign_of(r.r_value) >= 0:
                raise BranchUnavailable(
                    f"{spec.branch} root with R < 0 unavailable at sample {k} {tuple(fronts[k])}")
        colors = color
    report = validate_gait_path(path_from(fronts, roots), closed=True, colors=colors)
    if not report.valid:
        raise ValidationFailed(report)

    alphas = np.column_stack([fronts, [[r.alpha3, r.alpha4] for r in roots]])
    times = np.arange(spec.samples) * period_s / spec.samples
    return Gait(name, times, alphas, period_s, True, {"kind": "rectangle", "spec": spec.to_dict()})


def bias_gait(g: Gait, eta: float, name: str | None = None) -> Gait:
    """Scale the rear angles by ``eta``; the front angles are kept bit-for-bit."""
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    alphas = g.alphas.copy()
    alphas[:, 2:] *= eta
    return Gait(name or f"{g.name}-biased", g.times.copy(), alphas, g.period_s, g.closed,
                {"kind": "bias", "source": g.name, "eta": eta})


def gait_vertices(g: Gait, tol: float = 1e-9) -> list[GaitPoint]:
    """Samples at which every component attains its per-period extremum."""
    a = g.alphas
    lo, hi = a.min(axis=0), a.max(axis=0)
    at_ext = (np.abs(a - lo) <= tol) | (np.abs(a - hi) <= tol)
    hits = a[np.all(at_ext, axis=1)]
    uniq = sorted({tuple(map(float, row)) for row in hits})
    return [GaitPoint(*v) for v in uniq]


def label_gait(g: Gait, cfg: SolverConfig | None = None):
    """Path samples (front pair + labelled root) for validating a stored gait."""
    cfg = cfg or SolverConfig()
    a = g.alphas
    return path_from(a[:, :2], [labeled_root(tuple(r[:2]), r[2:], cfg) for r in a])


# --------------------------------------------------------------------------
# gait files


def gait_to_dict(g: Gait) -> dict:
    return {
        "format": GAIT_FORMAT,
        "name": g.name,
        "period_s": fmt(g.period_s),
        "closed": g.closed,
        "samples": [{"t": fmt(t), "alpha": [fmt(x) for x in row]} for t, row in zip(g.times, g.alphas)],
        "provenance": g.provenance,
    }


def gait_from_dict(data: dict) -> Gait:
    samples = data["samples"]
    return Gait(
        name=data.get("name", "gait"),
        times=np.array([s["t"] for s in samples], dtype=float),
        alphas=np.array([s["alpha"] for s in samples], dtype=float),
        period_s=float(data.get("period_s", 1.0)),
        closed=bool(data.get("closed", True)),
        provenance=data.get("provenance", {}),
    )


def write_gait(g: Gait, path) -> None:
    Path(path).write_text(json.dumps(gait_to_dict(g), indent=1) + "\n", encoding="utf-8")


def read_gait(path) -> Gait:
    return gait_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# --------------------------------------------------------------------------
# the four example gaits

PI = math.pi
REFERENCE_GAITS = {
    "gait1": RectangleSpec((PI / 16, 5 * PI / 16), (PI / 8, 3 * PI / 8), "blue"),
    "gait2": RectangleSpec((PI / 8, 3 * PI / 8), (-3 * PI / 8, -PI / 8), "blue"),
    "gait3": RectangleSpec((PI / 8, 3 * PI / 8), (-3 * PI / 8, -PI / 8), "red"),
    "gait4": RectangleSpec((-3 * PI / 8, -PI / 8), (PI / 8, 3 * PI / 8), IDENTITY),
}
BIAS_ETA = {"gait1": 0.8, "gait2": 0.99, "gait3": 0.8, "gait4": 0.8}


def reference_gait(name: str, cfg: SolverConfig | None = None, samples: int = 128) -> Gait:
    spec = REFERENCE_GAITS[name]
    if samples != spec.samples:
        spec = RectangleSpec(spec.alpha1, spec.alpha2, spec.branch, spec.direction, samples)
    return rectangle_gait(spec, cfg, name=name)
