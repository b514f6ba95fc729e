"""Rear-angle roots of the attitude-insensitivity system and the grid atlas.

For a front pair ``(alpha1, alpha2)`` the rear angles ``(alpha3, alpha4)``
must make both first-order attitude coefficients vanish.  Roots are found
by damped Newton iteration from a dense seed grid, deduplicated, labelled
by the local slope of their solution branch and tagged with the sign of
the constant term.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import BranchLost, NoConvergence
from .singularity import DOMAIN_SLACK, HALF_PI, r_phi_terms, r_terms, r_theta_terms, rear_jacobian


class PlaneLabel(str, enum.Enum):
    PLUS = "+"
    MINUS = "-"
    INTERSECTION = "?"

    @classmethod
    def parse(cls, text: str) -> "PlaneLabel":
        # accept the typographic minus as well
        return cls("-" if text == "−" else text)

    def __str__(self) -> str:
        return self.value


class Color(str, enum.Enum):
    RED = "red"
    BLUE = "blue"

    @property
    def root_type(self):
        label = PlaneLabel.PLUS if self is Color.RED else PlaneLabel.MINUS
        return (label, label)


@dataclass(frozen=True)
class SolverConfig:
    seed_grid: int = 33
    step_tol: float = 1e-12
    residual_tol: float = 1e-10
    max_iter: int = 50
    dedup_radius: float = 1e-6
    classify_step: float = math.pi / 64
    slope_threshold: float = 0.05
    match_radius: float = 0.5

    def __post_init__(self):
        if self.seed_grid < 2:
            raise ValueError("seed_grid must be at least 2")
        for name in ("step_tol", "residual_tol", "dedup_radius", "classify_step",
                     "slope_threshold", "match_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


@dataclass(frozen=True)
class LabeledRoot:
    alpha3: float
    alpha4: float
    label3: PlaneLabel
    label4: PlaneLabel
    r_value: float
    residual: float
    issues: tuple = ()

    @property
    def rear(self) -> tuple[float, float]:
        return (self.alpha3, self.alpha4)

    @property
    def labels(self) -> tuple[PlaneLabel, PlaneLabel]:
        return (self.label3, self.label4)


def in_domain(x, slack=DOMAIN_SLACK) -> bool:
    return bool(np.all(np.abs(np.asarray(x, dtype=float)) <= HALF_PI + slack))


def check_front_pair(alpha1, alpha2) -> tuple[float, float]:
    a1, a2 = float(alpha1), float(alpha2)
    if not (math.isfinite(a1) and math.isfinite(a2)):
        raise ValueError("front pair must be finite")
    if not in_domain((a1, a2)):
        raise ValueError(f"front pair ({a1}, {a2}) outside [-pi/2, pi/2]^2")
    return a1, a2


def residual(a1, a2, a3, a4):
    """max(|R_phi|, |R_theta|), recomputed from the condition itself."""
    return np.maximum(np.abs(r_phi_terms(a1, a2, a3, a4)), np.abs(r_theta_terms(a1, a2, a3, a4)))


def wrapped_diff(a, b):
    """``a - b`` reduced to (-pi/2, pi/2]; the rear-angle zero set is pi-periodic."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return d - math.pi * np.round(d / math.pi)


def seed_points(n: int) -> np.ndarray:
    ax = np.linspace(-HALF_PI, HALF_PI, n)
    s3, s4 = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack([s3.ravel(), s4.ravel()])


def newton_batch(alpha1, alpha2, seeds, cfg: SolverConfig):
    """Damped Newton on (R_phi, R_theta) = 0 from every seed at once.

    Returns the final iterates and their max-norm residuals.
    """
    x = np.array(seeds, dtype=float, copy=True)
    a1, a2 = float(alpha1), float(alpha2)

    def system(idx, pts):
        return np.stack([r_phi_terms(a1, a2, pts[:, 0], pts[:, 1]),
                         r_theta_terms(a1, a2, pts[:, 0], pts[:, 1])], axis=-1)

    all_idx = np.arange(len(x))
    f = system(all_idx, x)
    norm = np.max(np.abs(f), axis=1)
    active = np.ones(len(x), dtype=bool)
    for _ in range(cfg.max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        jac = rear_jacobian(a1, a2, x[idx, 0], x[idx, 1])
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        ok = np.abs(det) > 1e-300
        det = np.where(ok, det, 1.0)
        fi = f[idx]
        step = np.empty_like(fi)
        step[:, 0] = (jac[:, 1, 1] * fi[:, 0] - jac[:, 0, 1] * fi[:, 1]) / det
        step[:, 1] = (-jac[:, 1, 0] * fi[:, 0] + jac[:, 0, 0] * fi[:, 1]) / det
        step[~ok] = 0.0

        lam = np.ones(idx.size)
        trial = x[idx] - step
        ftrial = system(idx, trial)
        ntrial = np.max(np.abs(ftrial), axis=1)
        # step halving on residual increase
        for _halve in range(12):
            worse = ntrial > norm[idx]
            if not worse.any():
                break
            lam[worse] *= 0.5
            w = np.nonzero(worse)[0]
            trial[w] = x[idx[w]] - lam[w, None] * step[w]
            ftrial[w] = system(idx[w], trial[w])
            ntrial[w] = np.max(np.abs(ftrial[w]), axis=1)

        # a converged iterate is not nudged by steps that fail to improve it
        keep = (ntrial >= norm[idx]) & (norm[idx] <= cfg.residual_tol)
        trial[keep] = x[idx[keep]]
        ftrial[keep] = f[idx[keep]]
        ntrial[keep] = norm[idx[keep]]
        moved = np.max(np.abs(trial - x[idx]), axis=1)
        x[idx] = trial
        f[idx] = ftrial
        norm[idx] = ntrial
        # iterates that wandered a full period away only reach out-of-domain copies
        lost = np.max(np.abs(trial), axis=1) > 2 * math.pi
        done = (~ok) | (moved < cfg.step_tol) | (ntrial == 0.0) | lost
        active[idx[done]] = False
    return x, norm


def dedup_roots(points, radius: float) -> np.ndarray:
    """Greedy clustering of candidate roots; output sorted lexicographically."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    # collapse bit-level duplicates first; keeps first occurrence (input order)
    if len(pts):
        _, first = np.unique(np.round(pts / (radius * 1e-3)), axis=0, return_index=True)
        pts = pts[np.sort(first)]
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.hypot(*(p - q)) > radius for q in kept):
            kept.append(p)
    if not kept:
        return np.empty((0, 2))
    out = np.array(kept)
    order = np.lexsort((out[:, 1], out[:, 0]))
    return out[order]


def find_rear_roots(alpha1, alpha2, cfg: SolverConfig | None = None) -> np.ndarray:
    """All distinct rear-angle roots in the closed square, shape ``(k, 2)``."""
    cfg = cfg or SolverConfig()
    x, _ = newton_batch(alpha1, alpha2, seed_points(cfg.seed_grid), cfg)
    res = residual(alpha1, alpha2, x[:, 0], x[:, 1])
    good = (res <= cfg.residual_tol) & np.all(np.abs(x) <= HALF_PI + DOMAIN_SLACK, axis=1)
    if not good.any():
        raise NoConvergence(f"no seed converged at ({alpha1}, {alpha2})")
    cand = x[good]
    order = np.lexsort((cand[:, 1], cand[:, 0], res[good]))
    return dedup_roots(cand[order], cfg.dedup_radius)


def _slope_label(slope: float, threshold: float) -> PlaneLabel:
    if slope > threshold:
        return PlaneLabel.PLUS
    if slope < -threshold:
        return PlaneLabel.MINUS
    return PlaneLabel.INTERSECTION


def _match(roots: np.ndarray, target, radius: float):
    if len(roots) == 0:
        return None
    d = wrapped_diff(roots, np.asarray(target)[None, :])
    dist = np.hypot(d[:, 0], d[:, 1])
    k = int(np.argmin(dist))
    if dist[k] > radius:
        return None
    return np.asarray(target) + d[k]


def _stencil(value: float, step: float):
    lo, hi = value - step, value + step
    if lo < -HALF_PI - DOMAIN_SLACK:
        return value, hi
    if hi > HALF_PI + DOMAIN_SLACK:
        return lo, value
    return lo, hi


class _NeighborRoots:
    """Roots at the perturbed front pairs used by the slope stencil."""

    def __init__(self, alpha1, alpha2, cfg: SolverConfig):
        self.cfg = cfg
        self.front = (alpha1, alpha2)
        self.a1_pts = _stencil(alpha1, cfg.classify_step)
        self.a2_pts = _stencil(alpha2, cfg.classify_step)
        self._cache = {}

    def roots_at(self, a1, a2):
        key = (a1, a2)
        if key not in self._cache:
            try:
                self._cache[key] = find_rear_roots(a1, a2, self.cfg)
            except NoConvergence:
                self._cache[key] = np.empty((0, 2))
        return self._cache[key]

    def slope(self, root, axis: int):
        """Continuation slope of rear angle ``axis`` w.r.t. its front partner."""
        a1, a2 = self.front
        pts = self.a1_pts if axis == 0 else self.a2_pts
        ends = []
        for p in pts:
            at = (p, a2) if axis == 0 else (a1, p)
            if at == (a1, a2):
                ends.append(np.asarray(root, dtype=float))
                continue
            m = _match(self.roots_at(*at), root, self.cfg.match_radius)
            if m is None:
                raise BranchLost(f"no root within {self.cfg.match_radius} rad at {at}")
            ends.append(m)
        delta = pts[1] - pts[0]
        return float(wrapped_diff(ends[1][axis], ends[0][axis]) / delta)


def classify_root(fp, root, step: float = math.pi / 64, cfg: SolverConfig | None = None):
    """Plane labels ``(label3, label4)`` from continuation slopes.

    Raises :class:`BranchLost` when a perturbed solve has no root near ``root``.
    """
    cfg = cfg or SolverConfig()
    if step != cfg.classify_step:
        cfg = SolverConfig(**{**cfg.__dict__, "classify_step": step})
    a1, a2 = check_front_pair(*fp)
    nb = _NeighborRoots(a1, a2, cfg)
    return (_slope_label(nb.slope(root, 0), cfg.slope_threshold),
            _slope_label(nb.slope(root, 1), cfg.slope_threshold))


def _label_roots(a1, a2, roots, cfg: SolverConfig) -> list[LabeledRoot]:
    nb = _NeighborRoots(a1, a2, cfg)
    out = []
    for a3, a4 in roots:
        labels, issues = [], []
        for axis in (0, 1):
            try:
                labels.append(_slope_label(nb.slope((a3, a4), axis), cfg.slope_threshold))
            except BranchLost as exc:
                labels.append(PlaneLabel.INTERSECTION)
                issues.append(f"branch lost on alpha{axis + 3}: {exc}")
        out.append(LabeledRoot(
            alpha3=float(a3), alpha4=float(a4),
            label3=labels[0], label4=labels[1],
            r_value=float(r_terms(a1, a2, a3, a4)),
            residual=float(residual(a1, a2, a3, a4)),
            issues=tuple(issues),
        ))
    return out


def solve_rear_angles(fp, cfg: SolverConfig | None = None) -> list[LabeledRoot]:
    """Every rear-angle root at front pair ``fp``, labelled and signed."""
    cfg = cfg or SolverConfig()
    a1, a2 = check_front_pair(*fp)
    return _label_roots(a1, a2, find_rear_roots(a1, a2, cfg), cfg)


# --------------------------------------------------------------------------
# grid atlas


@dataclass(frozen=True)
class AtlasPoint:
    i: int
    j: int
    alpha1: float
    alpha2: float
    roots: tuple
    error: str | None = None

    @property
    def count(self) -> int:
        return len(self.roots)


@dataclass
class SurfaceAtlas:
    grid_n: int
    spacing_rad: float
    points: list = field(default_factory=list)

    def point(self, i: int, j: int) -> AtlasPoint:
        return self.points[(i - 1) * self.grid_n + (j - 1)]

    def counts(self) -> np.ndarray:
        """Root counts, indexed ``[i-1, j-1]`` (i along alpha1)."""
        c = np.zeros((self.grid_n, self.grid_n), dtype=int)
        for p in self.points:
            c[p.i - 1, p.j - 1] = p.count
        return c


def grid_axis(n: int = 17) -> np.ndarray:
    if n < 2:
        raise ValueError("grid needs at least 2 nodes per axis")
    spacing = math.pi / (n - 1)
    return np.array([-HALF_PI + k * spacing for k in range(n)])


def _solve_point(args):
    i, j, a1, a2, cfg = args
    try:
        roots = tuple(solve_rear_angles((a1, a2), cfg))
        return AtlasPoint(i, j, a1, a2, roots)
    except NoConvergence as exc:
        return AtlasPoint(i, j, a1, a2, (), error=str(exc))


def sweep_grid(cfg: SolverConfig | None = None, grid_n: int = 17, jobs: int = 1) -> SurfaceAtlas:
    """Solve every node of the ``grid_n x grid_n`` front-pair grid."""
    cfg = cfg or SolverConfig()
    ax = grid_axis(grid_n)
    work = [(i + 1, j + 1, float(ax[i]), float(ax[j]), cfg)
            for i in range(grid_n) for j in range(grid_n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            points = list(pool.map(_solve_point, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        points = [_solve_point(w) for w in work]
    # pool.map preserves input order; sort anyway so the merge never depends on it
    points.sort(key=lambda p: (p.i, p.j))
    return SurfaceAtlas(grid_n=grid_n, spacing_rad=math.pi / (grid_n - 1), points=points)


@dataclass(frozen=True)
class ColorAvailability:
    colors: frozenset
    other_labels: tuple = ()

    @property
    def symbol(self) -> str:
        if self.colors == {Color.RED, Color.BLUE}:
            return "RB"
        if Color.RED in self.colors:
            return "R"
        if Color.BLUE in self.colors:
            return "B"
        if self.other_labels:
            return "".join(a + b for a, b in self.other_labels)
        return "."


def color_availability(roots) -> ColorAvailability:
    colors, other = set(), []
    for r in roots:
        if sign_of(r.r_value) >= 0:
            continue
        if r.labels == Color.RED.root_type:
            colors.add(Color.RED)
        elif r.labels == Color.BLUE.root_type:
            colors.add(Color.BLUE)
        else:
            other.append((r.label3.value, r.label4.value))
    return ColorAvailability(frozenset(colors), tuple(other))


def paint_map(atlas: SurfaceAtlas) -> dict:
    """Red/Blue availability among negative-R roots, keyed by ``(i, j)``."""
    return {(p.i, p.j): color_availability(p.roots) for p in atlas.points}


# --------------------------------------------------------------------------
# local branch geometry


def front_jacobian(a1, a2, a3, a4, h: float = 1e-6) -> np.ndarray:
    """d(R_phi, R_theta)/d(alpha1, alpha2) by central differences."""
    cols = []
    for da1, da2 in ((h, 0.0), (0.0, h)):
        plus = (r_phi_terms(a1 + da1, a2 + da2, a3, a4), r_theta_terms(a1 + da1, a2 + da2, a3, a4))
        minus = (r_phi_terms(a1 - da1, a2 - da2, a3, a4), r_theta_terms(a1 - da1, a2 - da2, a3, a4))
        cols.append([(p - m) / (2 * h) for p, m in zip(plus, minus)])
    return np.array(cols, dtype=float).T


def branch_slopes(fp, root) -> np.ndarray:
    """Implicit-function derivative d(alpha3, alpha4)/d(alpha1, alpha2) at a root."""
    a1, a2 = fp
    a3, a4 = root
    jr = rear_jacobian(a1, a2, a3, a4)
    jf = front_jacobian(a1, a2, a3, a4)
    return -np.linalg.solve(jr, jf)


def label_from_slopes(fp, root, cfg: SolverConfig | None = None):
    """Plane labels from the exact local branch slopes (no re-solve)."""
    cfg = cfg or SolverConfig()
    try:
        d = branch_slopes(fp, root)
    except np.linalg.LinAlgError:
        return (PlaneLabel.INTERSECTION, PlaneLabel.INTERSECTION)
    return (_slope_label(d[0, 0], cfg.slope_threshold), _slope_label(d[1, 1], cfg.slope_threshold))


def labeled_root(fp, root, cfg: SolverConfig | None = None) -> LabeledRoot:
    a1, a2 = fp
    a3, a4 = (float(v) for v in root)
    l3, l4 = label_from_slopes(fp, (a3, a4), cfg)
    return LabeledRoot(a3, a4, l3, l4, float(r_terms(a1, a2, a3, a4)), float(residual(a1, a2, a3, a4)))


# --------------------------------------------------------------------------
# comparison against the triangular regions quoted for the sweep

POSITIVE_TRIANGLE = ((-7 * math.pi / 16, 7 * math.pi / 16),
                     (-7 * math.pi / 16, -5 * math.pi / 16),
                     (5 * math.pi / 16, 7 * math.pi / 16))
NEGATIVE_TRIANGLE = ((-3 * math.pi / 8, -3 * math.pi / 8),
                     (3 * math.pi / 8, 3 * math.pi / 8),
                     (3 * math.pi / 8, -3 * math.pi / 8))
R_ZERO_TOL = 1e-12


def in_triangle(p, tri, tol: float = 1e-9) -> bool:
    (x1, y1), (x2, y2), (x3, y3) = tri
    x, y = p
    det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3)
    l1 = ((y2 - y3) * (x - x3) + (x3 - x2) * (y - y3)) / det
    l2 = ((y3 - y1) * (x - x3) + (x1 - x3) * (y - y3)) / det
    l3 = 1.0 - l1 - l2
    return min(l1, l2, l3) >= -tol


def sign_of(r: float) -> int:
    if r > R_ZERO_TOL:
        return 1
    if r < -R_ZERO_TOL:
        return -1
    return 0


def _root_record(p: AtlasPoint, r: LabeledRoot) -> dict:
    return {"i": p.i, "j": p.j, "alpha1": p.alpha1, "alpha2": p.alpha2,
            "alpha3": r.alpha3, "alpha4": r.alpha4,
            "labels": r.label3.value + r.label4.value, "r_value": r.r_value}


def triangle_report(atlas: SurfaceAtlas) -> dict:
    """Where the computed sign-of-R partition departs from the quoted triangles.

    Counts are always the lengths of the accompanying lists.
    """
    sections = {}
    for name, tri, sgn in (("positive", POSITIVE_TRIANGLE, 1), ("negative", NEGATIVE_TRIANGLE, -1)):
        outside, missing, multiple = [], [], []
        inside_n = 0
        for p in atlas.points:
            inside = in_triangle((p.alpha1, p.alpha2), tri)
            signed = [r for r in p.roots if sign_of(r.r_value) == sgn]
            if inside:
                inside_n += 1
                if not signed:
                    missing.append({"i": p.i, "j": p.j, "alpha1": p.alpha1, "alpha2": p.alpha2})
                if sgn > 0 and len(signed) > 1:
                    multiple.append({"i": p.i, "j": p.j, "alpha1": p.alpha1, "alpha2": p.alpha2,
                                     "n": len(signed)})
            else:
                outside.extend(_root_record(p, r) for r in signed)
        sections[name] = {
            "triangle": [list(v) for v in tri],
            "grid_points_inside": inside_n,
            "roots_outside_triangle": outside,
            "n_roots_outside_triangle": len(outside),
            "inside_points_without_root": missing,
            "n_inside_points_without_root": len(missing),
        }
        if sgn > 0:
            sections[name]["inside_points_with_several_roots"] = multiple
            sections[name]["n_inside_points_with_several_roots"] = len(multiple)
    sections["agrees"] = all(
        s["n_roots_outside_triangle"] == 0 and s["n_inside_points_without_root"] == 0
        and s.get("n_inside_points_with_several_roots", 0) == 0
        for s in (sections["positive"], sections["negative"]))
    return sections


# --------------------------------------------------------------------------
# serialization

FLOAT_DIGITS = 12


def fmt(x: float) -> float:
    return float(f"{x:.{FLOAT_DIGITS}g}")


def atlas_to_dict(atlas: SurfaceAtlas) -> dict:
    pts = []
    for p in atlas.points:
        entry = {
            "i": p.i, "j": p.j, "alpha1": fmt(p.alpha1), "alpha2": fmt(p.alpha2),
            "roots": [{"alpha3": fmt(r.alpha3), "alpha4": fmt(r.alpha4),
                       "label3": r.label3.value, "label4": r.label4.value,
                       "r_value": fmt(r.r_value), "residual": fmt(r.residual)}
                      for r in p.roots],
        }
        if p.error:
            entry["error"] = p.error
        issues = [msg for r in p.roots for msg in r.issues]
        if issues:
            entry["issues"] = issues
        pts.append(entry)
    return {"grid_n": atlas.grid_n, "spacing_rad": fmt(atlas.spacing_rad), "points": pts}


def atlas_from_dict(data: dict) -> SurfaceAtlas:
    points = []
    for e in data["points"]:
        roots = tuple(
            LabeledRoot(r["alpha3"], r["alpha4"], PlaneLabel.parse(r["label3"]),
                        PlaneLabel.parse(r["label4"]), r["r_value"], r["residual"])
            for r in e["roots"])
        points.append(AtlasPoint(e["i"], e["j"], e["alpha1"], e["alpha2"], roots, e.get("error")))
    return SurfaceAtlas(data["grid_n"], data["spacing_rad"], points)
