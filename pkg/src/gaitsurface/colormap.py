"""Adjacency rules between root types and validation of labelled gait paths.

A rear angle may stay on its plane or pass through the intersection line
``?``; it may never hop straight from ``+`` to ``-``.  Root types combine
the rule componentwise.  :func:`continue_branch` produces paths that follow
one branch by continuation; :func:`validate_gait_path` certifies them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import BranchJump, NoConvergence, PathTooCoarse
from .singularity import DOMAIN_SLACK, HALF_PI
from .solver import (
    Color,
    LabeledRoot,
    PlaneLabel,
    SolverConfig,
    check_front_pair,
    labeled_root,
    newton_batch,
    residual,
    sign_of,
)

P, M, Q = PlaneLabel.PLUS, PlaneLabel.MINUS, PlaneLabel.INTERSECTION

ROOT_TYPES = frozenset({(P, P), (M, M), (P, Q), (Q, P), (M, Q), (Q, M), (Q, Q)})

GRID_STEP = math.pi / 16
CONTINUITY_BOUND = 10.0
SURFACE_TOL = 1e-8
JUMP_RADIUS = 0.5


def root_type(a, b=None) -> tuple[PlaneLabel, PlaneLabel]:
    """Coerce ``("+", "-")``-style input into a checked root type."""
    if b is None:
        a, b = a
    t = (PlaneLabel.parse(str(a)), PlaneLabel.parse(str(b)))
    if t not in ROOT_TYPES:
        raise ValueError(f"({t[0]}, {t[1]}) is not an admissible root type")
    return t


def label_adjacency_allowed(a, b) -> bool:
    a, b = PlaneLabel.parse(str(a)), PlaneLabel.parse(str(b))
    return a == b or Q in (a, b)


def type_adjacency_allowed(a, b) -> bool:
    a, b = root_type(a), root_type(b)
    return label_adjacency_allowed(a[0], b[0]) and label_adjacency_allowed(a[1], b[1])


@dataclass(frozen=True)
class PathSample:
    front: tuple[float, float]
    root: LabeledRoot


@dataclass(frozen=True)
class Violation:
    index: tuple[int, int]
    labels: tuple[str, ...]
    rule: str
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    closed: bool = False
    closure_ok: bool = True
    sign_constant: bool = True
    sign: int = 0
    max_jump_ratio: float = 0.0

    @property
    def valid(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "valid" if self.valid else "invalid"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "closed": self.closed,
            "closure_ok": self.closure_ok,
            "sign_constant": self.sign_constant,
            "sign": self.sign,
            "max_jump_ratio": self.max_jump_ratio,
            "violations": [
                {"index": list(v.index), "labels": list(v.labels), "rule": v.rule, "detail": v.detail}
                for v in self.violations
            ],
        }

    def summary(self) -> str:
        lines = [f"verdict: {self.verdict}",
                 f"closed: {self.closed} (closure ok: {self.closure_ok})",
                 f"sign of R constant: {self.sign_constant} (sign {self.sign:+d})",
                 f"max rear/front step ratio: {self.max_jump_ratio:.4g}"]
        for v in self.violations:
            lines.append(f"  [{v.index[0]}->{v.index[1]}] {v.rule}: {'/'.join(v.labels)} {v.detail}".rstrip())
        return "\n".join(lines)


def _type_str(r: LabeledRoot) -> str:
    return f"({r.label3.value},{r.label4.value})"


def _expand_colors(colors, n):
    if colors is None:
        return [None] * n
    if isinstance(colors, (str, Color)):
        return [Color(colors)] * n
    colors = [None if c is None else Color(c) for c in colors]
    if len(colors) != n:
        raise ValueError("need one color per sample")
    return colors


def validate_gait_path(path: Sequence[PathSample], closed: bool = True, colors=None,
                       bound: float = CONTINUITY_BOUND, max_step: float = GRID_STEP,
                       tol: float = SURFACE_TOL) -> ValidationReport:
    """Certify a labelled path against the two-color adjacency rule.

    ``colors`` is optional: one :class:`Color` for the whole path or one per
    sample.  A declared color must match the sample's root type.
    """
    n = len(path)
    if n == 0:
        raise ValueError("empty path")
    fronts = np.array([s.front for s in path], dtype=float)
    rears = np.array([s.root.rear for s in path], dtype=float)
    pairs = [(k, k + 1) for k in range(n - 1)]
    if closed and n > 1:
        pairs.append((n - 1, 0))

    for a, b in pairs:
        step = np.abs(fronts[b] - fronts[a])
        if np.any(step > max_step + 1e-12):
            raise PathTooCoarse(f"front step {step.max():.4g} rad between samples {a} and {b} "
                                f"exceeds {max_step:.4g}")

    report = ValidationReport(closed=closed)
    declared = _expand_colors(colors, n)

    for k, s in enumerate(path):
        t = (s.root.label3, s.root.label4)
        if t not in ROOT_TYPES:
            report.violations.append(Violation((k, k), (_type_str(s.root),), "root-type",
                                               "not one of the admissible types"))
        res = float(residual(s.front[0], s.front[1], s.root.alpha3, s.root.alpha4))
        if not res <= tol:
            report.violations.append(Violation((k, k), (_type_str(s.root),), "off-surface",
                                               f"residual {res:.3g}"))
        c = declared[k]
        if c is not None and t != c.root_type:
            report.violations.append(Violation((k, k), (_type_str(s.root), c.value), "color",
                                               "root type does not match declared color"))

    signs = [sign_of(float(s.root.r_value)) for s in path]
    report.sign = signs[0]
    report.sign_constant = signs[0] != 0 and all(x == signs[0] for x in signs)
    if not report.sign_constant:
        k = next((i for i, x in enumerate(signs) if x == 0 or x != signs[0]), 0)
        report.violations.append(Violation((0, k), (f"{signs[0]:+d}", f"{signs[k]:+d}"), "sign-of-R",
                                           "R must keep one strict sign along the gait"))

    worst = 0.0
    for a, b in pairs:
        ra, rb = path[a].root, path[b].root
        ok_type = type_adjacency_allowed((ra.label3, ra.label4), (rb.label3, rb.label4)) \
            if (ra.labels in ROOT_TYPES and rb.labels in ROOT_TYPES) else False
        if not ok_type:
            v = Violation((a, b), (_type_str(ra), _type_str(rb)), "adjacency",
                          "plus/minus change without an intersection state")
            report.violations.append(v)
            if (a, b) == (n - 1, 0):
                report.closure_ok = False
        dfront = float(np.hypot(*(fronts[b] - fronts[a])))
        drear = float(np.hypot(*(rears[b] - rears[a])))
        if drear > 0:
            ratio = math.inf if dfront == 0 else drear / dfront
            worst = max(worst, ratio)
            if drear > bound * dfront:
                report.violations.append(Violation((a, b), (_type_str(ra), _type_str(rb)), "continuity",
                                                   f"rear step {drear:.4g} > {bound} x front step {dfront:.4g}"))
                if (a, b) == (n - 1, 0):
                    report.closure_ok = False
    report.max_jump_ratio = worst
    return report


def _newton_from(a1, a2, seed, cfg: SolverConfig):
    x, norm = newton_batch(a1, a2, np.asarray(seed, dtype=float)[None, :], cfg)
    return x[0], float(norm[0])


def continue_branch(fronts, initial_root, cfg: SolverConfig | None = None,
                    jump_radius: float = JUMP_RADIUS) -> list[LabeledRoot]:
    """Follow one solution branch along a sequence of front pairs.

    Each sample is solved by Newton seeded with the previous sample's root.
    """
    cfg = cfg or SolverConfig()
    fronts = [check_front_pair(*f) for f in fronts]
    if not fronts:
        return []
    a1, a2 = fronts[0]
    root0 = np.asarray(initial_root, dtype=float)
    res0 = float(residual(a1, a2, *root0))
    if res0 > SURFACE_TOL:
        raise NoConvergence(f"initial root has residual {res0:.3g} at the first front pair")
    # polish the initial root so every sample carries solver-grade residuals
    root, norm = _newton_from(a1, a2, root0, cfg)
    if norm > cfg.residual_tol or np.hypot(*(root - root0)) > jump_radius:
        root = root0
    out = [labeled_root(fronts[0], root, cfg)]
    prev = root
    for k, (a1, a2) in enumerate(fronts[1:], start=1):
        x, norm = _newton_from(a1, a2, prev, cfg)
        if not norm <= cfg.residual_tol:
            raise NoConvergence(f"Newton did not converge at sample {k} {fronts[k]}")
        if np.any(np.abs(x) > HALF_PI + DOMAIN_SLACK):
            raise NoConvergence(f"branch leaves [-pi/2, pi/2]^2 at sample {k}")
        jump = float(np.hypot(*(x - prev)))
        if jump > jump_radius:
            raise BranchJump(k, jump)
        out.append(labeled_root((a1, a2), x, cfg))
        prev = x
    return out


def path_from(fronts, roots) -> list[PathSample]:
    return [PathSample(tuple(map(float, f)), r) for f, r in zip(fronts, roots)]
