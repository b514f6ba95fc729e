"""End-to-end acceptance checks, one marker per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from gaitsurface.attitude import AttitudeGrid, gait_singular_union, robustness_margin
from gaitsurface.colormap import PathSample, validate_gait_path
from gaitsurface.exceptions import BranchUnavailable
from gaitsurface.planner import RectangleSpec, bias_gait, constant_gait, label_gait, rectangle_gait
from gaitsurface.singularity import (
    eval_full_condition,
    eval_r,
    eval_r_phi,
    eval_r_theta,
    eval_zero_attitude,
    full_condition_terms,
    linearize,
    r_phi_terms,
    r_terms,
    r_theta_terms,
    zero_attitude_terms,
)
from gaitsurface.solver import (
    Color,
    PlaneLabel,
    residual,
    solve_rear_angles,
    triangle_report,
)

PI = math.pi
HALF = PI / 2


def crit(n, title):
    return pytest.mark.criterion(n, title)


# --------------------------------------------------------------------------
C1 = crit(1, "transcription integrity at 1e4 random gait points")


@C1
def test_c1_transcription_integrity():
    rng = np.random.default_rng(101)
    g = rng.uniform(-HALF, HALF, (10_000, 4))
    t0 = time.perf_counter()
    zero = zero_attitude_terms(*g.T)
    r = r_terms(*g.T)
    full = full_condition_terms(*g.T, 0.0, 0.0)
    elapsed = time.perf_counter() - t0
    assert np.max(np.abs(zero - r)) <= 1e-12
    assert np.max(np.abs(full - r)) <= 1e-12
    assert elapsed < 1.0


@C1
def test_c1_scalar_evaluators_agree():
    rng = np.random.default_rng(102)
    for row in rng.uniform(-HALF, HALF, (200, 4)):
        r = eval_r(row)
        assert abs(eval_zero_attitude(row) - r) <= 1e-12
        assert abs(eval_full_condition(row, (0.0, 0.0)) - r) <= 1e-12


# --------------------------------------------------------------------------
C2 = crit(2, "Taylor consistency of the first-order coefficients")


@C2
def test_c2_finite_differences():
    rng = np.random.default_rng(103)
    g = rng.uniform(-HALF, HALF, (1000, 4))
    h = 1e-5
    a = g.T
    d_phi = (full_condition_terms(*a, h, 0.0) - full_condition_terms(*a, -h, 0.0)) / (2 * h)
    d_theta = (full_condition_terms(*a, 0.0, h) - full_condition_terms(*a, 0.0, -h)) / (2 * h)
    for row, dp, dt in zip(g, d_phi, d_theta):
        t = linearize(row)
        # relative with a floor for coefficients that are themselves ~0
        assert abs(dp - t.r_phi) <= 1e-6 * max(abs(t.r_phi), 1.0)
        assert abs(dt - t.r_theta) <= 1e-6 * max(abs(t.r_theta), 1.0)


@C2
def test_c2_second_order_residual():
    rng = np.random.default_rng(104)
    hs = (1e-2, 1e-3, 1e-4)
    for row in rng.uniform(-HALF, HALF, (1000, 4)):
        t = linearize(row)
        errs = []
        for h in hs:
            lin = t.r + t.r_phi * h + t.r_theta * h
            errs.append(abs(eval_full_condition(row, (h, h)) - lin))
        c = [e / h ** 2 for e, h in zip(errs, hs)]
        # error/h^2 = C2 + O(h): bounded, and the gap closes with h
        assert max(c) < 50
        assert abs(c[1] - c[2]) <= 20 * hs[1], (row, c)
        assert abs(c[1] - c[2]) <= abs(c[0] - c[1]) + 1e-6, (row, c)


# --------------------------------------------------------------------------
C3 = crit(3, "identity branch annihilates and is always found")


@C3
def test_c3_identity_annihilation():
    rng = np.random.default_rng(105)
    ab = rng.uniform(-HALF, HALF, (10_000, 2))
    a, b = ab.T
    assert np.max(np.abs(r_phi_terms(a, b, a, b))) <= 1e-12
    assert np.max(np.abs(r_theta_terms(a, b, a, b))) <= 1e-12


@C3
def test_c3_identity_root_on_grid(atlas):
    for p in atlas.points:
        d = [math.hypot(r.alpha3 - p.alpha1, r.alpha4 - p.alpha2) for r in p.roots]
        assert d and min(d) <= 1e-8, (p.i, p.j)


# --------------------------------------------------------------------------
C4 = crit(4, "root-count field on the 17x17 sweep (2 / 3 / 5)")


@C4
def test_c4_root_counts(atlas_timed):
    atlas, elapsed = atlas_timed
    counts = np.array(atlas.counts())
    assert counts.shape == (17, 17)
    assert np.all(counts[1:-1, 1:-1] == 2)
    edges = np.concatenate([counts[0, 1:-1], counts[-1, 1:-1], counts[1:-1, 0], counts[1:-1, -1]])
    assert np.all(edges == 3)
    assert [counts[0, 0], counts[0, -1], counts[-1, 0], counts[-1, -1]] == [5, 5, 5, 5]
    assert elapsed < 60.0


def corner_roots_closed_form():
    # c3 (s4 - 2.88 c4) = 0 and c4 (s3 + 2.88 c3) = 0
    k = math.atan(2.88)
    return sorted([(x, y) for x in (-HALF, HALF) for y in (-HALF, HALF)] + [(-k, k)])


@C4
def test_c4_corner_closed_form(atlas):
    expected = corner_roots_closed_form()
    for a3, a4 in expected:
        assert residual(HALF, HALF, a3, a4) <= 1e-10
    got = [(r.alpha3, r.alpha4) for r in atlas.point(17, 17).roots]
    assert len(got) == len(expected)
    for (x, y), (u, v) in zip(sorted(got), expected):
        assert math.hypot(x - u, y - v) <= 1e-8


# --------------------------------------------------------------------------
C5 = crit(5, "printed gait vertices lie on the surface and are solver roots")

VERTICES = [
    (5 * PI / 16, PI / 8, -0.648, -0.727), (5 * PI / 16, 3 * PI / 8, -0.648, -1.512),
    (PI / 16, 3 * PI / 8, 0.138, -1.512), (PI / 16, PI / 8, 0.138, -0.727),
    (3 * PI / 8, -3 * PI / 8, -0.844, 0.844), (3 * PI / 8, -PI / 8, -0.844, 0.059),
    (PI / 8, -PI / 8, -0.059, 0.059), (PI / 8, -3 * PI / 8, -0.059, 0.844),
    (3 * PI / 8, -3 * PI / 8, 1.178, -1.178), (3 * PI / 8, -PI / 8, 1.178, -0.393),
    (PI / 8, -PI / 8, 0.393, -0.393), (PI / 8, -3 * PI / 8, 0.393, -1.178),
    (-PI / 8, PI / 8, -0.393, 0.393), (-PI / 8, 3 * PI / 8, -0.393, 1.178),
    (-3 * PI / 8, 3 * PI / 8, -1.178, 1.178), (-3 * PI / 8, PI / 8, -1.178, 0.393),
]


@C5
@pytest.mark.parametrize("v", VERTICES, ids=[f"v{k}" for k in range(16)])
def test_c5_vertex(v):
    assert max(abs(eval_r_phi(v)), abs(eval_r_theta(v))) <= 2e-2
    roots = solve_rear_angles(v[:2])
    assert min(math.hypot(r.alpha3 - v[2], r.alpha4 - v[3]) for r in roots) <= 5e-3


# --------------------------------------------------------------------------
C6 = crit(6, "sign of R constant along each gait (1-3 negative, 4 positive)")


@C6
@pytest.mark.parametrize("name,sign", [("gait1", -1), ("gait2", -1), ("gait3", -1), ("gait4", 1)])
def test_c6_sign_constancy(gaits, name, sign):
    g = gaits[name]
    r = r_terms(*g.alphas.T)
    assert np.all(np.sign(r) == sign)
    assert np.max(g.surface_residual()) <= 1e-8


# --------------------------------------------------------------------------
C7 = crit(7, "two-color validation of the gaits and rejection of a mixed path")


@C7
def test_c7_gait1_blue_only(gaits):
    path = label_gait(gaits["gait1"])
    assert validate_gait_path(path, colors=Color.BLUE).valid
    assert not validate_gait_path(path, colors=Color.RED).valid
    spec = RectangleSpec((PI / 16, 5 * PI / 16), (PI / 8, 3 * PI / 8), "red")
    with pytest.raises(BranchUnavailable):
        rectangle_gait(spec)


@C7
def test_c7_gait2_blue_gait3_red(gaits):
    assert validate_gait_path(label_gait(gaits["gait2"]), colors=Color.BLUE).valid
    assert validate_gait_path(label_gait(gaits["gait3"]), colors=Color.RED).valid


@C7
def test_c7_mixed_path_rejected():
    fp = (PI / 8, -PI / 4)
    roots = solve_rear_angles(fp)
    red = next(r for r in roots if r.labels == (PlaneLabel.PLUS, PlaneLabel.PLUS))
    blue = next(r for r in roots if r.labels == (PlaneLabel.MINUS, PlaneLabel.MINUS))
    fp2 = (fp[0] + PI / 64, fp[1])
    blue2 = next(r for r in solve_rear_angles(fp2) if r.labels == blue.labels)
    path = [PathSample(fp, red), PathSample(fp2, blue2)]
    report = validate_gait_path(path, closed=False)
    assert not report.valid
    assert any(v.rule == "adjacency" and v.index == (0, 1) for v in report.violations)


# --------------------------------------------------------------------------
C8 = crit(8, "robustness margins of gaits vs their biased versions")

MARGIN_CASES = [("gait1", 0.8, ">"), ("gait3", 0.8, ">"), ("gait4", 0.8, ">"), ("gait2", 0.99, ">=")]


@pytest.fixture(scope="module")
def margins(gaits):
    grid = AttitudeGrid(401)
    t0 = time.perf_counter()
    out = {}
    for name, eta, _ in MARGIN_CASES:
        g = gaits[name]
        out[name] = (robustness_margin(gait_singular_union(g, 64, grid)),
                     robustness_margin(gait_singular_union(bias_gait(g, eta), 64, grid)))
    return out, time.perf_counter() - t0


@C8
@pytest.mark.parametrize("name,eta,rel", MARGIN_CASES)
def test_c8_margin_order(margins, name, eta, rel):
    m, mb = margins[0][name]
    if rel == ">":
        assert m.value > mb.value
    else:
        assert m.value >= mb.value


@C8
def test_c8_runtime(margins):
    assert margins[1] < 120.0


# --------------------------------------------------------------------------
C9 = crit(9, "zero gait has no singular attitudes")


@C9
def test_c9_zero_gait():
    g = constant_gait((0, 0, 0, 0), n=16)
    c = gait_singular_union(g, 16, AttitudeGrid(401))
    assert c.empty
    assert robustness_margin(c).unbounded
    # dense sign check on the open square
    ax = AttitudeGrid(1001).axis
    assert np.all(full_condition_terms(0, 0, 0, 0, ax[:, None], ax[None, :]) > 0)


# --------------------------------------------------------------------------
C10 = crit(10, "triangle-claim discrepancy report")


@C10
def test_c10_triangle_report(atlas):
    rep = triangle_report(atlas)
    pos, neg = rep["positive"], rep["negative"]
    for sec in (pos, neg):
        assert sec["n_roots_outside_triangle"] == len(sec["roots_outside_triangle"])
        assert sec["n_inside_points_without_root"] == len(sec["inside_points_without_root"])
    assert pos["n_inside_points_with_several_roots"] == len(pos["inside_points_with_several_roots"])
    flagged = [r for r in pos["roots_outside_triangle"]
               if abs(r["alpha1"]) < 1e-12 and abs(r["alpha2"]) < 1e-12
               and abs(r["alpha3"]) < 1e-12 and abs(r["alpha4"]) < 1e-12]
    assert len(flagged) == 1
    assert flagged[0]["r_value"] == pytest.approx(4.0, abs=1e-12)
    assert rep["agrees"] is False
