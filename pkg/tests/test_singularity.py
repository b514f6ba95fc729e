import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gaitsurface.singularity import (
    Attitude,
    GaitPoint,
    eval_full_condition,
    eval_linearized,
    eval_r,
    eval_r_phi,
    eval_r_theta,
    eval_zero_attitude,
    full_condition_terms,
    linearize,
    r_phi_terms,
    r_theta_terms,
    rear_jacobian,
)

PI = math.pi
angle = st.floats(-PI / 2, PI / 2, allow_nan=False)
gait_points = st.tuples(angle, angle, angle, angle)


def test_origin_values():
    g = (0.0, 0.0, 0.0, 0.0)
    assert eval_full_condition(g, (0.0, 0.0)) == 4.0
    assert eval_r_phi(g) == 0.0
    assert eval_r_theta(g) == 0.0
    assert eval_r(g) == 4.0
    assert eval_zero_attitude(g) == 4.0


@pytest.mark.parametrize("phi,theta", [(0.3, -0.2), (-1.2, 0.9), (1.5, 1.5), (0.0, -0.7)])
def test_zero_gait_reduces_to_cosines(phi, theta):
    expected = 4 * math.cos(phi) * math.cos(theta)
    assert eval_full_condition((0, 0, 0, 0), (phi, theta)) == pytest.approx(expected, abs=1e-15)


def test_single_surviving_terms():
    assert eval_r_phi((PI / 2, 0, 0, 0)) == pytest.approx(-1.0, abs=1e-15)
    assert eval_r_theta((0, 0, 0, PI / 2)) == pytest.approx(1.0, abs=1e-15)
    # every term of R carries a cosine
    assert eval_r((PI / 2,) * 4) == pytest.approx(0.0, abs=1e-15)


def _symbols():
    a = sp.symbols("a1:5", real=True)
    return a, [sp.sin(x) for x in a], [sp.cos(x) for x in a]


def test_identity_branch_cancels_symbolically():
    a, s, c = _symbols()
    a1, a2, a3, a4 = a
    sub = {a3: a1, a4: a2}
    # independent symbolic transcription of the first-order coefficients
    r_phi = (c[0] * c[1] * s[2] * c[3] - s[0] * c[1] * c[2] * c[3] - c[0] * s[1] * s[2] * s[3]
             + s[0] * s[1] * c[2] * s[3] + 2.88 * (c[0] * c[1] * s[2] * s[3] + c[0] * s[1] * s[2] * c[3]
                                                  - s[0] * c[1] * c[2] * s[3] - s[0] * s[1] * c[2] * c[3]))
    r_theta = (c[0] * c[1] * c[2] * s[3] - c[0] * s[1] * c[2] * c[3] - s[0] * c[1] * s[2] * s[3]
               + s[0] * s[1] * s[2] * c[3] + 2.88 * (-c[0] * c[1] * s[2] * s[3] + c[0] * s[1] * s[2] * c[3]
                                                    - s[0] * c[1] * c[2] * s[3] + s[0] * s[1] * c[2] * c[3]))
    assert sp.expand(r_phi.subs(sub)) == 0
    assert sp.expand(r_theta.subs(sub)) == 0
    # and the symbolic form agrees with the numeric transcription
    rng = np.random.default_rng(3)
    for g in rng.uniform(-PI / 2, PI / 2, (20, 4)):
        vals = dict(zip(a, g))
        assert float(r_phi.subs(vals)) == pytest.approx(eval_r_phi(g), abs=1e-12)
        assert float(r_theta.subs(vals)) == pytest.approx(eval_r_theta(g), abs=1e-12)


def test_linearization_matches_central_differences():
    rng = np.random.default_rng(4)
    g = rng.uniform(-PI / 2, PI / 2, 4)
    f = lambda p, t: eval_full_condition(g, (p, t))  # noqa: E731
    h = 1e-5
    d_phi = (f(h, 0) - f(-h, 0)) / (2 * h)
    d_theta = (f(0, h) - f(0, -h)) / (2 * h)
    t = linearize(g)
    assert d_phi == pytest.approx(t.r_phi, rel=1e-6, abs=1e-9)
    assert d_theta == pytest.approx(t.r_theta, rel=1e-6, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(angle, angle)
def test_identity_annihilation(a, b):
    assert abs(eval_r_phi((a, b, a, b))) <= 1e-12
    assert abs(eval_r_theta((a, b, a, b))) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(gait_points)
def test_zero_attitude_forms_agree(g):
    r = eval_r(g)
    assert abs(eval_zero_attitude(g) - r) <= 1e-12
    assert abs(eval_full_condition(g, (0.0, 0.0)) - r) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(gait_points, angle, angle)
def test_evaluators_are_deterministic(g, phi, theta):
    assert eval_full_condition(g, (phi, theta)) == eval_full_condition(g, (phi, theta))
    assert linearize(g) == linearize(g)


def test_linearized_model():
    assert eval_linearized((0, 0, 0, 0), (0.4, -0.3)) == 4.0
    g = (0.3, -0.5, 1.1, 0.2)
    assert eval_linearized(g, (0.0, 0.0)) == eval_r(g)


def test_linearization_error_is_second_order():
    rng = np.random.default_rng(11)
    for g in rng.uniform(-PI / 2, PI / 2, (20, 4)):
        errs = [abs(eval_full_condition(g, (h, h)) - eval_linearized(g, (h, h))) for h in (1e-2, 1e-3, 1e-4)]
        ratios = [e / h ** 2 for e, h in zip(errs, (1e-2, 1e-3, 1e-4))]
        # bounded constant, and the constant settles as h shrinks
        assert max(ratios) < 50
        assert ratios[1] == pytest.approx(ratios[2], rel=0.05, abs=1e-3)


def test_rear_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    h = 1e-6
    for a1, a2, a3, a4 in rng.uniform(-PI / 2, PI / 2, (200, 4)):
        jac = rear_jacobian(a1, a2, a3, a4)
        fd = np.array([
            [(r_phi_terms(a1, a2, a3 + h, a4) - r_phi_terms(a1, a2, a3 - h, a4)) / (2 * h),
             (r_phi_terms(a1, a2, a3, a4 + h) - r_phi_terms(a1, a2, a3, a4 - h)) / (2 * h)],
            [(r_theta_terms(a1, a2, a3 + h, a4) - r_theta_terms(a1, a2, a3 - h, a4)) / (2 * h),
             (r_theta_terms(a1, a2, a3, a4 + h) - r_theta_terms(a1, a2, a3, a4 - h)) / (2 * h)],
        ])
        np.testing.assert_allclose(jac, fd, rtol=1e-6, atol=1e-8)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(6)
    g = rng.uniform(-PI / 2, PI / 2, (50, 4))
    phi, theta = rng.uniform(-1, 1, (2, 50))
    vec = full_condition_terms(*g.T, phi, theta)
    scalar = [eval_full_condition(row, (p, t)) for row, p, t in zip(g, phi, theta)]
    np.testing.assert_array_equal(vec, scalar)


@pytest.mark.parametrize("bad", [(2.0, 0, 0, 0), (0, 0, 0, -1.6), (0, math.nan, 0, 0), (0, 0, math.inf, 0)])
def test_gait_point_domain(bad):
    with pytest.raises(ValueError):
        GaitPoint.checked(*bad)


def test_gait_point_accepts_boundary_slack():
    g = GaitPoint.checked(PI / 2 + 5e-10, -PI / 2, 0, 0)
    assert g.alpha1 == PI / 2 + 5e-10
    with pytest.raises(ValueError):
        Attitude.checked(math.nan, 0)
