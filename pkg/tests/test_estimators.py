import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from gaitsurface.estimators import GaitBias, LinearizedCoefficients, RearAngleSolver, SingularAttitudeAnalyzer
from gaitsurface.singularity import eval_r, eval_r_phi, eval_r_theta

PI = math.pi


def test_params_and_clone():
    est = RearAngleSolver(branch="red", seed_grid=17)
    assert est.get_params()["seed_grid"] == 17
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est
    c.set_params(branch="identity")
    assert c.branch == "identity" and est.branch == "red"


@pytest.mark.parametrize("cls", [LinearizedCoefficients, GaitBias, RearAngleSolver, SingularAttitudeAnalyzer])
def test_not_fitted(cls):
    X = np.zeros((1, 2 if cls is RearAngleSolver else 4))
    method = "predict" if cls is RearAngleSolver else "transform"
    with pytest.raises(NotFittedError):
        getattr(cls(), method)(X)


def test_linearized_coefficients():
    X = np.random.default_rng(0).uniform(-1, 1, (6, 4))
    out = LinearizedCoefficients().fit_transform(X)
    for row, (p, t, r) in zip(X, out):
        assert (p, t, r) == (eval_r_phi(row), eval_r_theta(row), eval_r(row))


def test_input_validation():
    with pytest.raises(ValueError):
        LinearizedCoefficients().fit(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        LinearizedCoefficients().fit([[2.0, 0, 0, 0]])
    with pytest.raises(ValueError):
        GaitBias(eta=1.2).fit(np.zeros((1, 4)))
    with pytest.raises(ValueError):
        RearAngleSolver(branch="green").fit([[0.0, 0.0]])


def test_pipeline_bias_then_coefficients():
    X = np.array([[5 * PI / 16, PI / 8, -0.648, -0.727]])
    pipe = make_pipeline(GaitBias(0.8), LinearizedCoefficients())
    out = pipe.fit_transform(X)
    assert out[0, 2] == eval_r((5 * PI / 16, PI / 8, -0.648 * 0.8, -0.727 * 0.8))


def test_rear_angle_solver_branches():
    X = [[5 * PI / 16, PI / 8], [-PI / 4, PI / 16]]
    blue = RearAngleSolver("blue").fit(X)
    pred = blue.predict(X)
    assert pred[0] == pytest.approx((-0.648, -0.727), abs=5e-3)
    assert len(blue.roots_) == 2
    red = RearAngleSolver("red").fit(X).predict(X)
    assert red[0] == pytest.approx(X[0], abs=1e-8)
    assert np.all(np.isnan(red[1]))
    ident = RearAngleSolver("identity").fit(X).predict(X)
    np.testing.assert_allclose(ident, X, atol=1e-8)


def test_singular_attitude_analyzer():
    X = np.array([[0, 0, 0, 0], [5 * PI / 16, PI / 8, -0.6475496599813072, -0.7268971259642274]])
    est = SingularAttitudeAnalyzer(resolution=101).fit(X)
    m = est.transform(X)
    assert m.shape == (2, 1)
    assert math.isinf(m[0, 0]) and m[1, 0] > 0.5
    assert est.margin_.value == pytest.approx(m[1, 0])
    assert set(est.contours_.t_indices) == {1}
