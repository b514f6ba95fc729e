"""scikit-learn compatible wrappers around the solver and analyzers.

They take plain ``(n_samples, n_features)`` arrays, so gait data can flow
through pipelines, ``clone`` and ``get_params``/``set_params`` like any
other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .attitude import AttitudeGrid, ContourSet, robustness_margin, singular_locus
from .planner import BRANCHES, IDENTITY
from .singularity import r_phi_terms, r_terms, r_theta_terms
from .solver import Color, SolverConfig, sign_of, solve_rear_angles
from .validation import check_eta, check_front_pairs, check_gait_points


class LinearizedCoefficients(TransformerMixin, BaseEstimator):
    """Map gait points ``(n, 4)`` to ``[R_phi, R_theta, R]`` columns."""

    def fit(self, X, y=None):
        check_gait_points(X)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_gait_points(X)
        cols = X.T
        return np.column_stack([r_phi_terms(*cols), r_theta_terms(*cols), r_terms(*cols)])


class GaitBias(TransformerMixin, BaseEstimator):
    """Scale the rear angles (columns 2 and 3) by ``eta``."""

    def __init__(self, eta=0.8):
        self.eta = eta

    def fit(self, X, y=None):
        check_gait_points(X)
        check_eta(self.eta)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_gait_points(X).copy()
        X[:, 2:] *= check_eta(self.eta)
        return X


class RearAngleSolver(RegressorMixin, BaseEstimator):
    """Predict rear angles ``(alpha3, alpha4)`` from front pairs.

    ``branch`` picks which root is reported: ``"blue"`` or ``"red"`` for the
    (-,-) / (+,+) root with negative R, ``"identity"`` for the root equal to
    the front pair.  Points without such a root predict NaN.  ``fit`` only
    checks the configuration; ``roots_`` keeps the full labelled root lists
    of the last ``fit`` input.
    """

    def __init__(self, branch="blue", seed_grid=33, newton_tol=1e-12, residual_tol=1e-10,
                 max_iter=50, dedup_radius=1e-6):
        self.branch = branch
        self.seed_grid = seed_grid
        self.newton_tol = newton_tol
        self.residual_tol = residual_tol
        self.max_iter = max_iter
        self.dedup_radius = dedup_radius

    def _config(self):
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")
        return SolverConfig(seed_grid=self.seed_grid, step_tol=self.newton_tol,
                            residual_tol=self.residual_tol, max_iter=self.max_iter,
                            dedup_radius=self.dedup_radius)

    def fit(self, X, y=None):
        X = check_front_pairs(X)
        self.config_ = self._config()
        self.n_features_in_ = 2
        self.roots_ = [solve_rear_angles(tuple(p), self.config_) for p in X]
        return self

    def _pick(self, front, roots):
        if self.branch == IDENTITY:
            for r in roots:
                if np.hypot(r.alpha3 - front[0], r.alpha4 - front[1]) <= 1e-8:
                    return r.rear
            return (np.nan, np.nan)
        want = Color(self.branch).root_type
        for r in roots:
            if r.labels == want and sign_of(r.r_value) < 0:
                return r.rear
        return (np.nan, np.nan)

    def predict(self, X):
        check_is_fitted(self, "config_")
        X = check_front_pairs(X)
        out = np.empty((len(X), 2))
        for k, p in enumerate(X):
            out[k] = self._pick(p, solve_rear_angles(tuple(p), self.config_))
        return out


class SingularAttitudeAnalyzer(TransformerMixin, BaseEstimator):
    """Singular-attitude loci of gait points.

    ``fit`` records the union of the loci of all rows (``contours_``) and its
    margin (``margin_``); ``transform`` returns each row's own margin as a
    single column (``inf`` where the row has no singular attitude).
    """

    def __init__(self, resolution=401, margin=1e-6):
        self.resolution = resolution
        self.margin = margin

    def fit(self, X, y=None):
        X = check_gait_points(X)
        self.grid_ = AttitudeGrid(self.resolution, self.margin)
        self.n_features_in_ = 4
        self.contours_ = ContourSet(sample="union", resolution=self.resolution)
        for k, row in enumerate(X):
            c = singular_locus(tuple(row), self.grid_, t_index=k)
            self.contours_.polylines.extend(c.polylines)
            self.contours_.t_indices.extend(c.t_indices)
        self.margin_ = robustness_margin(self.contours_)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_gait_points(X)
        return np.array([[robustness_margin(singular_locus(tuple(r), self.grid_)).value] for r in X])
