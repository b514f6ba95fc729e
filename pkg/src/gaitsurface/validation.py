"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .singularity import DOMAIN_SLACK, HALF_PI


def _check_angles(X, n_features: int, what: str) -> np.ndarray:
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != n_features:
        raise ValueError(f"{what} need {n_features} columns, got {X.shape[1]}")
    if np.any(np.abs(X) > HALF_PI + DOMAIN_SLACK):
        raise ValueError(f"{what} must lie in [-pi/2, pi/2]")
    return X


def check_front_pairs(X) -> np.ndarray:
    """``(n, 2)`` array of ``(alpha1, alpha2)`` in the closed domain."""
    return _check_angles(X, 2, "front pairs")


def check_gait_points(X) -> np.ndarray:
    """``(n, 4)`` array of tilting-angle quadruples in the closed domain."""
    return _check_angles(X, 4, "gait points")


def check_eta(eta) -> float:
    eta = float(eta)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    return eta
