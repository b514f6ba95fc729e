"""Singularity condition of the tilt-rotor decoupling matrix.

Every evaluator is a plain term-by-term transcription of the printed
condition.  They broadcast over numpy arrays, so ``eval_r(g)`` works on a
single :class:`GaitPoint` and the ``*_terms`` helpers work on whole grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Printed coefficients of the invertibility condition (opaque vehicle data).
K_UNIT = 1.000
K_ARM = 2.880
K_BASE = 4.000
K_FIRST = 5.592
K_CROSS = 0.9716
K_TWO = 2.000
K_SMALL = 0.1687

HALF_PI = math.pi / 2
DOMAIN_SLACK = 1e-9


class GaitPoint(NamedTuple):
    """Tilting angles (radians) of the four rotors."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float

    @classmethod
    def checked(cls, alpha1, alpha2, alpha3, alpha4) -> "GaitPoint":
        values = tuple(float(v) for v in (alpha1, alpha2, alpha3, alpha4))
        for name, v in zip(cls._fields, values):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            if abs(v) > HALF_PI + DOMAIN_SLACK:
                raise ValueError(f"{name}={v!r} outside [-pi/2, pi/2]")
        return cls(*values)


class Attitude(NamedTuple):
    """Roll ``phi`` and pitch ``theta`` in radians."""

    phi: float
    theta: float

    @classmethod
    def checked(cls, phi, theta) -> "Attitude":
        phi, theta = float(phi), float(theta)
        if not (math.isfinite(phi) and math.isfinite(theta)):
            raise ValueError("attitude must be finite")
        return cls(phi, theta)


@dataclass(frozen=True)
class LinearizedTriple:
    r_phi: float
    r_theta: float
    r: float


def _sc(alpha):
    a = np.asarray(alpha, dtype=float)
    return np.sin(a), np.cos(a)


def r_phi_terms(a1, a2, a3, a4):
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    return (
        K_UNIT * c1 * c2 * s3 * c4
        - K_UNIT * s1 * c2 * c3 * c4
        - K_UNIT * c1 * s2 * s3 * s4
        + K_UNIT * s1 * s2 * c3 * s4
        + K_ARM * c1 * c2 * s3 * s4
        + K_ARM * c1 * s2 * s3 * c4
        - K_ARM * s1 * c2 * c3 * s4
        - K_ARM * s1 * s2 * c3 * c4
    )


def r_theta_terms(a1, a2, a3, a4):
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    return (
        K_UNIT * c1 * c2 * c3 * s4
        - K_UNIT * c1 * s2 * c3 * c4
        - K_UNIT * s1 * c2 * s3 * s4
        + K_UNIT * s1 * s2 * s3 * c4
        - K_ARM * c1 * c2 * s3 * s4
        + K_ARM * c1 * s2 * s3 * c4
        - K_ARM * s1 * c2 * c3 * s4
        + K_ARM * s1 * s2 * c3 * c4
    )


def r_terms(a1, a2, a3, a4):
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    return (
        K_BASE * c1 * c2 * c3 * c4
        + K_FIRST * c1 * c2 * c3 * s4
        - K_FIRST * c1 * c2 * s3 * c4
        + K_FIRST * c1 * s2 * c3 * c4
        - K_FIRST * s1 * c2 * c3 * c4
        + K_CROSS * c1 * c2 * s3 * s4
        + K_CROSS * c1 * s2 * s3 * c4
        + K_CROSS * s1 * c2 * c3 * s4
        + K_CROSS * s1 * s2 * c3 * c4
        - K_TWO * c1 * s2 * c3 * s4
        - K_TWO * s1 * c2 * s3 * c4
        - K_SMALL * c1 * s2 * s3 * s4
        + K_SMALL * s1 * c2 * s3 * s4
        - K_SMALL * s1 * s2 * c3 * s4
        + K_SMALL * s1 * s2 * s3 * c4
    )


def zero_attitude_terms(a1, a2, a3, a4):
    # grouped exactly as printed for the zero-attitude condition
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    return (
        4.000 * c1 * c2 * c3 * c4
        + 5.592 * (+c1 * c2 * c3 * s4 - c1 * c2 * s3 * c4 + c1 * s2 * c3 * c4 - s1 * c2 * c3 * c4)
        + 0.9716 * (+c1 * c2 * s3 * s4 + c1 * s2 * s3 * c4 + s1 * c2 * c3 * s4 + s1 * s2 * c3 * c4)
        + 2.000 * (-c1 * s2 * c3 * s4 - s1 * c2 * s3 * c4)
        + 0.1687 * (-c1 * s2 * s3 * s4 + s1 * c2 * s3 * s4 - s1 * s2 * c3 * s4 + s1 * s2 * s3 * c4)
    )


def full_condition_terms(a1, a2, a3, a4, phi, theta):
    """Left side of the invertibility condition, 31 printed terms in print order."""
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    sphi, cphi = _sc(phi)
    sth, cth = _sc(theta)
    return (
        1.000 * c1 * c2 * c3 * s4 * sth
        - 1.000 * c1 * s2 * c3 * c4 * sth
        - 2.880 * c1 * c2 * s3 * s4 * sth
        + 2.880 * c1 * s2 * s3 * c4 * sth
        - 2.880 * s1 * c2 * c3 * s4 * sth
        + 2.880 * s1 * s2 * c3 * c4 * sth
        - 1.000 * s1 * c2 * s3 * s4 * sth
        + 1.000 * s1 * s2 * s3 * c4 * sth
        + 4.000 * c1 * c2 * c3 * c4 * cphi * cth
        + 5.592 * c1 * c2 * c3 * s4 * cphi * cth
        - 5.592 * c1 * c2 * s3 * c4 * cphi * cth
        + 5.592 * c1 * s2 * c3 * c4 * cphi * cth
        - 5.592 * s1 * c2 * c3 * c4 * cphi * cth
        + 1.000 * c1 * c2 * s3 * c4 * sphi * cth
        + 0.9716 * c1 * c2 * s3 * s4 * cphi * cth
        - 2.000 * c1 * s2 * c3 * s4 * cphi * cth
        + 0.9716 * c1 * s2 * s3 * c4 * cphi * cth
        - 1.000 * s1 * c2 * c3 * c4 * sphi * cth
        + 0.9716 * s1 * c2 * c3 * s4 * cphi * cth
        - 2.000 * s1 * c2 * s3 * c4 * cphi * cth
        + 0.9716 * s1 * s2 * c3 * c4 * cphi * cth
        + 2.880 * c1 * c2 * s3 * s4 * sphi * cth
        + 2.880 * c1 * s2 * s3 * c4 * sphi * cth
        - 0.1687 * c1 * s2 * s3 * s4 * cphi * cth
        - 2.880 * s1 * c2 * c3 * s4 * sphi * cth
        + 0.1687 * s1 * c2 * s3 * s4 * cphi * cth
        - 2.880 * s1 * s2 * c3 * c4 * sphi * cth
        - 0.1687 * s1 * s2 * c3 * s4 * cphi * cth
        + 0.1687 * s1 * s2 * s3 * c4 * cphi * cth
        - 1.000 * c1 * s2 * s3 * s4 * sphi * cth
        + 1.000 * s1 * s2 * c3 * s4 * sphi * cth
    )


def rear_jacobian(a1, a2, a3, a4):
    """Analytic d(R_phi, R_theta)/d(alpha3, alpha4), shape ``(..., 2, 2)``.

    Differentiating a term in alpha_i maps s_i -> c_i and c_i -> -s_i.
    """
    s1, c1 = _sc(a1)
    s2, c2 = _sc(a2)
    s3, c3 = _sc(a3)
    s4, c4 = _sc(a4)
    # d/d alpha3: s3 -> c3, c3 -> -s3
    dphi3 = (
        K_UNIT * c1 * c2 * c3 * c4
        + K_UNIT * s1 * c2 * s3 * c4
        - K_UNIT * c1 * s2 * c3 * s4
        - K_UNIT * s1 * s2 * s3 * s4
        + K_ARM * c1 * c2 * c3 * s4
        + K_ARM * c1 * s2 * c3 * c4
        + K_ARM * s1 * c2 * s3 * s4
        + K_ARM * s1 * s2 * s3 * c4
    )
    # d/d alpha4: s4 -> c4, c4 -> -s4
    dphi4 = (
        -K_UNIT * c1 * c2 * s3 * s4
        + K_UNIT * s1 * c2 * c3 * s4
        - K_UNIT * c1 * s2 * s3 * c4
        + K_UNIT * s1 * s2 * c3 * c4
        + K_ARM * c1 * c2 * s3 * c4
        - K_ARM * c1 * s2 * s3 * s4
        - K_ARM * s1 * c2 * c3 * c4
        + K_ARM * s1 * s2 * c3 * s4
    )
    dth3 = (
        -K_UNIT * c1 * c2 * s3 * s4
        + K_UNIT * c1 * s2 * s3 * c4
        - K_UNIT * s1 * c2 * c3 * s4
        + K_UNIT * s1 * s2 * c3 * c4
        - K_ARM * c1 * c2 * c3 * s4
        + K_ARM * c1 * s2 * c3 * c4
        + K_ARM * s1 * c2 * s3 * s4
        - K_ARM * s1 * s2 * s3 * c4
    )
    dth4 = (
        K_UNIT * c1 * c2 * c3 * c4
        + K_UNIT * c1 * s2 * c3 * s4
        - K_UNIT * s1 * c2 * s3 * c4
        - K_UNIT * s1 * s2 * s3 * s4
        - K_ARM * c1 * c2 * s3 * c4
        - K_ARM * c1 * s2 * s3 * s4
        - K_ARM * s1 * c2 * c3 * c4
        - K_ARM * s1 * s2 * c3 * s4
    )
    row0 = np.stack([dphi3, dphi4], axis=-1)
    row1 = np.stack([dth3, dth4], axis=-1)
    return np.stack([row0, row1], axis=-2)


def eval_full_condition(g, a) -> float:
    """Singularity condition at gait point ``g`` and attitude ``a``; zero means singular."""
    return float(full_condition_terms(*g, *a))


def eval_r_phi(g) -> float:
    return float(r_phi_terms(*g))


def eval_r_theta(g) -> float:
    return float(r_theta_terms(*g))


def eval_r(g) -> float:
    return float(r_terms(*g))


def eval_zero_attitude(g) -> float:
    """Zero-attitude condition, evaluated from its own grouped form."""
    return float(zero_attitude_terms(*g))


def linearize(g) -> LinearizedTriple:
    return LinearizedTriple(eval_r_phi(g), eval_r_theta(g), eval_r(g))


def eval_linearized(g, a) -> float:
    """First-order-in-attitude model ``R_phi*phi + R_theta*theta + R``."""
    t = linearize(g)
    phi, theta = a
    return t.r_phi * phi + t.r_theta * theta + t.r
