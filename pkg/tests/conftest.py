"""Shared curve factories and hypothesis configuration for the suite."""

import numpy as np
from hypothesis import HealthCheck, settings

from minhomotopy.curve import ClosedCurve

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

TWO_PI = 2.0 * np.pi


def circle_curve(n=48, r=1.0, center=(0.0, 0.0), clockwise=False):
    t = TWO_PI * np.arange(n) / n
    s = -t if clockwise else t
    pts = np.column_stack([center[0] + r * np.cos(s), center[1] + r * np.sin(s)])
    return ClosedCurve(t, pts)


def square_curve():
    return ClosedCurve.uniform([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def lemniscate_curve(n=64):
    """Figure-eight with one transverse crossing at the origin."""
    t = TWO_PI * np.arange(n) / n
    return ClosedCurve(t, np.column_stack([np.cos(t), np.sin(t) * np.cos(t)]))


def tangent_circles_curve(n=64, r1=1.0, r2=0.6):
    """Two circles meeting tangentially at the origin, traversed in sequence."""
    t = TWO_PI * np.arange(n) / n
    pts = np.empty((n, 2))
    first = t < np.pi
    s = 2.0 * t[first]
    pts[first] = np.column_stack([r1 * (1.0 - np.cos(s)), -r1 * np.sin(s)])
    s = 2.0 * t[~first]
    pts[~first] = np.column_stack([-r2 * (1.0 - np.cos(s)), r2 * np.sin(s)])
    return ClosedCurve(t, pts)


def random_selfcrossing_curve(rng, n=96):
    """Random smooth perturbation of the lemniscate.

    The perturbation is small against the strand spacing, so the transverse
    double point survives: these curves are self-intersecting by design.
    """
    t = TWO_PI * np.arange(n) / n
    x = np.cos(t)
    y = np.sin(t) * np.cos(t)
    for k in range(2, 6):
        ax, ay = rng.normal(0.0, 0.015, size=2)
        px, py = rng.uniform(0.0, TWO_PI, size=2)
        x = x + ax * np.cos(k * t + px)
        y = y + ay * np.cos(k * t + py)
    return ClosedCurve(t, np.column_stack([x, y]))
