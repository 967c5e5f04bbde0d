"""Plane and sphere points, the Euclidean and chordal metrics, stereographic
projection and the Ptolemy inequality checker.

All distance functions broadcast over leading axes: points are arrays whose
last axis holds the coordinates. Passing single points returns a Python float.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from ._validation import check_point_array, check_points, check_tolerance
from .exceptions import InputError, InsufficientPoints, NorthPoleProjection

#: absolute tolerance on geometric residuals unless a caller overrides it
DEFAULT_RESIDUAL_TOL = 1e-9

NORTH_POLE = (0.0, 0.0, 1.0)
_POLE_EPS = 1e-12


class PlanePoint(NamedTuple):
    x: float
    y: float


class SpherePoint(NamedTuple):
    x: float
    y: float
    z: float


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    CHORDAL = "chordal"

    @classmethod
    def parse(cls, value):
        """Accept a member, its value, or the short CLI spelling ``euclid``."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"euclid": cls.EUCLIDEAN, "e": cls.EUCLIDEAN, "c": cls.CHORDAL}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown metric {value!r}; expected 'euclidean' or 'chordal'") from None


def _scalar_or_array(values, *inputs):
    if all(np.ndim(v) <= 1 for v in inputs):
        return float(values)
    return values


def euclidean_distance(p, q):
    """Euclidean distance ``|p - q|`` between plane points."""
    p = check_point_array(p, name="p")
    q = check_point_array(q, name="q")
    diff = p - q
    return _scalar_or_array(np.hypot(diff[..., 0], diff[..., 1]), p, q)


def chordal_distance(p, q):
    """Chordal distance ``2|p-q| / (sqrt(1+|p|^2) sqrt(1+|q|^2))``.

    This is the straight-line distance between the stereographic lifts of
    ``p`` and ``q`` on the unit sphere, so it never exceeds 2.
    """
    p = check_point_array(p, name="p")
    q = check_point_array(q, name="q")
    diff = p - q
    num = 2.0 * np.hypot(diff[..., 0], diff[..., 1])
    den = np.sqrt(1.0 + np.sum(p * p, axis=-1)) * np.sqrt(1.0 + np.sum(q * q, axis=-1))
    return _scalar_or_array(num / den, p, q)


def distance(p, q, metric=MetricKind.EUCLIDEAN):
    metric = MetricKind.parse(metric)
    if metric is MetricKind.EUCLIDEAN:
        return euclidean_distance(p, q)
    return chordal_distance(p, q)


def inverse_stereographic(s):
    """Project sphere point(s) from the north pole onto the plane.

    ``(x, y, z) -> (x / (1 - z), y / (1 - z))``.

    Raises
    ------
    NorthPoleProjection
        If any point has ``z >= 1 - 1e-12``.
    InputError
        If a point is not on the unit sphere within 1e-12.
    """
    s = check_point_array(s, dim=3, name="s")
    norm_err = np.abs(np.sum(s * s, axis=-1) - 1.0)
    if np.any(norm_err > 1e-12):
        raise InputError("sphere points must lie on the unit sphere (|s| = 1 within 1e-12)")
    z = s[..., 2]
    if np.any(z >= 1.0 - _POLE_EPS):
        raise NorthPoleProjection("the north pole (0, 0, 1) has no planar image")
    out = s[..., :2] / (1.0 - z)[..., None]
    if s.ndim == 1:
        return PlanePoint(float(out[0]), float(out[1]))
    return out


def forward_stereographic(p):
    """Lift plane point(s) onto the unit sphere; inverse of :func:`inverse_stereographic`."""
    p = check_point_array(p, name="p")
    r2 = np.sum(p * p, axis=-1)
    den = 1.0 + r2
    out = np.stack([2.0 * p[..., 0] / den, 2.0 * p[..., 1] / den, (r2 - 1.0) / den], axis=-1)
    if p.ndim == 1:
        return SpherePoint(*(float(v) for v in out))
    return out


def ptolemy_residual(x1, x2, x3, x4, metric=MetricKind.EUCLIDEAN):
    """``d(x2,x4) d(x1,x3) + d(x1,x4) d(x2,x3) - d(x1,x2) d(x3,x4)``.

    Nonnegative when the Ptolemy inequality holds for this labeling.
    """
    d = lambda u, v: distance(u, v, metric)  # noqa: E731
    return d(x2, x4) * d(x1, x3) + d(x1, x4) * d(x2, x3) - d(x1, x2) * d(x3, x4)


def ptolemy_pairing_residuals(x1, x2, x3, x4, metric=MetricKind.EUCLIDEAN):
    """Residuals for the three essential pairings, stacked on the last axis.

    Each pairing puts one of the products ``d12 d34``, ``d13 d24``, ``d14 d23``
    on the left-hand side.
    """
    d = lambda u, v: np.asarray(distance(u, v, metric))  # noqa: E731
    p12_34 = d(x1, x2) * d(x3, x4)
    p13_24 = d(x1, x3) * d(x2, x4)
    p14_23 = d(x1, x4) * d(x2, x3)
    return np.stack(
        [p13_24 + p14_23 - p12_34, p12_34 + p14_23 - p13_24, p12_34 + p13_24 - p14_23],
        axis=-1,
    )


def is_ptolemaic_quadruple(x1, x2, x3, x4, metric=MetricKind.EUCLIDEAN, tol=DEFAULT_RESIDUAL_TOL):
    """True where all three pairing residuals are ``>= -tol``."""
    tol = check_tolerance(tol)
    res = ptolemy_pairing_residuals(x1, x2, x3, x4, metric)
    ok = np.all(res >= -tol, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok


def distance_matrix(points, metric=MetricKind.EUCLIDEAN):
    P = check_points(points, name="points")
    return np.asarray(distance(P[:, None, :], P[None, :, :], metric))


@dataclass
class MetricAxiomReport:
    metric: str
    n_points: int
    tolerance: float
    symmetry_violations: list = field(default_factory=list)
    identity_violations: list = field(default_factory=list)
    triangle_violations: list = field(default_factory=list)
    n_triangle_violations: int = 0

    @property
    def violations(self):
        return self.symmetry_violations + self.identity_violations + self.triangle_violations

    @property
    def ok(self):
        return not self.violations

    def to_dict(self):
        return {
            "metric": self.metric,
            "n_points": self.n_points,
            "tolerance": self.tolerance,
            "symmetry_violations": self.symmetry_violations,
            "identity_violations": self.identity_violations,
            "triangle_violations": self.triangle_violations,
            "n_triangle_violations": self.n_triangle_violations,
            "ok": self.ok,
        }


def check_metric_axioms(points, metric=MetricKind.EUCLIDEAN, tol=DEFAULT_RESIDUAL_TOL, max_report=20):
    """Check symmetry, identity of indiscernibles and the triangle inequality.

    Every ordered pair and every triple of ``points`` is examined. At most
    ``max_report`` triangle violations are listed; the total is always counted.
    """
    P = check_points(points, name="points")
    if len(P) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(P)}")
    metric = MetricKind.parse(metric)
    tol = check_tolerance(tol)
    D = distance_matrix(P, metric)
    report = MetricAxiomReport(metric=metric.value, n_points=len(P), tolerance=tol)

    for i, j in zip(*np.nonzero(np.abs(D - D.T) > tol)):
        if i < j:
            report.symmetry_violations.append({"i": int(i), "j": int(j), "gap": float(D[i, j] - D[j, i])})
    for i in np.nonzero(np.diag(D) != 0.0)[0]:
        report.identity_violations.append({"i": int(i), "j": int(i), "distance": float(D[i, i])})
    same = np.all(P[:, None, :] == P[None, :, :], axis=-1)
    for i, j in zip(*np.nonzero((D == 0.0) & ~same)):
        if i < j:
            report.identity_violations.append({"i": int(i), "j": int(j), "distance": 0.0})

    # excess[i, j, k] = d(i,k) - d(i,j) - d(j,k)
    excess = D[:, None, :] - D[:, :, None] - D[None, :, :]
    bad = np.argwhere(excess > tol)
    report.n_triangle_violations = int(len(bad))
    for i, j, k in bad[:max_report]:
        report.triangle_violations.append(
            {"i": int(i), "j": int(j), "k": int(k), "excess": float(excess[i, j, k])}
        )
    return report

