"""Explicit plane-curve coefficients for the alpha quartic and the beta circles.

For vertices ``A(a1,b1)``, ``B(a2,b2)``, ``C(a3,b3)`` and a query point
``M(x,y)``, alpha is a quartic of the form::

    k (x^2+y^2)^2 + (A1 x + B1 y)(x^2+y^2) + C1 x^2 + D1 xy + E1 y^2 + F1 x + G1 y + H1

and each beta is ``A2 (x^2+y^2) + B2 x + C2 y + D2``. Under the chordal metric
the same shapes appear as numerators over
``(1+x^2+y^2)^p * prod_i (1+a_i^2+b_i^2)^p`` with ``p = 2`` for alpha and
``p = 1`` for beta.

Coefficients are recovered numerically: the function is sampled on two
concentric circles about the coordinate origin plus the origin itself, the
least-squares system in the monomial basis is solved, and the fit is
certified by its residual at fresh random points.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_point_array, check_points, check_which
from .classifier import Triangle, alpha_values, beta_values, distance_triples
from .exceptions import DegenerateConic, IllConditionedSample, InputError
from .metrics import MetricKind

QUARTIC_NAMES = ("k", "A1", "B1", "C1", "D1", "E1", "F1", "G1", "H1")
CIRCLE_NAMES = ("A2", "B2", "C2", "D2")
_QUARTIC_DEGREES = np.array([4, 3, 3, 2, 2, 2, 1, 1, 0])
_CIRCLE_DEGREES = np.array([2, 1, 1, 0])

MAX_CONDITION = 1e12
QUARTIC_RESIDUAL_TOL = 1e-8
CIRCLE_RESIDUAL_TOL = 1e-10


def quartic_basis(x, y):
    r2 = x * x + y * y
    return np.stack([r2 * r2, x * r2, y * r2, x * x, x * y, y * y, x, y, np.ones_like(x)], axis=-1)


def circle_basis(x, y):
    return np.stack([x * x + y * y, x, y, np.ones_like(x)], axis=-1)


def _split(P):
    P = check_point_array(P, name="points")
    return P[..., 0], P[..., 1]


@dataclass(frozen=True)
class QuarticCoeffs:
    k: float
    A1: float
    B1: float
    C1: float
    D1: float
    E1: float
    F1: float
    G1: float
    H1: float

    def as_array(self):
        return np.array([getattr(self, n) for n in QUARTIC_NAMES])

    def evaluate(self, P):
        x, y = _split(P)
        return quartic_basis(x, y) @ self.as_array()

    def normalized(self):
        """Copy scaled so the largest coefficient magnitude is 1."""
        c = self.as_array()
        return QuarticCoeffs(*map(float, c / np.max(np.abs(c))))

    def to_dict(self):
        return {n: float(getattr(self, n)) for n in QUARTIC_NAMES}


@dataclass(frozen=True)
class CircleCoeffs:
    A2: float
    B2: float
    C2: float
    D2: float

    def as_array(self):
        return np.array([self.A2, self.B2, self.C2, self.D2])

    def evaluate(self, P):
        x, y = _split(P)
        return circle_basis(x, y) @ self.as_array()

    @property
    def nonempty(self):
        """Whether ``beta = 0`` is a genuine circle (``B2^2 + C2^2 > 4 A2 D2``)."""
        return self.A2 != 0.0 and self.B2**2 + self.C2**2 > 4.0 * self.A2 * self.D2

    def normalized(self):
        c = self.as_array()
        return CircleCoeffs(*map(float, c / np.max(np.abs(c))))

    def to_dict(self):
        return {n: float(getattr(self, n)) for n in CIRCLE_NAMES}


@dataclass(frozen=True)
class ChordalCurveCoeffs:
    """Chordal alpha or beta as ``numerator(x, y) / denominator(x, y)``.

    ``denominator = (1+x^2+y^2)^power * vertex_factor`` where
    ``vertex_factor = prod_i (1+a_i^2+b_i^2)^power``.
    """

    numerator: Union[QuarticCoeffs, CircleCoeffs]
    power: int
    vertex_factor: float
    degenerate: bool

    def denominator(self, P):
        x, y = _split(P)
        return (1.0 + x * x + y * y) ** self.power * self.vertex_factor

    def evaluate(self, P):
        return self.numerator.evaluate(P) / self.denominator(P)

    def to_dict(self):
        return {
            "numerator": self.numerator.to_dict(),
            "numerator_normalized": self.numerator.normalized().to_dict(),
            "denominator": {
                "form": f"(1+x^2+y^2)^{self.power} * prod_i (1+a_i^2+b_i^2)^{self.power}",
                "power": self.power,
                "vertex_factor": self.vertex_factor,
            },
            "degenerate": self.degenerate,
        }


@dataclass
class FitCertificate:
    """How well an interpolated polynomial reproduces its target function."""

    residual: float
    condition_number: float
    attempts: int
    n_nodes: int
    n_check: int
    seed: int

    def to_dict(self):
        return dict(self.__dict__)


def _nodes(scale, n_per_circle, rng):
    nodes = [np.zeros((1, 2))]
    for radius in (1.0, 2.0):
        theta = rng.uniform(0, 2 * np.pi) + 2 * np.pi * np.arange(n_per_circle) / n_per_circle
        theta = theta + rng.uniform(-0.15, 0.15, n_per_circle) * (2 * np.pi / n_per_circle)
        nodes.append(radius * np.column_stack([np.cos(theta), np.sin(theta)]))
    return scale * np.vstack(nodes)


def interpolate_polynomial(func, basis, degrees, scale, n_per_circle=12, n_check=100, seed=0, max_attempts=5):
    """Fit ``func`` (vectorised over ``(n, 2)`` points) in the monomial ``basis``.

    Nodes are the origin plus ``n_per_circle`` jittered points on each of the
    circles of radius ``scale`` and ``2 * scale``. The system is solved in the
    coordinates ``u = x / scale`` so its columns are of comparable size.

    Returns ``(coefficients, FitCertificate)``. The residual is
    ``max |p - func| / max |func|`` over ``n_check`` fresh uniform points in the
    square ``[-2 scale, 2 scale]^2``.

    Raises
    ------
    IllConditionedSample
        If the scaled matrix condition number stays above 1e12 for every attempt.
    """
    rng = np.random.default_rng(seed)
    n_unknowns = len(degrees)
    if 1 + 2 * n_per_circle < n_unknowns:
        raise InputError("too few interpolation nodes for the basis")
    for attempt in range(1, max_attempts + 1):
        nodes = _nodes(scale, n_per_circle, rng)
        U = nodes / scale
        V = basis(U[:, 0], U[:, 1])
        cond = float(np.linalg.cond(V))
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            continue
        values = np.asarray(func(nodes), dtype=float)
        scaled, *_ = np.linalg.lstsq(V, values, rcond=None)
        coeffs = scaled / scale ** degrees.astype(float)

        check = rng.uniform(-2 * scale, 2 * scale, size=(n_check, 2))
        Vc = basis(check[:, 0] / scale, check[:, 1] / scale)
        target = np.asarray(func(check), dtype=float)
        ref = np.max(np.abs(target))
        err = np.max(np.abs(Vc @ scaled - target))
        residual = float(err / ref) if ref > 0 else float(err)
        cert = FitCertificate(
            residual=residual, condition_number=cond, attempts=attempt,
            n_nodes=len(nodes), n_check=n_check, seed=seed,
        )
        return coeffs, cert
    raise IllConditionedSample(f"interpolation matrix singular after {max_attempts} attempts")


def _scale_for(t):
    return max(1.0, float(np.max(np.hypot(*t.vertices.T))))


def _require_metric(t, metric):
    if t.metric is not metric:
        raise InputError(f"expected a {metric.value} triangle, got {t.metric.value}")


def _alpha_fn(t):
    return lambda P: alpha_values(distance_triples(t, P))[:, 0]


def _beta_fn(t, which):
    return lambda P: beta_values(distance_triples(t, P))[:, which - 1]


def _vertex_factor(t, power):
    return float(np.prod((1.0 + np.sum(t.vertices**2, axis=1)) ** power))


@dataclass
class QuarticFit:
    coeffs: Union[QuarticCoeffs, ChordalCurveCoeffs]
    certificate: FitCertificate


@dataclass
class CircleFit:
    coeffs: Union[CircleCoeffs, ChordalCurveCoeffs]
    certificate: FitCertificate


def euclidean_alpha_quartic(t, seed=0, n_per_circle=12, n_check=100):
    """Quartic coefficients of alpha under the Euclidean metric (``k`` is 3)."""
    t = _as_triangle(t, MetricKind.EUCLIDEAN)
    _require_metric(t, MetricKind.EUCLIDEAN)
    c, cert = interpolate_polynomial(
        _alpha_fn(t), quartic_basis, _QUARTIC_DEGREES, _scale_for(t), n_per_circle, n_check, seed
    )
    return QuarticFit(QuarticCoeffs(*map(float, c)), cert)


def euclidean_beta_circle(t, which=1, seed=0, n_per_circle=12, n_check=100):
    """Circle coefficients of beta_which under the Euclidean metric (``A2`` is 1)."""
    which = check_which(which)
    t = _as_triangle(t, MetricKind.EUCLIDEAN)
    _require_metric(t, MetricKind.EUCLIDEAN)
    c, cert = interpolate_polynomial(
        _beta_fn(t, which), circle_basis, _CIRCLE_DEGREES, _scale_for(t), n_per_circle, n_check, seed
    )
    return CircleFit(CircleCoeffs(*map(float, c)), cert)


def chordal_alpha_quartic(t, seed=0, n_per_circle=12, n_check=100, degenerate_rtol=1e-8):
    """Numerator coefficients of the chordal alpha over its structural denominator.

    The numerator is fitted to ``alpha(M) * denominator(M)``; a small residual
    certifies that this product is a quartic of the stated shape. The flag
    ``degenerate`` is set when ``k`` vanishes relative to the largest coefficient.
    """
    t = _as_triangle(t, MetricKind.CHORDAL)
    _require_metric(t, MetricKind.CHORDAL)
    vf = _vertex_factor(t, 2)
    alpha = _alpha_fn(t)

    def target(P):
        r2 = np.sum(P * P, axis=1)
        return alpha(P) * (1.0 + r2) ** 2 * vf

    c, cert = interpolate_polynomial(target, quartic_basis, _QUARTIC_DEGREES, _scale_for(t), n_per_circle, n_check, seed)
    num = QuarticCoeffs(*map(float, c))
    degenerate = abs(num.k) <= degenerate_rtol * np.max(np.abs(c))
    return QuarticFit(ChordalCurveCoeffs(num, 2, vf, bool(degenerate)), cert)


def chordal_beta_circle(t, which=1, seed=0, n_per_circle=12, n_check=100, degenerate_rtol=1e-10):
    t = _as_triangle(t, MetricKind.CHORDAL)
    which = check_which(which)
    _require_metric(t, MetricKind.CHORDAL)
    vf = _vertex_factor(t, 1)
    beta = _beta_fn(t, which)

    def target(P):
        return beta(P) * (1.0 + np.sum(P * P, axis=1)) * vf

    c, cert = interpolate_polynomial(target, circle_basis, _CIRCLE_DEGREES, _scale_for(t), n_per_circle, n_check, seed)
    num = CircleCoeffs(*map(float, c))
    degenerate = abs(num.A2) <= degenerate_rtol * np.max(np.abs(c))
    return CircleFit(ChordalCurveCoeffs(num, 1, vf, bool(degenerate)), cert)


def _as_triangle(t, metric):
    if isinstance(t, Triangle):
        return t
    return Triangle.from_vertices(t, metric)


@dataclass(frozen=True)
class CircleGeometry:
    kind: str  # "circle", "point" or "empty"
    center: tuple
    radius: Optional[float]
    radius_squared: float

    def to_dict(self):
        return {
            "kind": self.kind,
            "center": list(self.center),
            "radius": self.radius,
            "radius_squared": self.radius_squared,
        }


def circle_params(c, tol=1e-12):
    """Center and radius of ``A2 (x^2+y^2) + B2 x + C2 y + D2 = 0``.

    ``radius^2 = (B2^2 + C2^2 - 4 A2 D2) / (4 A2^2)``; values within
    ``tol * (|center|^2 + 1)`` of zero count as a single point.
    Chordal records are accepted and their numerator is used.
    """
    if isinstance(c, ChordalCurveCoeffs):
        if c.degenerate:
            raise DegenerateConic("chordal circle numerator has a vanishing quadratic term")
        c = c.numerator
    if not isinstance(c, CircleCoeffs):
        raise InputError("circle_params needs CircleCoeffs")
    scale = max(1.0, abs(c.B2), abs(c.C2), abs(c.D2))
    if abs(c.A2) <= tol * scale:
        raise DegenerateConic(f"A2 = {c.A2:g} is zero within tolerance; the curve is a line or empty")
    center = (float(-c.B2 / (2 * c.A2)), float(-c.C2 / (2 * c.A2)))
    r2 = (c.B2**2 + c.C2**2 - 4 * c.A2 * c.D2) / (4 * c.A2**2)
    if abs(r2) <= tol * (center[0] ** 2 + center[1] ** 2 + 1.0):
        return CircleGeometry("point", center, 0.0, float(r2))
    if r2 < 0:
        return CircleGeometry("empty", center, None, float(r2))
    return CircleGeometry("circle", center, float(np.sqrt(r2)), float(r2))


@dataclass
class CurveReport:
    metric: str
    alpha: QuarticFit
    betas: list = field(default_factory=list)
    geometry: list = field(default_factory=list)

    def to_dict(self):
        def coeffs(fit):
            return {"coefficients": fit.coeffs.to_dict(), "certificate": fit.certificate.to_dict()}

        return {
            "metric": self.metric,
            "alpha": coeffs(self.alpha),
            "betas": [dict(coeffs(b), which=i + 1, geometry=g) for i, (b, g) in enumerate(zip(self.betas, self.geometry))],
        }


class CurveCoefficientEstimator(TransformerMixin, BaseEstimator):
    """Recover the alpha quartic and the three beta circles for a triangle.

    ``fit`` takes the ``(3, 2)`` vertex array. ``transform`` evaluates the
    recovered curves at query points, giving columns
    ``(alpha, beta_1, beta_2, beta_3)``; for the chordal metric these include
    the denominators, so they match the direct distance-based values.
    """

    def __init__(self, metric="euclidean", n_per_circle=12, n_check=100, random_state=0):
        self.metric = metric
        self.n_per_circle = n_per_circle
        self.n_check = n_check
        self.random_state = random_state

    def fit(self, X, y=None):
        metric = MetricKind.parse(self.metric)
        t = Triangle.from_vertices(X, metric)
        kw = dict(seed=self.random_state, n_per_circle=self.n_per_circle, n_check=self.n_check)
        if metric is MetricKind.EUCLIDEAN:
            self.alpha_ = euclidean_alpha_quartic(t, **kw)
            self.betas_ = [euclidean_beta_circle(t, w, **kw) for w in (1, 2, 3)]
        else:
            self.alpha_ = chordal_alpha_quartic(t, **kw)
            self.betas_ = [chordal_beta_circle(t, w, **kw) for w in (1, 2, 3)]
        self.triangle_ = t
        self.geometry_ = []
        for b in self.betas_:
            try:
                self.geometry_.append(circle_params(b.coeffs).to_dict())
            except DegenerateConic as exc:
                self.geometry_.append({"kind": "degenerate", "reason": str(exc)})
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "alpha_")
        P = check_points(X)
        cols = [self.alpha_.coeffs.evaluate(P)] + [b.coeffs.evaluate(P) for b in self.betas_]
        return np.column_stack(cols)

    def report(self):
        check_is_fitted(self, "alpha_")
        return CurveReport(self.triangle_.metric.value, self.alpha_, self.betas_, self.geometry_)
