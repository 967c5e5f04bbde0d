"""Classification of query points by the Mobius-Pompeiu property.

A point M has the property, relative to fixed vertices A, B, C, when its
distances ``d1 = d(M,A)``, ``d2 = d(M,B)``, ``d3 = d(M,C)`` are the sides of a
non-degenerate triangle. Two independent routes decide this:

* :func:`classify_direct` looks at the three triangle-inequality slacks
  ``d2+d3-d1``, ``d3+d1-d2``, ``d1+d2-d3`` (the *factors*);
* :func:`classify_via_theorems` only looks at the signs of the quartic
  ``alpha`` and the quadratics ``beta_i``, using the equivalence
  ``d_j + d_k <= d_i  <=>  alpha <= 0 and beta_i <= 0``.

The two routes are meant to cross-check each other.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_tolerance, check_triple_array, check_which
from .exceptions import DegenerateTriangle
from .metrics import MetricKind, PlanePoint, distance

#: relative factor for the default classification band, scaled by d1+d2+d3
DEFAULT_CLASSIFY_RTOL = 1e-12


class Verdict(IntEnum):
    NON_DEGENERATE = 0
    DEGENERATE = 1
    FAILS = 2


class RegionCode(IntEnum):
    """Per-point region labels used by :meth:`MobiusPompeiuClassifier.region_codes`
    and by the renderer."""

    MP_PROPERTY = 0
    FAILS_1 = 1
    FAILS_2 = 2
    FAILS_3 = 3
    BOUNDARY = 4


REGION_LEGEND = {
    RegionCode.MP_PROPERTY: "MP-property (non-degenerate triangle)",
    RegionCode.FAILS_1: "fails-region-1 (d2 + d3 < d1)",
    RegionCode.FAILS_2: "fails-region-2 (d3 + d1 < d2)",
    RegionCode.FAILS_3: "fails-region-3 (d1 + d2 < d3)",
    RegionCode.BOUNDARY: "boundary-band (degenerate triangle)",
}


class DistanceTriple(NamedTuple):
    d1: float
    d2: float
    d3: float


@dataclass(frozen=True)
class Triangle:
    """Three fixed plane vertices together with the metric used to measure them.

    Side lengths follow the usual convention ``a = d(B,C)``, ``b = d(C,A)``,
    ``c = d(A,B)`` and are recomputed from the vertices on access.
    """

    A: PlanePoint
    B: PlanePoint
    C: PlanePoint
    metric: MetricKind = MetricKind.EUCLIDEAN

    def __post_init__(self):
        verts = check_points([self.A, self.B, self.C], name="triangle vertices")
        if len(verts) != 3:
            raise DegenerateTriangle("a triangle needs exactly three vertices")
        object.__setattr__(self, "A", PlanePoint(*map(float, verts[0])))
        object.__setattr__(self, "B", PlanePoint(*map(float, verts[1])))
        object.__setattr__(self, "C", PlanePoint(*map(float, verts[2])))
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))
        if min(self.sides) <= 0.0:
            raise DegenerateTriangle(f"triangle vertices must be pairwise distinct, got {verts.tolist()}")

    @classmethod
    def from_vertices(cls, vertices, metric=MetricKind.EUCLIDEAN):
        verts = check_points(vertices, name="triangle vertices")
        if len(verts) != 3:
            raise DegenerateTriangle(f"expected 3 vertices, got {len(verts)}")
        return cls(PlanePoint(*verts[0]), PlanePoint(*verts[1]), PlanePoint(*verts[2]), metric)

    @property
    def vertices(self):
        return np.array([self.A, self.B, self.C], dtype=float)

    @property
    def sides(self):
        d = lambda p, q: distance(p, q, self.metric)  # noqa: E731
        return (d(self.B, self.C), d(self.C, self.A), d(self.A, self.B))


def sides(t):
    """Side lengths ``(a, b, c)`` of ``t`` under its metric."""
    a, b, c = t.sides
    if min(a, b, c) <= 0.0:
        raise DegenerateTriangle("triangle has a zero-length side")
    return a, b, c


def distance_triples(t, M):
    """Distances from each query point to A, B, C, shape ``(n, 3)``."""
    M = check_points(M, name="M")
    verts = t.vertices
    return np.asarray(distance(M[:, None, :], verts[None, :, :], t.metric))


def distance_triple(t, M):
    """``(d(M,A), d(M,B), d(M,C))`` for a single query point."""
    return DistanceTriple(*(float(v) for v in distance_triples(t, M)[0]))


def factor_values(d):
    """The three triangle-inequality slacks, stacked on the last axis."""
    d = np.asarray(d, dtype=float)
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    return np.stack([d2 + d3 - d1, d3 + d1 - d2, d1 + d2 - d3], axis=-1)


def _alpha(dp, dq, dr):
    # 4 dq^2 dr^2 - (dp^2 - (dq^2 + dr^2))^2, written for the vertex opposite dp
    return 4 * dq * dq * dr * dr - (dp * dp - (dq * dq + dr * dr)) ** 2


def _beta(dp, dq, dr):
    return dq * dq + dr * dr - dp * dp


def alpha_values(d):
    """``alpha_1``, ``alpha_2``, ``alpha_3`` each from its own defining formula."""
    d = np.asarray(d, dtype=float)
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    return np.stack([_alpha(d1, d2, d3), _alpha(d2, d3, d1), _alpha(d3, d1, d2)], axis=-1)


def beta_values(d):
    d = np.asarray(d, dtype=float)
    d1, d2, d3 = d[..., 0], d[..., 1], d[..., 2]
    return np.stack([_beta(d1, d2, d3), _beta(d2, d3, d1), _beta(d3, d1, d2)], axis=-1)


@dataclass(frozen=True)
class AlphaBetaProfile:
    alpha1: float
    factor1: float
    factor2: float
    factor3: float
    beta1: float
    beta2: float
    beta3: float

    @property
    def factors(self):
        return (self.factor1, self.factor2, self.factor3)

    @property
    def betas(self):
        return (self.beta1, self.beta2, self.beta3)

    def to_dict(self):
        return {k: float(v) for k, v in self.__dict__.items()}


def alpha_beta_profile(d, check=True):
    """alpha, the three factors and the three betas for one distance triple.

    With ``check=True`` the symmetric forms ``alpha_2`` and ``alpha_3`` are also
    evaluated and must agree with ``alpha_1`` to within 1e-12 of the scale
    ``(d1^2 + d2^2 + d3^2)^2``.
    """
    d = check_triple_array(d, name="d")
    if d.ndim != 1:
        raise ValueError("alpha_beta_profile takes a single triple; use alpha_values for batches")
    alphas = alpha_values(d)
    if check:
        scale = max(1.0, float(np.sum(d * d)) ** 2)
        spread = float(np.max(alphas) - np.min(alphas))
        if spread > 1e-12 * scale:
            raise ArithmeticError(f"alpha_1/2/3 disagree by {spread:g}")
    f = factor_values(d)
    b = beta_values(d)
    return AlphaBetaProfile(
        alpha1=float(alphas[0]),
        factor1=float(f[0]),
        factor2=float(f[1]),
        factor3=float(f[2]),
        beta1=float(b[0]),
        beta2=float(b[1]),
        beta3=float(b[2]),
    )


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    failing_or_zero_factors: frozenset
    tolerance_used: float

    def to_dict(self):
        return {
            "verdict": self.verdict.name,
            "failing_or_zero_factors": sorted(self.failing_or_zero_factors),
            "tolerance_used": self.tolerance_used,
        }


def _resolve_tol(d, tol):
    tol = check_tolerance(tol)
    if tol is None:
        return DEFAULT_CLASSIFY_RTOL * np.sum(d, axis=-1)
    return np.full(d.shape[:-1], tol)


def _verdicts_from_signs(neg, pos):
    """Combine per-factor "strictly below band" / "strictly above band" masks."""
    fails = np.any(neg, axis=-1)
    nondeg = np.all(pos, axis=-1)
    verdict = np.where(fails, Verdict.FAILS, np.where(nondeg, Verdict.NON_DEGENERATE, Verdict.DEGENERATE))
    flags = np.where(fails[..., None], neg, ~pos)
    return verdict.astype(np.int8), flags


def direct_verdicts(D, tol=None):
    """Vectorised :func:`classify_direct`: returns ``(verdicts, flags, tol)``.

    ``flags[..., i]`` marks factor ``i+1`` as failing (for FAILS) or as lying in
    the degeneracy band (for DEGENERATE).
    """
    D = check_triple_array(D)
    t = _resolve_tol(D, tol)
    f = factor_values(D)
    neg = f < -t[..., None]
    pos = f > t[..., None]
    verdict, flags = _verdicts_from_signs(neg, pos)
    return verdict, flags, t


def theorem_verdicts(D, tol=None):
    """Vectorised :func:`classify_via_theorems`.

    Factor ``i`` is below ``-tol`` iff ``d_j + d_k <= d_i - tol``, which is the
    equivalence statement applied to the triple with ``d_i`` lowered by ``tol``;
    likewise factor ``i`` is above ``tol`` iff the statement fails for ``d_i``
    raised by ``tol``. Only signs of alpha and beta_i enter the decision.
    """
    D = check_triple_array(D)
    t_abs = _resolve_tol(D, tol)
    # alpha and beta are homogeneous, so their signs survive rescaling; this
    # keeps d^4 away from underflow and overflow
    scale = np.max(D, axis=-1)
    scale = np.where(scale > 0, scale, 1.0)
    D = D / scale[..., None]
    t = t_abs / scale
    neg = np.zeros(D.shape, dtype=bool)
    pos = np.zeros(D.shape, dtype=bool)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        di, dj, dk = D[..., i], D[..., j], D[..., k]
        lowered = di - t
        a_lo, b_lo = _alpha(lowered, dj, dk), _beta(lowered, dj, dk)
        neg[..., i] = (lowered >= 0) & (a_lo < 0) & (b_lo < 0)
        raised = di + t
        a_hi, b_hi = _alpha(raised, dj, dk), _beta(raised, dj, dk)
        pos[..., i] = ~((a_hi <= 0) & (b_hi <= 0))
    verdict, flags = _verdicts_from_signs(neg, pos)
    return verdict, flags, t_abs


def _single(fn, d, tol):
    d = check_triple_array(d, name="d")
    if d.ndim != 1:
        raise ValueError("expected a single distance triple")
    verdict, flags, t = fn(d, tol)
    return Classification(
        verdict=Verdict(int(verdict)),
        failing_or_zero_factors=frozenset(int(i) + 1 for i in np.nonzero(flags)[0]),
        tolerance_used=float(t),
    )


def classify_direct(d, tol=None):
    """Classify one distance triple from its three factors.

    NON_DEGENERATE when every factor exceeds ``tol``, FAILS when some factor is
    below ``-tol``, DEGENERATE otherwise. ``tol=None`` uses
    ``1e-12 * (d1 + d2 + d3)``.
    """
    return _single(direct_verdicts, d, tol)


def classify_via_theorems(d, tol=None):
    """Classify one distance triple using only the signs of alpha and beta_i."""
    return _single(theorem_verdicts, d, tol)


def region_codes_from_triples(D, tol=None):
    """Map distance triples to :class:`RegionCode` values (uint8)."""
    verdict, flags, _ = direct_verdicts(D, tol)
    failing = np.argmax(flags, axis=-1) + 1
    codes = np.where(
        verdict == Verdict.FAILS,
        failing,
        np.where(verdict == Verdict.DEGENERATE, RegionCode.BOUNDARY, RegionCode.MP_PROPERTY),
    )
    return codes.astype(np.uint8)


_NONEMPTY_CONDITIONS = {
    # which -> (side that must be dominated, the two competitors), indices into (a, b, c)
    1: (0, (1, 2)),
    2: (1, (2, 0)),
    3: (2, (0, 1)),
}


def region_nonempty(t, which, tol=0.0):
    """Whether the region ``factor_which <= 0`` contains any point.

    For a Ptolemaic metric the region for factor 1 is nonempty iff
    ``b >= a or c >= a`` (cyclically for 2 and 3). The metric is not checked
    for the Ptolemy property here; both shipped metrics have it.
    """
    which = check_which(which)
    s = sides(t)
    own, others = _NONEMPTY_CONDITIONS[which]
    return any(s[o] >= s[own] - tol for o in others)


def default_window(t, margin=0.75):
    """Bounding box of the vertices grown by ``margin`` of its extent per side."""
    v = t.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    span = np.maximum(span, 0.25 * span.max())
    lo, hi = lo - margin * span, hi + margin * span
    return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])


def search_failing_point(t, which, budget=10_000, seed=0, tol=None, window=None, chunk=100_000):
    """Look for a point M with ``factor_which(M) <= tol``.

    The two vertices other than vertex ``which`` are tried first, then up to
    ``budget - 2`` uniform samples from ``window`` (default
    :func:`default_window`). Returns a :class:`PlanePoint` or ``None``.
    ``tol=None`` uses the same scaled band as :func:`classify_direct`.
    """
    which = check_which(which)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    verts = t.vertices
    seeds = np.delete(verts, which - 1, axis=0)[: min(budget, 2)]
    hit = _first_hit(t, which, seeds, tol)
    if hit is not None:
        return hit
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = window if window is not None else default_window(t)
    remaining = budget - len(seeds)
    while remaining > 0:
        n = min(chunk, remaining)
        M = np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])
        hit = _first_hit(t, which, M, tol)
        if hit is not None:
            return hit
        remaining -= n
    return None


def _first_hit(t, which, M, tol):
    D = distance_triples(t, M)
    f = factor_values(D)[:, which - 1]
    bound = _resolve_tol(D, tol)
    idx = np.flatnonzero(f <= bound)
    if idx.size == 0:
        return None
    return PlanePoint(*map(float, M[idx[0]]))


class MobiusPompeiuClassifier(TransformerMixin, BaseEstimator):
    """Estimator-style wrapper: fit on three vertices, then classify query points.

    Parameters
    ----------
    metric : {"euclidean", "chordal"}
        Metric on the plane.
    tol : float or None
        Absolute half-width of the degeneracy band. ``None`` scales it with
        ``d1 + d2 + d3`` per query point.

    Attributes
    ----------
    triangle_ : Triangle
    sides_ : ndarray of shape (3,)
        ``(a, b, c)``.
    region_nonempty_ : ndarray of shape (3,), bool
        Which of the three failing regions can contain points at all.

    Examples
    --------
    >>> clf = MobiusPompeiuClassifier().fit([[0, 0], [1, 0], [0.5, 3 ** 0.5 / 2]])
    >>> clf.predict([[0.5, 0.3]]).tolist()
    [0]
    """

    def __init__(self, metric="euclidean", tol=None):
        self.metric = metric
        self.tol = tol

    def fit(self, X, y=None):
        """``X`` holds the vertices A, B, C as a ``(3, 2)`` array."""
        check_tolerance(self.tol)
        self.triangle_ = Triangle.from_vertices(X, MetricKind.parse(self.metric))
        self.sides_ = np.array(sides(self.triangle_))
        self.region_nonempty_ = np.array([region_nonempty(self.triangle_, w) for w in (1, 2, 3)])
        self.n_features_in_ = 2
        return self

    def distance_triples(self, X):
        check_is_fitted(self, "triangle_")
        return distance_triples(self.triangle_, X)

    def transform(self, X):
        """Factor values ``(d2+d3-d1, d3+d1-d2, d1+d2-d3)`` for each row of ``X``."""
        return factor_values(self.distance_triples(X))

    def predict(self, X):
        """:class:`Verdict` codes from the direct route."""
        return direct_verdicts(self.distance_triples(X), self.tol)[0]

    def predict_via_theorems(self, X):
        return theorem_verdicts(self.distance_triples(X), self.tol)[0]

    def region_codes(self, X):
        return region_codes_from_triples(self.distance_triples(X), self.tol)

    def alpha(self, X):
        return alpha_values(self.distance_triples(X))[:, 0]

    def beta(self, X):
        return beta_values(self.distance_triples(X))

    def profile(self, M):
        return alpha_beta_profile(self.distance_triples(M)[0])

    def find_failing_point(self, which, budget=10_000, seed=0) -> Optional[PlanePoint]:
        check_is_fitted(self, "triangle_")
        return search_failing_point(self.triangle_, which, budget=budget, seed=seed, tol=self.tol)
