"""Acceptance criteria, each at its stated tolerance and sample size.

Every test prints one ``criterion N PASS|FAIL`` line; the same lines are
collected into an ``acceptance criteria`` section of the terminal summary.
"""

import functools
import time

import numpy as np
import pytest

from mobpomp.classifier import (
    RegionCode,
    Triangle,
    Verdict,
    alpha_values,
    classify_direct,
    direct_verdicts,
    distance_triples,
    factor_values,
    region_nonempty,
    search_failing_point,
    sides,
    theorem_verdicts,
)
from mobpomp.curves import (
    chordal_alpha_quartic,
    chordal_beta_circle,
    circle_params,
    euclidean_alpha_quartic,
    euclidean_beta_circle,
)
from mobpomp.metrics import (
    MetricKind,
    chordal_distance,
    forward_stereographic,
    inverse_stereographic,
    ptolemy_pairing_residuals,
)
from mobpomp.render import (
    GridSpec,
    contour_fidelity,
    factor_field,
    figure_overlays,
    render_sign_map,
    write_image,
    zero_contour,
)
from mobpomp.verify import identity_errors, random_triangles

import conftest
from conftest import PICTURE1_VERTICES, unit_equilateral

pytestmark = pytest.mark.acceptance

SEED = 20240601


def criterion(num, title):
    """Record and print PASS/FAIL for the wrapped test; ``detail`` is whatever it returns."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                conftest.ACCEPTANCE_RESULTS[num] = (False, title, f"{type(exc).__name__}: {str(exc)[:200]}")
                print(f"criterion {num} FAIL {title}")
                raise
            conftest.ACCEPTANCE_RESULTS[num] = (True, title, detail or "")
            print(f"criterion {num} PASS {title}: {detail or ''}")

        return run

    return wrap


def check(cond, msg):
    assert cond, msg


def off_circle_points(rng, n, vertices, low=-3.0, high=3.0):
    out = np.empty((0, 2))
    while len(out) < n:
        P = rng.uniform(low, high, (4 * n, 2))
        r = np.linalg.norm(P, axis=1)
        near_vertex = np.min(np.linalg.norm(P[:, None, :] - vertices[None], axis=2), axis=1) < 0.01
        out = np.vstack([out, P[(np.abs(r - 1) > 0.01) & ~near_vertex]])
    return out[:n]


@criterion(1, "Ptolemaic property, both metrics, all pairings")
def test_c01_ptolemy():
    rng = np.random.default_rng(SEED)
    X = rng.uniform(-10, 10, (100_000, 4, 2))
    t0 = time.perf_counter()
    worst = {}
    for metric in MetricKind:
        R = ptolemy_pairing_residuals(X[:, 0], X[:, 1], X[:, 2], X[:, 3], metric)
        worst[metric.value] = float(R.min())
    elapsed = time.perf_counter() - t0
    check(min(worst.values()) >= -1e-9, f"min residual {worst}")
    check(elapsed < 5.0, f"runtime {elapsed:.2f}s")
    return f"min residual {worst}, {elapsed:.2f}s"


@criterion(2, "Factorization identity")
def test_c02_factorization():
    rng = np.random.default_rng(SEED + 2)
    D = rng.uniform(0, 10, (100_000, 3))
    t0 = time.perf_counter()
    fact, _ = identity_errors(D)
    elapsed = time.perf_counter() - t0
    check(fact.max() <= 1e-9, f"max relative error {fact.max():.3g}")
    check(elapsed < 1.0, f"runtime {elapsed:.2f}s")
    return f"max relative error {fact.max():.3g}, {elapsed:.3f}s"


@criterion(3, "Symmetric-form identity")
def test_c03_symmetric_form():
    rng = np.random.default_rng(SEED + 2)
    D = rng.uniform(0, 10, (100_000, 3))
    _, sym = identity_errors(D)
    check(sym.max() <= 1e-12, f"max relative error {sym.max():.3g}")
    return f"max relative error {sym.max():.3g} (relative to (d1^2+d2^2+d3^2)^2)"


@criterion(4, "Direct and theorem routes agree")
def test_c04_equivalence():
    rng = np.random.default_rng(SEED + 4)
    D = np.empty((0, 3))
    while len(D) < 100_000:
        T = rng.uniform(0, 10, (120_000, 3))
        D = np.vstack([D, T[np.all(np.abs(factor_values(T)) > 1e-6, axis=1)]])
    D = D[:100_000]
    v1, v2 = direct_verdicts(D)[0], theorem_verdicts(D)[0]
    agree = float(np.mean(v1 == v2))
    check(agree == 1.0, f"agreement {agree}")
    counts = {Verdict(v).name: int(n) for v, n in zip(*np.unique(v1, return_counts=True))}
    return f"100% agreement on {len(D)} triples {counts}"


@criterion(5, "Vertex lemma")
def test_c05_vertex_lemma():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for V in random_triangles(rng, 1000):
        t = Triangle.from_vertices(V)
        a, b, c = sides(t)
        al = alpha_values(distance_triples(t, V))[:, 0]
        expected = -np.array([(c * c - b * b) ** 2, (a * a - c * c) ** 2, (a * a - b * b) ** 2])
        worst = max(worst, float(np.max(np.abs(al - expected) / np.maximum(1.0, np.abs(expected)))))
    check(worst <= 1e-9, f"max relative error {worst:.3g}")
    return f"max relative error {worst:.3g}"


def _triangles_with_longest_a(rng, n):
    out = []
    while len(out) < n:
        V = rng.uniform(-10, 10, (3, 2))
        a, b, c = (np.linalg.norm(V[1] - V[2]), np.linalg.norm(V[2] - V[0]), np.linalg.norm(V[0] - V[1]))
        if a > b and a > c and min(a, b, c) > 0.1:
            out.append(V)
    return out


@criterion(6, "Nonemptiness, empty direction")
def test_c06_empty_direction():
    rng = np.random.default_rng(SEED + 6)
    failing, worst_ineq = 0, np.inf
    for V in _triangles_with_longest_a(rng, 200):
        t = Triangle.from_vertices(V)
        check(not region_nonempty(t, 1), "predicted nonempty")
        a, b, c = sides(t)
        lo, hi = V.min(axis=0) - 2 * a, V.max(axis=0) + 2 * a
        P = rng.uniform(lo, hi, (100_000, 2))
        D = distance_triples(t, P)
        failing += int(np.sum(factor_values(D)[:, 0] <= 0))
        slack = c * D[:, 2] + b * D[:, 1] - a * D[:, 0]
        scale = a * np.max(D, axis=1)
        worst_ineq = min(worst_ineq, float(np.min(slack / np.maximum(1.0, scale))))
    check(failing == 0, f"{failing} points with factor1 <= 0")
    check(worst_ineq >= -1e-9, f"weighted inequality slack {worst_ineq:.3g}")
    return f"0 failing points of 2e7, min scaled c*d3+b*d2-a*d1 = {worst_ineq:.3g}"


@criterion(7, "Nonemptiness, witness direction")
def test_c07_witness_direction():
    rng = np.random.default_rng(SEED + 7)
    found, n = 0, 0
    while n < 200:
        V = rng.uniform(-10, 10, (3, 2))
        t = Triangle.from_vertices(V)
        a, b, c = sides(t)
        if c < a or min(a, b, c) < 1e-2:
            continue
        n += 1
        w = search_failing_point(t, 1, seed=n)
        if w is not None and classify_direct(distance_triples(t, w)[0]).verdict == Verdict.FAILS:
            found += 1
    check(found == 200, f"{found}/200 witnesses")
    return "200/200 witnesses found"


@criterion(8, "Euclidean quartic structure")
def test_c08_quartic():
    rng = np.random.default_rng(SEED + 8)
    t0 = time.perf_counter()
    worst_k, worst_res = 0.0, 0.0
    for i, V in enumerate(random_triangles(rng, 1000)):
        fit = euclidean_alpha_quartic(Triangle.from_vertices(V), seed=i)
        worst_k = max(worst_k, abs(fit.coeffs.k - 3.0))
        worst_res = max(worst_res, fit.certificate.residual)
    elapsed = time.perf_counter() - t0
    check(worst_k <= 1e-9, f"|k-3| = {worst_k:.3g}")
    check(worst_res <= 1e-8, f"residual {worst_res:.3g}")
    check(elapsed < 30.0, f"runtime {elapsed:.1f}s")
    return f"max |k-3| {worst_k:.3g}, max residual {worst_res:.3g}, {elapsed:.2f}s"


@criterion(9, "Circle structure")
def test_c09_circles():
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for i, V in enumerate(random_triangles(rng, 200)):
        t = Triangle.from_vertices(V)
        for w in (1, 2, 3):
            worst = max(worst, abs(euclidean_beta_circle(t, w, seed=i).coeffs.A2 - 1.0))
    check(worst <= 1e-12, f"|A2-1| = {worst:.3g}")
    geom = circle_params(euclidean_beta_circle(Triangle.from_vertices([[0, 0], [1, 0], [0, 1]]), 1).coeffs)
    check(geom.kind == "point", f"kind {geom.kind}")
    check(np.allclose(geom.center, (1, 1), atol=1e-12), f"center {geom.center}")
    check(abs(geom.radius_squared) <= 1e-12, f"radius^2 {geom.radius_squared}")
    return f"max |A2-1| {worst:.3g}; beta1 of (0,0),(1,0),(0,1) is Point{tuple(round(c, 12) for c in geom.center)}"


@criterion(10, "Chordal numerator/denominator structure")
def test_c10_chordal():
    rng = np.random.default_rng(SEED + 10)
    wq, wc = 0.0, 0.0
    for i, V in enumerate(random_triangles(rng, 200)):
        t = Triangle.from_vertices(V, MetricKind.CHORDAL)
        wq = max(wq, chordal_alpha_quartic(t, seed=i).certificate.residual)
        for w in (1, 2, 3):
            wc = max(wc, chordal_beta_circle(t, w, seed=i).certificate.residual)
    check(wq <= 1e-8, f"quartic residual {wq:.3g}")
    check(wc <= 1e-10, f"circle residual {wc:.3g}")
    return f"max quartic residual {wq:.3g}, max circle residual {wc:.3g}"


def _circumcircle_check(metric, vertices):
    t = Triangle.from_vertices(vertices, metric)
    theta = np.deg2rad(np.arange(360.0))
    on = np.column_stack([np.cos(theta), np.sin(theta)])
    v_on = direct_verdicts(distance_triples(t, on), 1e-9)[0]
    rng = np.random.default_rng(SEED + 11)
    off = off_circle_points(rng, 10_000, np.asarray(vertices, dtype=float))
    v_off = direct_verdicts(distance_triples(t, off))[0]
    n_on = int(np.sum(v_on == Verdict.DEGENERATE))
    n_off = int(np.sum(v_off == Verdict.NON_DEGENERATE))
    check(n_on == 360, f"{n_on}/360 circle samples degenerate")
    check(n_off == 10_000, f"{n_off}/10000 off-circle samples non-degenerate")
    return "360/360 on-circle degenerate, 10000/10000 off-circle non-degenerate"


@criterion(11, "Circumcircle degenerate set, Euclidean")
def test_c11_pompeiu():
    return _circumcircle_check(MetricKind.EUCLIDEAN, unit_equilateral())


@criterion(12, "Circumcircle degenerate set, chordal")
def test_c12_chordal_circumcircle():
    ang = np.deg2rad([0.0, 120.0, 240.0])
    V = np.column_stack([np.cos(ang), np.sin(ang)])
    a, b, c = sides(Triangle.from_vertices(V, MetricKind.CHORDAL))
    check(np.allclose([a, b], c, rtol=1e-14), "lifts not equidistant")
    return _circumcircle_check(MetricKind.CHORDAL, V)


@criterion(13, "Renderer determinism and correctness")
def test_c13_render(tmp_path):
    t = Triangle.from_vertices(PICTURE1_VERTICES)
    a, b, c = sides(t)
    check(a > c > b, "not a picture-1 configuration")
    g = GridSpec.around(t, 400, 400)
    runs = []
    for k in range(2):
        img = render_sign_map(t, g)
        ov = figure_overlays(t, g, great_circles=True)
        files = [write_image(img, tmp_path / f"run{k}.{fmt}", fmt, ov) for fmt in ("ppm", "svg")]
        runs.append(b"".join(f.read_bytes() for f in files))
    counts = img.counts()
    check(runs[0] == runs[1], "runs differ")
    check(counts.get(RegionCode.FAILS_1, 0) == 0, f"region-1 pixels {counts.get(1)}")
    check(counts.get(RegionCode.FAILS_2, 0) > 0 and counts.get(RegionCode.FAILS_3, 0) > 0, f"counts {counts}")
    worst = 0.0
    for w in (1, 2, 3):
        fld = factor_field(t, w)
        worst = max(worst, contour_fidelity(fld, zero_contour(fld, g), g))
    check(worst <= 1e-3, f"contour fidelity {worst:.3g}")
    return f"counts {counts}, byte-identical, contour fidelity {worst:.3g}"


@criterion(14, "Stereographic round trip and chordal lift distance")
def test_c14_stereographic():
    rng = np.random.default_rng(SEED + 14)
    P = rng.uniform(-10, 10, (10_000, 2))
    back = inverse_stereographic(forward_stereographic(P))
    rt = float(np.max(np.abs(back - P)))
    Q = rng.uniform(-10, 10, (10_000, 2))
    lift = np.linalg.norm(forward_stereographic(P) - forward_stereographic(Q), axis=1)
    dd = float(np.max(np.abs(chordal_distance(P, Q) - lift)))
    check(rt <= 1e-12, f"round trip error {rt:.3g}")
    check(dd <= 1e-10, f"lift distance error {dd:.3g}")
    return f"round trip {rt:.3g}, lift distance {dd:.3g}"
