"""Seeded property sweeps backing the ``verify`` command.

Each suite returns a :class:`SuiteResult`; any entry in ``violations`` is a
counterexample to one of the package invariants, echoed with its sample.
"""

from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    Triangle,
    alpha_values,
    direct_verdicts,
    distance_triples,
    factor_values,
    region_nonempty,
    search_failing_point,
    sides,
    theorem_verdicts,
)
from .metrics import MetricKind, check_metric_axioms, ptolemy_pairing_residuals

SUITES = ("axioms", "ptolemy", "identities", "theorems")
MAX_ECHO = 10


@dataclass
class SuiteResult:
    name: str
    samples: int
    seed: int
    checks: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "suite": self.name,
            "samples": self.samples,
            "seed": self.seed,
            "checks": self.checks,
            "violations": self.violations[:MAX_ECHO],
            "n_violations": len(self.violations),
        }


def random_triangles(rng, n, low=-10.0, high=10.0, min_side=1e-2):
    """``n`` random vertex triples whose sides all exceed ``min_side``."""
    out = []
    while len(out) < n:
        V = rng.uniform(low, high, (3, 2))
        d = np.hypot(*(V - np.roll(V, 1, axis=0)).T)
        if d.min() > min_side:
            out.append(V)
    return out


def alpha_term_scale(D):
    """``(d1^2 + d2^2 + d3^2)^2``: the size of the terms combined in alpha."""
    return np.sum(D * D, axis=-1) ** 2


def run_axioms(samples, seed, tol=1e-9):
    rng = np.random.default_rng(seed)
    n = int(min(max(samples, 3), 300))
    res = SuiteResult("axioms", n, seed)
    P = rng.uniform(-10, 10, (n, 2))
    for metric in MetricKind:
        rep = check_metric_axioms(P, metric, tol)
        res.checks[metric.value] = {
            "points": n,
            "symmetry": len(rep.symmetry_violations),
            "identity": len(rep.identity_violations),
            "triangle": rep.n_triangle_violations,
        }
        for v in rep.violations:
            res.violations.append(dict(v, metric=metric.value, check="metric-axiom"))
    return res


def run_ptolemy(samples, seed, tol=1e-9):
    rng = np.random.default_rng(seed)
    res = SuiteResult("ptolemy", samples, seed)
    X = rng.uniform(-10, 10, (samples, 4, 2))
    for metric in MetricKind:
        R = ptolemy_pairing_residuals(X[:, 0], X[:, 1], X[:, 2], X[:, 3], metric)
        bad = np.flatnonzero(np.any(R < -tol, axis=1))
        res.checks[metric.value] = {"quadruples": samples, "min_residual": float(R.min()), "violations": int(bad.size)}
        for i in bad[:MAX_ECHO]:
            res.violations.append(
                {"check": "ptolemy", "metric": metric.value, "quadruple": X[i].tolist(), "residuals": R[i].tolist()}
            )
    return res


def identity_errors(D):
    """Factorization and symmetric-form errors for triples ``D``.

    Returns ``(factorization_rel, symmetric_rel)`` where the first is relative
    to ``max(1, |alpha|)`` and the second to the term scale
    ``(d1^2+d2^2+d3^2)^2``.
    """
    al = alpha_values(D)
    prod = np.prod(factor_values(D), axis=-1) * np.sum(D, axis=-1)
    fact = np.abs(al[:, 0] - prod) / np.maximum(1.0, np.abs(al[:, 0]))
    scale = np.maximum(1.0, alpha_term_scale(D))
    sym = np.maximum(np.abs(al[:, 0] - al[:, 1]), np.abs(al[:, 0] - al[:, 2])) / scale
    return fact, sym


def run_identities(samples, seed):
    rng = np.random.default_rng(seed)
    res = SuiteResult("identities", samples, seed)
    D = rng.uniform(0, 10, (samples, 3))
    fact, sym = identity_errors(D)
    res.checks["factorization"] = {"max_rel_error": float(fact.max()), "bound": 1e-9}
    res.checks["symmetric_form"] = {"max_rel_error": float(sym.max()), "bound": 1e-12}
    for i in np.flatnonzero(fact > 1e-9)[:MAX_ECHO]:
        res.violations.append({"check": "factorization", "triple": D[i].tolist(), "rel_error": float(fact[i])})
    for i in np.flatnonzero(sym > 1e-12)[:MAX_ECHO]:
        res.violations.append({"check": "symmetric_form", "triple": D[i].tolist(), "rel_error": float(sym[i])})

    f = factor_values(D)
    clear = np.all(np.abs(f) > 1e-6, axis=1)
    v_direct = direct_verdicts(D[clear])[0]
    v_thm = theorem_verdicts(D[clear])[0]
    disagree = np.flatnonzero(v_direct != v_thm)
    res.checks["equivalence"] = {"compared": int(clear.sum()), "disagreements": int(disagree.size)}
    for i in disagree[:MAX_ECHO]:
        res.violations.append({"check": "equivalence", "triple": D[clear][i].tolist()})

    # d_j + d_k <= d_i forces the other two inequalities
    implied_bad = 0
    for i in range(3):
        own = f[:, i] <= 0
        others = np.delete(f, i, axis=1)
        implied_bad += int(np.sum(own & np.any(others < 0, axis=1)))
    res.checks["implication"] = {"violations": implied_bad}
    if implied_bad:
        res.violations.append({"check": "implication", "count": implied_bad})

    n_tri = max(1, min(1000, samples // 100))
    worst = 0.0
    for V in random_triangles(rng, n_tri):
        t = Triangle.from_vertices(V)
        a, b, c = sides(t)
        al = alpha_values(distance_triples(t, V))[:, 0]
        expected = np.array([-(c * c - b * b) ** 2, -(a * a - c * c) ** 2, -(a * a - b * b) ** 2])
        err = np.abs(al - expected) / np.maximum(1.0, np.abs(expected))
        worst = max(worst, float(err.max()))
        if err.max() > 1e-9 or np.any(al > 1e-9 * (a + b + c) ** 4):
            res.violations.append({"check": "vertex_alpha", "vertices": V.tolist(), "alpha": al.tolist()})
    res.checks["vertex_alpha"] = {"triangles": n_tri, "max_rel_error": worst}
    return res


def run_theorems(samples, seed, n_triangles=200):
    """Compare nonemptiness predictions with a seeded witness search."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("theorems", samples, seed)
    budget = max(3, int(samples))
    tally = {"predicted_nonempty": 0, "predicted_empty": 0, "mismatches": 0}
    for n, V in enumerate(random_triangles(rng, n_triangles, min_side=0.1)):
        metric = MetricKind.EUCLIDEAN if n % 2 == 0 else MetricKind.CHORDAL
        t = Triangle.from_vertices(V, metric)
        for which in (1, 2, 3):
            predicted = region_nonempty(t, which)
            witness = search_failing_point(t, which, budget=budget, seed=seed + n)
            tally["predicted_nonempty" if predicted else "predicted_empty"] += 1
            if predicted != (witness is not None):
                tally["mismatches"] += 1
                res.violations.append(
                    {
                        "check": "nonemptiness",
                        "metric": metric.value,
                        "vertices": V.tolist(),
                        "which": which,
                        "predicted": predicted,
                        "witness": None if witness is None else list(witness),
                    }
                )
    res.checks["nonemptiness"] = dict(tally, triangles=n_triangles, budget=budget)
    return res


def run_suite(name, samples=10_000, seed=0):
    if name == "all":
        return [run_suite(s, samples, seed)[0] for s in SUITES]
    runners = {"axioms": run_axioms, "ptolemy": run_ptolemy, "identities": run_identities, "theorems": run_theorems}
    if name not in runners:
        raise ValueError(f"unknown suite {name!r}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    return [runners[name](int(samples), int(seed))]
