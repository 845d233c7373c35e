"""Acceptance gate: one PASS/FAIL line per criterion, exact unless stated."""

import json
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from rank1_landscape.classify import (
    ClassCondition,
    Kind,
    classify_point,
    descent_direction,
    spurious_probe,
    spurious_witness,
    theorem1_predicate,
    verify_descent,
)
from rank1_landscape.cli import run
from rank1_landscape.core import Instance, Point, eval_f, residual, sign
from rank1_landscape.criticality import all_verdicts
from rank1_landscape.landscape import DEFAULT_POOL, FuzzConfig, fuzz_equivalence, run_descent
from rank1_landscape.subdiff import directional_derivative, step_alpha, step_beta, step_eval, zero_in_partials

from conftest import inst, pt

pytestmark = pytest.mark.acceptance


def report(capsys, label, ok, detail):
    with capsys.disabled():
        print(f"\nACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_oracle_equivalence(capsys):
    start = time.perf_counter()
    code = run(["fuzz", "--count", "500", "--seed", "42", "--mmax", "4", "--nmax", "4"])
    rep = json.loads(capsys.readouterr().out)
    secs = time.perf_counter() - start
    ok = (code == 0 and not rep["disagreements"] and not rep["classification_violations"]
          and rep["instances_tested"] == 500 and secs < 60)
    report(capsys, "criterion 1 oracle equivalence", ok,
           f"{rep['points_tested']} points, {len(rep['disagreements'])} disagreements, "
           f"{len(rep['classification_violations'])} violations, kinds {rep['kind_counts']}, "
           f"{secs:.1f}s")


def test_criterion_2_decoy(capsys, decoy):
    I, p = decoy
    verdicts = all_verdicts(I, p)
    cert = verdicts[1].descent_certificate
    slope = directional_derivative(I, p, cert) if cert else None
    example = directional_derivative(I, p, pt([0, 1], [1, 0]))
    ok = (not any(v.is_critical for v in verdicts) and zero_in_partials(I, p)
          and slope is not None and slope < 0 and slope == verdicts[1].certificate_slope
          and example == -2)
    report(capsys, "criterion 2 non-critical fixture", ok,
           f"critical flags {[v.is_critical for v in verdicts]}, zero_in_partials "
           f"{zero_in_partials(I, p)}, certificate slope {slope}, h=(0,1) k=(1,0) slope {example}")


def test_criterion_3_balanced(capsys, balanced):
    I, p = balanced
    verdicts = all_verdicts(I, p)
    alpha, beta = step_alpha(I, p), step_beta(I, p)
    cls = classify_point(I, p)
    plan = descent_direction(I, p)
    checks = {
        "critical x3": all(v.is_critical for v in verdicts),
        "alpha breakpoints": alpha.breakpoints == (-2, 1),
        "alpha plateaus": alpha.plateaus == (-2, 0, 2),
        "0 in alpha(0) and beta(0)": 0 in step_eval(alpha, 0) and 0 in step_eval(beta, 0),
        "saddle": cls.kind is Kind.SADDLE,
        "f = 24": eval_f(I, p) == 24,
    }
    for t in (F(1, 8), F(1, 16)):
        checks[f"descent t={t}"] = (
            verify_descent(I, p, plan, t)
            and eval_f(I, p + plan.direction.scale(t)) == (1 - t * t) * 24
        )
    failed = [k for k, v in checks.items() if not v]
    report(capsys, "criterion 3 critical saddle fixture", not failed,
           f"failed: {failed}" if failed else f"theta {plan.theta}, step bound {plan.valid_step_bound}")


def test_criterion_4_spurious_landscape(capsys, col01):
    checks = {}
    c = classify_point(col01, pt([0, 0], [0]))
    checks["origin saddle"] = c.kind is Kind.SADDLE and c.condition is ClassCondition.SADDLE_Y_ZERO
    c = classify_point(col01, pt([1, 0], [0]))
    checks["(1,0,0) spurious"] = (c.kind is Kind.SPURIOUS_LOCAL_MIN
                                  and c.condition is ClassCondition.SPURIOUS_Y_ZERO)
    for theta in (F(1), F(-2), F(3, 2)):
        c = classify_point(col01, pt([0, theta], [1 / theta]))
        checks[f"theta={theta} global"] = c.kind is Kind.GLOBAL_MIN
    rng = random.Random(2024)
    swept = spurious = probe_ok = 0
    while swept < 100:
        x1 = F(rng.randint(-40, 40), rng.randint(1, 8))
        x2 = F(rng.randint(-40, 40), rng.randint(1, 8))
        if not abs(x2) < abs(x1):
            continue
        swept += 1
        p = pt([x1, x2], [0])
        c = classify_point(col01, p)
        spurious += c.kind is Kind.SPURIOUS_LOCAL_MIN
        if c.kind is Kind.SPURIOUS_LOCAL_MIN:
            probe_ok += spurious_probe(col01, p, rng, samples=200, cls=c) is None
    checks["sweep spurious"] = spurious == 100
    checks["probe no decrease"] = probe_ok == 100
    failed = [k for k, v in checks.items() if not v]
    report(capsys, "criterion 4 M=(0,1)^T landscape", not failed,
           f"failed: {failed}" if failed else f"sweep {spurious}/100 spurious, probe clean {probe_ok}/100")


def _random_profile_instance(rng, profile):
    nonzero = [a for a in DEFAULT_POOL if a]
    while True:
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        if profile == "no_zeros":
            return Instance.from_factors([rng.choice(nonzero) for _ in range(m)],
                                         [rng.choice(nonzero) for _ in range(n)])
        if profile == "all_zero":
            u = [rng.choice(DEFAULT_POOL) for _ in range(m)]
            v = [F(0)] * n
            return Instance.from_factors(u, v) if rng.random() < 0.5 else Instance.from_factors(v, u)
        u = [rng.choice(DEFAULT_POOL) for _ in range(m)]
        v = [rng.choice(DEFAULT_POOL) for _ in range(n)]
        entries = [a * b for a in u for b in v]
        if any(entries) and not all(entries):
            return Instance.from_factors(u, v)


def test_criterion_5_spurious_predicate_round_trip(capsys):
    rng = random.Random(5)
    details, ok = [], True
    for profile, expect in (("no_zeros", True), ("mixed", False), ("all_zero", True)):
        insts = [_random_profile_instance(rng, profile) for _ in range(100)]
        pred_ok = all(theorem1_predicate(I.M) is expect for I in insts)
        if profile == "mixed":
            extra = all(classify_point(I, spurious_witness(I)).kind is Kind.SPURIOUS_LOCAL_MIN
                        for I in insts)
            details.append(f"mixed: predicate {pred_ok}, witnesses spurious {extra}")
        else:
            rep = fuzz_equivalence(FuzzConfig(seed=42), instances=insts)
            extra = rep.ok and rep.kind_counts.get(Kind.SPURIOUS_LOCAL_MIN.value, 0) == 0
            details.append(f"{profile}: predicate {pred_ok}, fuzz ok {rep.ok}, "
                           f"spurious {rep.kind_counts.get('spurious_local_min', 0)}")
        ok = ok and pred_ok and extra
    report(capsys, "criterion 5 spurious-minimum predicate round trip", ok, "; ".join(details))


# --- criterion 6 -------------------------------------------------------------


def _terms(I, p, d):
    """Per entry: residual r, linear coefficient a, quadratic coefficient b."""
    R = residual(I, p)
    return [(R[i][j], p.x[i] * d.y[j] + d.x[i] * p.y[j], d.x[i] * d.y[j])
            for i in range(I.m) for j in range(I.n)]


def _gap(terms):
    """A t* such that no term changes sign on (0, t*)."""
    gap = F(1)
    for r, a, b in terms:
        if r and (a or b):
            gap = min(gap, abs(r) / (abs(a) + abs(b)))
        elif not r and a and b:
            gap = min(gap, abs(a) / abs(b))
    return gap


def _second_order(terms):
    q = F(0)
    for r, a, b in terms:
        q += sign(r) * b if r else (sign(a) * b if a else abs(b))
    return q


def _triples(n=200, seed=6):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        m, k = rng.randint(1, 4), rng.randint(1, 4)
        I = Instance.from_factors([rng.choice(DEFAULT_POOL) for _ in range(m)],
                                  [rng.choice(DEFAULT_POOL) for _ in range(k)])
        p = Point([rng.choice(DEFAULT_POOL) for _ in range(m)],
                  [rng.choice(DEFAULT_POOL) for _ in range(k)])
        d = Point([rng.choice(DEFAULT_POOL) for _ in range(m)],
                  [rng.choice(DEFAULT_POOL) for _ in range(k)])
        if any(d.x + d.y):
            out.append((I, p, d))
    return out


def _dyadics_below(gap, count=6):
    t = F(1)
    while t >= gap:
        t /= 2
    return [t / 2**j for j in range(count)]


def test_criterion_6a_directional_derivative_exact(capsys):
    good = 0
    for I, p, d in _triples():
        g = directional_derivative(I, p, d)
        terms = _terms(I, p, d)
        Q = _second_order(terms)
        f0 = eval_f(I, p)
        ts = _dyadics_below(_gap(terms))
        quot = [(eval_f(I, p + d.scale(t)) - f0) / t for t in ts]
        affine = all(q == g + t * Q for q, t in zip(quot, ts))
        limit = 2 * quot[1] - quot[0] == g
        good += affine and limit
    report(capsys, "criterion 6 (exactness) directional derivative", good == 200,
           f"{good}/200 triples: dyadic quotients below the gap equal f'(p;d) + t*Q "
           f"exactly and extrapolate to f'(p;d)")


def test_criterion_6b_one_sided_from_above(capsys):
    below = []
    for I, p, d in _triples():
        g = directional_derivative(I, p, d)
        f0 = eval_f(I, p)
        ts = _dyadics_below(_gap(_terms(I, p, d))) + [F(1, 2), F(1)]
        if any((eval_f(I, p + d.scale(t)) - f0) / t < g for t in ts):
            below.append((I, p, d))
    example = ""
    if below:
        I, p, d = below[0]
        example = f"; first: u={[str(a) for a in I.u]} v={[str(a) for a in I.v]} p={p.to_json()} d={d.to_json()}"
    report(capsys, "criterion 6 (from above) difference quotient >= f'", not below,
           f"{len(below)}/200 triples approach f'(p;d) from below{example}")


def test_criterion_7_simulator(capsys, col01):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    kinds = {}
    for _ in range(200):
        trace = run_descent(col01, rng.uniform(-5, 5, 3), max_iters=2000)
        k = trace.terminal_classification.kind.value
        kinds[k] = kinds.get(k, 0) + 1
    secs = time.perf_counter() - start
    ok = kinds.get("global_min", 0) > 0 and kinds.get("spurious_local_min", 0) > 0 and secs < 30
    report(capsys, "criterion 7 simulator reaches both basins", ok,
           f"terminal kinds {dict(sorted(kinds.items()))}, {secs:.1f}s")
