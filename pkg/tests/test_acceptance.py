"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Run with ``pytest tests/test_acceptance.py -s`` to see the
lines as they execute.

Criterion 5 (the spiral iteration-count experiment) asserts the full
published behavior including the r=3 iteration-cap; the cap expectation is
known not to be attainable under the mandated stopping rule and model size,
so that single test is expected to fail while everything it can reproduce
(the iteration-count and relative-energy orderings) is asserted first and
also covered by a green test in test_metrics_models.
"""

import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

import fairpia as fp
from fairpia import FairingConfig, FunctionalKind
from fairpia.engine import FairingIteration, build_system, resolve_weights
from fairpia.gram import gram_for
from fairpia.modelio import save_model
from fairpia.models import NoiseSpec, add_noise, make_line_curve, make_spiral_model

from conftest import random_curve, random_surface
from oracles import random_clamped_knots

R2 = FunctionalKind.CURVE_R2


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance] {name}: {status}"
    if detail:
        line += f"  ({detail})"
    print(line)


def run_to_fixed_point(geometry, kind, omega, max_iterations=20000):
    driver = FairingIteration(geometry, kind, omega)
    run = driver.run(max_iterations, 1e-15)
    return run


def test_criterion_1_fixed_point_correctness():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(8, 41))
        curve = random_curve(rng, n)
        g = fp.curve_gram(curve.knots, 2)
        om = float(rng.uniform(0.1, 0.9) * fp.weight_upper_bound(g).min())
        run = run_to_fixed_point(curve, R2, om)
        system = build_system(g, np.full(n, om))
        res = fp.fixed_point_residual(run.geometry.control_points, system, curve.control_points)
        rel = res / np.max(np.abs(curve.control_points))
        worst = max(worst, rel)
        assert rel < 1e-8, f"fixed-point residual {rel:.3e} at n={n}"
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 5.0
    report("1 fixed-point correctness", ok, f"worst residual {worst:.2e}, {elapsed:.2f}s")
    assert elapsed < 5.0, f"runtime {elapsed:.2f}s exceeds 5s"


def test_criterion_2_uniform_weight_equivalence():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(8, 41))
        curve = random_curve(rng, n)
        g = fp.curve_gram(curve.knots, 2)
        om = float(rng.uniform(0.1, 0.9) * fp.weight_upper_bound(g).min())
        run = run_to_fixed_point(curve, R2, om)
        direct = fp.energy_fair_direct(curve, om, R2)
        dist = np.max(np.linalg.norm(run.geometry.control_points - direct.control_points, axis=1))
        worst = max(worst, dist / curve.bbox_diagonal())
        assert dist < 1e-6 * curve.bbox_diagonal()
    for _ in range(5):
        n1, n2 = (int(rng.integers(5, 13)) for _ in range(2))
        surf = random_surface(rng, n1, n2)
        kind = FunctionalKind.SURFACE_SECOND
        g = gram_for(surf, kind)
        om = float(rng.uniform(0.1, 0.9) * fp.weight_upper_bound(g).min())
        run = run_to_fixed_point(surf, kind, om)
        direct = fp.energy_fair_direct(surf, om, kind)
        dist = np.max(np.linalg.norm(run.geometry.flat_points() - direct.flat_points(), axis=1))
        worst = max(worst, dist / surf.bbox_diagonal())
        assert dist < 1e-6 * surf.bbox_diagonal()
    report("2 uniform-weight equivalence with direct solve", True, f"worst {worst:.2e} of diag")


def test_criterion_3_dominance_suite():
    rng = np.random.default_rng(303)
    for trial in range(100):
        n = int(rng.integers(5, 30))
        kv = fp.KnotVector(random_clamped_knots(rng, n, 3, multiplicity=bool(rng.random() < 0.25)), 3)
        g = fp.curve_gram(kv, int(rng.integers(1, 4)))
        omega = rng.uniform(0.02, 0.999, n) * fp.weight_upper_bound(g)
        system = build_system(g, omega)
        assert system.is_strictly_diagonally_dominant, f"trial {trial} lost dominance"
        assert 0.0 < system.inf_norm_residual < 1.0, f"trial {trial} norm {system.inf_norm_residual}"
    # 10 deliberately out-of-bound configurations: clamped or rejected per policy
    for trial in range(10):
        n = int(rng.integers(5, 20))
        kv = fp.KnotVector(random_clamped_knots(rng, n, 3), 3)
        g = fp.curve_gram(kv, 2)
        bounds = fp.weight_upper_bound(g)
        too_big = np.minimum(bounds * rng.uniform(2.0, 50.0, n), 0.9999)
        if trial % 2 == 0:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                resolved, notes = resolve_weights(g, too_big, None, "clamp")
            assert notes, "clamping must be recorded"
            assert np.all(resolved < bounds)
            assert build_system(g, resolved).is_strictly_diagonally_dominant
        else:
            with pytest.raises(fp.InvalidWeightError):
                resolve_weights(g, too_big, None, "strict")
    report("3 weight-bound suite (dominance + contraction + policy)", True)


def test_criterion_4_energy_impact_oracle():
    rng = np.random.default_rng(404)
    worst = 0.0

    def check(geometry, kind, indices):
        nonlocal worst
        e_base = fp.energy(geometry, kind)
        for j in indices:
            z = fp.energy_impact(geometry, j, kind)
            p_hat = fp.optimal_single_point(geometry, j, kind)
            if hasattr(geometry, "control_points"):
                pts = geometry.control_points.copy()
                pts[j] = p_hat
                e_hat = fp.energy(geometry.with_points(pts), kind)
            else:
                flat = geometry.flat_points().copy()
                flat[j] = p_hat
                e_hat = fp.energy(geometry.with_flat_points(flat), kind)
            ref = e_base - e_hat
            rel = abs(z - ref) / max(abs(ref), 1e-300) if ref != 0.0 else abs(z)
            if ref > 1e-9 * e_base:   # meaningful impacts measured relatively
                worst = max(worst, rel)
                assert rel < 1e-8, f"Z mismatch {rel:.2e} at j={j}"

    for _ in range(50):
        curve = random_curve(rng, int(rng.integers(6, 20)), degree=3)
        r = int(rng.integers(1, 4))
        check(curve, FunctionalKind.for_curve(r), range(curve.n))
    for _ in range(10):
        surf = random_surface(rng, int(rng.integers(4, 8)), int(rng.integers(4, 8)))
        kind = FunctionalKind.SURFACE_SECOND if rng.random() < 0.7 else FunctionalKind.SURFACE_FIRST
        total = surf.shape[0] * surf.shape[1]
        check(surf, kind, rng.choice(total, size=min(12, total), replace=False))
    report("4 energy-impact closed form vs brute force", True, f"worst rel {worst:.2e}")


def test_criterion_5_spiral_experiment():
    noisy = add_noise(make_spiral_model(), NoiseSpec(variance=0.02, seed=2024))
    results = {}
    for r in (1, 2, 3):
        run = fp.fair(noisy, FairingConfig(
            FunctionalKind.for_curve(r), 1e-5,
            max_iterations=800, iter_tolerance=1e-6, weight_policy="unchecked",
        ))
        results[r] = run
    iters = {r: results[r].iterations for r in (1, 2, 3)}
    e_rel = {r: results[r].trace[-1].e_rel for r in (1, 2, 3)}
    order_iters = iters[1] < iters[2] < iters[3]
    order_energy = e_rel[3] < e_rel[2] < e_rel[1] < 1.0
    r3_capped = results[3].stop_reason == "iteration-capped"
    detail = (f"iters {iters[1]}/{iters[2]}/{iters[3]}, "
              f"eRel {e_rel[1]:.4f}/{e_rel[2]:.4f}/{e_rel[3]:.4f}, "
              f"r3 stop={results[3].stop_reason}")
    report("5 spiral experiment (order trade-off + r3 cap)",
           order_iters and order_energy and r3_capped, detail)
    assert order_iters, f"iteration ordering violated: {iters}"
    assert order_energy, f"relative-energy ordering violated: {e_rel}"
    assert r3_capped, (
        "r=3 did not hit the 800-iteration cap: the run satisfies the stopping "
        f"rule after {iters[3]} iterations, and scanning the full admissible "
        "weight range (and seeds, and fit variants) never pushes the E_iter "
        "plateau past ~400 for a 30-point model — the published cap is not "
        "reachable under this stopping rule, model size and step normalization "
        "(full analysis in the project decisions ledger)"
    )


def test_criterion_6_quadrature_exactness():
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 25))
        kv = fp.KnotVector(random_clamped_knots(rng, n, 3, multiplicity=bool(rng.random() < 0.2)), 3)
        for r in (1, 2, 3):
            g = fp.curve_gram(kv, r)
            ref = fp.curve_gram(kv, r, nodes_per_span=4 * 4)
            scale = np.max(np.abs(ref.ab))
            rel = np.max(np.abs(g.ab - ref.ab)) / scale
            worst = max(worst, rel)
            assert rel < 1e-12
    g = fp.curve_gram(fp.KnotVector([0, 0, 0, 0, 1, 1, 1, 1], 3), 2)
    row = np.array([g.entry(0, j) for j in range(4)])
    analytic_ok = np.max(np.abs(row - np.array([12.0, -18.0, 0.0, 6.0]))) < 1e-12
    report("6 quadrature exactness", worst < 1e-12 and analytic_ok,
           f"worst rel {worst:.2e}, first row {row}")
    assert analytic_ok


def test_criterion_7_locality():
    rng = np.random.default_rng(707)
    curve = random_curve(rng, 18)
    run_auto = fp.auto_fair(curve, m=4, omega=1e-7, kind=R2,
                            max_iterations=800, iter_tolerance=0.0)
    assert run_auto.iterations == 800
    ok = True
    for i in range(18):
        if i not in run_auto.active_set:
            ok &= bool(np.array_equal(run_auto.geometry.control_points[i], curve.control_points[i]))
    active = [2, 9, 10]
    g = fp.curve_gram(curve.knots, 2)
    om = 0.5 * float(fp.weight_upper_bound(g).min())
    run_set = fp.fair(curve, FairingConfig(R2, om, active_set=active,
                                           max_iterations=800, iter_tolerance=0.0))
    assert run_set.iterations == 800
    for i in range(18):
        if i not in active:
            ok &= bool(np.array_equal(run_set.geometry.control_points[i], curve.control_points[i]))
    report("7 locality (inactive points bit-identical over 800 iterations)", ok)
    assert ok


def test_criterion_8_stopping_rule():
    rng = np.random.default_rng(808)
    curve = random_curve(rng, 12)
    g = fp.curve_gram(curve.knots, 2)
    om = 0.5 * float(fp.weight_upper_bound(g).min())

    converged = fp.fair(curve, FairingConfig(R2, om, max_iterations=800, iter_tolerance=1e-6))
    diffs = np.abs(np.diff([rec.e_iter for rec in converged.trace if rec.k > 0]))
    rule_ok = (converged.stop_reason == "converged"
               and diffs[-1] < 1e-6 and np.all(diffs[:-1] >= 1e-6))

    capped = fp.fair(curve, FairingConfig(R2, om, max_iterations=17, iter_tolerance=0.0))
    cap_ok = capped.stop_reason == "iteration-capped" and capped.iterations == 17

    line = make_line_curve(9, 3, (0.0, 0.0), (4.0, 1.0))
    fixed = fp.fair(line, FairingConfig(R2, 1e-6))
    fixed_ok = fixed.stop_reason == "converged" and fixed.fixed_point and fixed.iterations == 1

    ok = rule_ok and cap_ok and fixed_ok
    report("8 stopping rule honored and recorded", ok,
           f"converged at k={converged.iterations}, cap at 17, fixed point at 1")
    assert ok


def test_criterion_9_cli_determinism(tmp_path):
    model_path = tmp_path / "model.json"
    save_model(model_path, add_noise(make_spiral_model(), NoiseSpec(variance=0.02, seed=2024)))
    outputs = []
    for tag in ("a", "b"):
        out = tmp_path / f"out_{tag}.json"
        trace = tmp_path / f"trace_{tag}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "fairpia.cli", "fair", str(model_path),
             "-r", "2", "--omega", "12-19:1e-5,default:1e-6",
             "--weight-policy", "unchecked", "--max-iter", "60",
             "-o", str(out), "--trace", str(trace)],
            capture_output=True, text=True, cwd=str(Path(__file__).resolve().parents[1]),
        )
        assert proc.returncode in (0, 2), proc.stderr
        outputs.append((out.read_bytes(), trace.read_bytes(), proc.stdout))
    ok = (outputs[0][0] == outputs[1][0]
          and outputs[0][1] == outputs[1][1]
          and outputs[0][2] == outputs[1][2])
    report("9 CLI determinism (byte-identical reruns)", ok)
    assert ok
