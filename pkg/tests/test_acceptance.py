"""Exit criteria. Each test appends one PASS/FAIL line, printed at the end of the run."""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from gigcontract import (
    Contract,
    EmployerPolicy,
    GridSpec,
    ModelParams,
    SimulationConfig,
    banana_curve,
    binding_fix,
    certainty_equivalent,
    expected_utility,
    optimal_effort,
    policy_value_check,
    simulate,
    solve,
    steady_profit,
    threshold,
    trajectory,
)

BASE = ModelParams(c=1.0, gamma=1.0, beta=0.8, delta=0.8, sigma=0.0)


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


def test_1_threshold_reproduction():
    r_bar = threshold(BASE)
    ok = abs(r_bar - 0.277778) <= 1e-6 and round(r_bar, 2) == 0.28
    record(1, "threshold reproduction", ok, f"r_bar={r_bar:.9f} (target 0.277778 +- 1e-6)")


def test_2_reference_paths():
    counts, settled = [], True
    for r0 in (0.53, 0.42, 0.34, 0.22, 0.16, 0.1):
        rows = trajectory(BASE, r0, 20)
        first = next(i for i, row in enumerate(rows) if row.chi)
        counts.append(sum(not row.chi for row in rows))
        settled &= all(row.chi and row.r == rows[first].r for row in rows[first:])
    ok = counts == [3, 2, 1, 0, 0, 0] and settled
    record(2, "reference paths", ok, f"no-contract rounds {counts}, constant after contract: {settled}")


def test_3_banana_curves():
    start = time.perf_counter()
    betas = np.linspace(0.001, 0.999, 999)
    curves = {d: banana_curve(1.0, d, betas) for d in (0.7, 0.9)}
    elapsed = time.perf_counter() - start
    worst = max(abs(r.r_bar + r.v_at_r_bar - 0.5) for rows in curves.values() for r in rows)
    r7 = np.array([r.r_bar for r in curves[0.7]])
    r9 = np.array([r.r_bar for r in curves[0.9]])
    v7 = np.array([r.v_at_r_bar for r in curves[0.7]])
    v9 = np.array([r.v_at_r_bar for r in curves[0.9]])
    monotone = (np.all(np.diff(r7) > 0) and np.all(np.diff(r9) > 0)
                and np.all(np.diff(v7) < 0) and np.all(np.diff(v9) < 0))
    by_delta = bool(np.all(r9 < r7) and np.all(v9 > v7))
    ok = worst <= 1e-12 and monotone and by_delta and elapsed < 1.0
    record(3, "banana curves", ok,
           f"max |r_bar+v-0.5|={worst:.1e}, monotone in beta={monotone}, ordered in delta={by_delta}, "
           f"{elapsed:.3f}s")


def test_4_ratio_identity():
    start = time.perf_counter()
    grid = np.linspace(0.01, 0.99, 50)
    worst = 0.0
    for b in grid:
        for d in grid:
            p = ModelParams(1.0, 1.0, b, d, 0.0)
            expected = d * (1 - b) / (1 - d)
            worst = max(worst, abs(steady_profit(p) / threshold(p) - expected))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and elapsed < 1.0
    record(4, "profit/wage ratio", ok, f"max abs error {worst:.1e} over 50x50 grid, {elapsed:.3f}s")


def test_5_dp_matches_closed_form():
    grid = GridSpec(0.0, 0.6, 1201)
    start = time.perf_counter()
    value, policy, report = solve(BASE, grid, tol=1e-10)
    elapsed = time.perf_counter() - start
    r = grid.nodes()
    region = policy.chi
    v_err = float(np.max(np.abs(value.values[region] - (0.5 - r[region]))))
    s_err = float(np.max(np.abs(policy.s[region] - 1.0)))
    t_err = abs(report.threshold_estimate - 0.277778)
    ok = t_err <= grid.spacing and v_err <= 1e-6 and s_err <= 1e-6 and elapsed < 60
    record(5, "DP vs closed form", ok,
           f"threshold {report.threshold_estimate:.6f} (err {t_err:.1e} <= {grid.spacing:.0e}), "
           f"V err {v_err:.1e}, s err {s_err:.1e}, {elapsed:.2f}s")


def test_6_monte_carlo_unbiasedness():
    p = ModelParams(c=1.0, gamma=1.0, beta=0.8, delta=0.8, sigma=0.1)
    cfg = SimulationConfig(r0=0.2, rounds=1, paths=100_000, seed=2024, pin_reference=True)
    start = time.perf_counter()
    out = simulate(p, EmployerPolicy.fixed(1.0), cfg)
    elapsed = time.perf_counter() - start
    v, pi = out.mean_net_wage_given_contract, out.mean_profit_per_round
    ev, epi = 0.205, 1 / 1 - 1 * (1 / 2 + 1 * 0.1**2 / 2) - 0.2
    ok = abs(v.mean - ev) <= 3 * v.se and abs(pi.mean - epi) <= 3 * pi.se and elapsed < 10
    record(6, "Monte Carlo unbiasedness", ok,
           f"v={v.mean:.5f}+-{v.se:.1e} (0.205), pi={pi.mean:.5f}+-{pi.se:.1e} ({epi:.3f}), {elapsed:.2f}s")


def test_7_property_suites():
    rng = np.random.default_rng(7)
    checks = {}

    worst = 0.0
    for _ in range(1000):
        p = ModelParams(rng.uniform(0.1, 5), rng.uniform(0, 5), 0.8, 0.8, rng.uniform(0, 2))
        r, s = rng.uniform(-2, 2), rng.uniform(-2, 2)
        ce = certainty_equivalent(p, Contract(True, s, binding_fix(p, r, s)), s / p.c)
        worst = max(worst, abs(ce - r) / max(1.0, abs(r)))
    checks["binding CE"] = worst <= 1e-12

    z = np.linspace(-5, 5, 100_001)
    argmax_ok = True
    for _ in range(200):
        p = ModelParams(rng.uniform(0.5, 5), rng.uniform(0.1, 5), 0.8, 0.8, rng.uniform(0, 1))
        contract = Contract(True, rng.uniform(-2, 2), rng.uniform(-1, 1))
        z_num = z[np.argmax(expected_utility(p, contract, z))]
        argmax_ok &= abs(z_num - optimal_effort(p, contract)) <= z[1] - z[0]
    checks["effort argmax"] = bool(argmax_ok)

    contraction = monotone = crossing = True
    for sigma in (0.0, 0.05, 0.1, 0.2):
        p = ModelParams(1.0, 1.0, 0.8, 0.8, sigma)
        value, _, report = solve(p, tol=1e-10)
        d = report.deltas
        contraction &= all(d[k + 1] <= p.delta * d[k] + 1e-13 for k in range(5, len(d) - 1))
        monotone &= report.monotone_ok and bool(np.all(np.diff(value.values) <= 1e-12))
        crossing &= report.threshold_structure_ok
    checks["contraction <= delta"] = contraction
    checks["V nonincreasing"] = monotone
    checks["single crossing"] = crossing

    p = ModelParams(1.0, 1.0, 0.8, 0.8, 0.1)
    cfg = SimulationConfig(r0=0.0, rounds=50, paths=2000, seed=31337)
    runs = [simulate(p, EmployerPolicy.closed_form(), cfg, workers=w, record=True) for w in (1, 1, 4)]
    same = all(r.as_dict() == runs[0].as_dict() and np.array_equal(r.record.v, runs[0].record.v)
               for r in runs[1:])
    checks["seeded bit-identity"] = same

    failed = [k for k, ok in checks.items() if not ok]
    record(7, "property suites", not failed,
           ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items()))


def test_8_cross_validation():
    p = ModelParams(c=1.0, gamma=1.0, beta=0.8, delta=0.8, sigma=0.1)
    start = time.perf_counter()
    value, policy, report = solve(p, tol=1e-10)
    cfg = SimulationConfig(r0=0.0, rounds=120, paths=10_000, seed=8)
    est = policy_value_check(p, policy, 0.0, cfg)
    elapsed = time.perf_counter() - start
    gap = abs(est.mean - value(0.0))
    bound = 3 * est.se + 1e-3
    ok = gap <= bound and elapsed < 60
    record(8, "simulation vs value table", ok,
           f"MC {est.mean:.5f}+-{est.se:.1e}, V(0)={value(0.0):.5f}, gap {gap:.1e} <= {bound:.1e}, "
           f"{elapsed:.2f}s")
