import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gigcontract import DomainError, ModelParams, banana_curve, steady_profit, threshold, trajectory, value_function
from gigcontract.deterministic import skips_needed, solve

BASE_R0S = [0.53, 0.42, 0.34, 0.22, 0.16, 0.1]

params_st = st.builds(
    ModelParams,
    c=st.floats(0.05, 20),
    gamma=st.just(1.0),
    beta=st.floats(0.001, 0.999),
    delta=st.floats(0.001, 0.999),
    sigma=st.just(0.0),
)


def P(c=1.0, beta=0.8, delta=0.8):
    return ModelParams(c, 1.0, beta, delta, 0.0)


def decay_skips(r, beta, r_bar):
    """Independent count of no-contract rounds: iterate beta*r until <= r_bar."""
    n = 0
    while r > r_bar:
        r = beta * r
        n += 1
    return n, r


def test_threshold_examples(base):
    assert threshold(base) == pytest.approx(0.277778, abs=1e-6)
    assert round(threshold(base), 2) == 0.28
    assert threshold(P(c=2)) == pytest.approx(0.1388889, abs=1e-7)
    assert threshold(P(beta=1 - 1e-9)) == pytest.approx(0.5, abs=1e-6)


def test_steady_profit_examples(base):
    assert steady_profit(base) == pytest.approx(0.5 - 0.2777777777777778, abs=1e-15)
    assert steady_profit(P(delta=1e-9)) == pytest.approx(0.0, abs=1e-8)
    assert steady_profit(P(beta=0.5, delta=0.9)) == pytest.approx(0.5 * 0.9 * 0.5 / 0.55, rel=1e-15)


def test_solution_record(base):
    sol = solve(base)
    assert sol.net_production == 0.5
    assert sol.ratio == pytest.approx(0.8, rel=1e-14)
    assert 0 < sol.r_bar < sol.net_production


def test_value_function_examples(base):
    r_bar = threshold(base)
    assert value_function(base, 0.1) == pytest.approx(0.4, abs=1e-15)
    assert value_function(base, r_bar) == pytest.approx(0.2222222222, abs=1e-10)
    assert abs(value_function(base, r_bar) - 0.8 * (0.5 - 0.8 * r_bar)) <= 1e-12
    k, r_k = decay_skips(0.53, 0.8, r_bar)
    assert k == 3 == skips_needed(base, 0.53)
    assert value_function(base, 0.53) == pytest.approx(0.8**k * (0.5 - r_k), abs=1e-15)
    assert value_function(base, 0.53) == pytest.approx(0.11706, abs=1e-5)


def test_value_function_above_threshold_beats_other_waiting_times(base):
    # brute force over the number of skipped rounds
    for r in np.linspace(0.0, 2.0, 401):
        best = max(base.delta**k * (0.5 - base.beta**k * r) for k in range(0, 60))
        assert value_function(base, r) == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("r0, skips", list(zip(BASE_R0S, [3, 2, 1, 0, 0, 0])))
def test_trajectory_reproduces_reference_paths(base, r0, skips):
    rows = trajectory(base, r0, 20)
    assert len(rows) == 20
    n, r_settled = decay_skips(r0, 0.8, threshold(base))
    assert n == skips
    assert [row.chi for row in rows] == [False] * skips + [True] * (20 - skips)
    assert all(row.r == pytest.approx(r_settled, abs=1e-15) for row in rows[skips:])


def test_trajectory_examples(base):
    rows = trajectory(base, 0.53, 20)
    assert [row.r for row in rows[:4]] == pytest.approx([0.53, 0.424, 0.3392, 0.27136])
    rows = trajectory(base, 0.42, 20)
    assert [row.r for row in rows[:3]] == pytest.approx([0.42, 0.336, 0.2688])
    rows = trajectory(base, 0.1, 20)
    assert all(row.chi and row.r == 0.1 for row in rows)
    assert rows[0].s == 1.0 and rows[0].z == 1.0
    assert rows[0].f == pytest.approx(-0.4) and rows[0].pi == pytest.approx(0.4)
    assert len(trajectory(base, 0.3, 1)) == 1


def test_trajectory_negative_start_contracts(base):
    assert trajectory(base, -0.2, 3)[0].chi


def test_trajectory_rejects_empty_horizon(base):
    with pytest.raises(ValueError):
        trajectory(base, 0.1, 0)


def test_banana_examples():
    rows = banana_curve(1.0, 0.7, [1e-9])
    assert rows[0].r_bar == pytest.approx(0.15, abs=1e-9)
    assert rows[0].v_at_r_bar == pytest.approx(0.35, abs=1e-9)

    betas = np.linspace(0.01, 0.99, 99)
    far = banana_curve(1.0, 0.9, betas)
    near = banana_curve(1.0, 0.7, betas)
    assert np.all(np.diff([r.r_bar for r in far]) > 0)
    assert np.all(np.diff([r.v_at_r_bar for r in far]) < 0)
    assert all(f.r_bar < n.r_bar and f.v_at_r_bar > n.v_at_r_bar for f, n in zip(far, near))


def test_banana_rejects_bad_beta():
    with pytest.raises(DomainError) as info:
        banana_curve(1.0, 0.7, [0.5, 1.0])
    assert info.value.field == "beta"


@given(params_st)
def test_shares_add_up_to_net_production(p):
    assert abs(threshold(p) + steady_profit(p) - p.net_production) <= 1e-12 * max(1, p.net_production)


@given(params_st)
def test_profit_wage_ratio(p):
    ratio = p.delta * (1 - p.beta) / (1 - p.delta)
    assert steady_profit(p) / threshold(p) == pytest.approx(ratio, rel=1e-12, abs=1e-12)


def test_comparative_statics_dense_grid():
    grid = np.linspace(0.01, 0.99, 197)
    for fixed in (0.3, 0.7, 0.9):
        by_beta = [P(beta=b, delta=fixed) for b in grid]
        by_delta = [P(beta=fixed, delta=d) for d in grid]
        assert np.all(np.diff([threshold(p) for p in by_beta]) > 0)
        assert np.all(np.diff([steady_profit(p) for p in by_beta]) < 0)
        assert np.all(np.diff([threshold(p) for p in by_delta]) < 0)
        assert np.all(np.diff([steady_profit(p) for p in by_delta]) > 0)


@given(params_st)
def test_value_function_continuous_at_threshold(p):
    r_bar = threshold(p)
    contract = p.net_production - r_bar
    skip = p.delta * (p.net_production - p.beta * r_bar)
    assert abs(contract - skip) <= 1e-12 * max(1, p.net_production)
    assert abs(value_function(p, r_bar) - value_function(p, r_bar * (1 + 1e-12))) <= 1e-9 * max(1, p.net_production)


@given(params_st, st.floats(-1, 5), st.integers(1, 60))
def test_trajectory_absorbs_after_first_contract(p, r0, rounds):
    rows = trajectory(p, r0, rounds)
    first = next((i for i, row in enumerate(rows) if row.chi), None)
    for i, row in enumerate(rows):
        if i + 1 < len(rows) and not row.chi:
            assert rows[i + 1].r == p.beta * row.r
    if first is None:
        return
    head = rows[first]
    for row in rows[first:]:
        assert row.chi
        assert (row.r, row.s, row.f, row.z, row.v, row.pi) == (head.r, head.s, head.f, head.z, head.v, head.pi)
        assert abs(row.v + row.pi - p.net_production) <= 1e-12 * max(1, p.net_production)
