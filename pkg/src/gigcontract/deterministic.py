"""Closed-form solution of the noiseless (sigma = 0) employer problem.

Without noise the share has no effect on the reference dynamics, so the
employer always picks ``s = 1`` and only decides whether to contract. The
optimal rule is a threshold on the reference: contract iff ``r <= r_bar``.
While no contract is offered the reference decays as ``r <- beta * r``;
once a contract is struck the reference stays put forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List

from .model import ModelParams, validate_params


@dataclass(frozen=True)
class DeterministicSolution:
    r_bar: float
    v_at_r_bar: float
    net_production: float
    ratio: float


@dataclass(frozen=True)
class TrajectoryRow:
    t: int
    r: float
    chi: bool
    s: float
    f: float
    z: float
    v: float
    pi: float


def threshold(params: ModelParams) -> float:
    """Reference level at which contracting now and skipping one round tie."""
    d, b = params.delta, params.beta
    return params.net_production * (1.0 - d) / (1.0 - d * b)


def steady_profit(params: ModelParams) -> float:
    """Average profit per round once the reference has settled at the threshold."""
    d, b = params.delta, params.beta
    return params.net_production * d * (1.0 - b) / (1.0 - d * b)


def solve(params: ModelParams) -> DeterministicSolution:
    r_bar = threshold(params)
    v = steady_profit(params)
    d, b = params.delta, params.beta
    return DeterministicSolution(
        r_bar=r_bar,
        v_at_r_bar=v,
        net_production=params.net_production,
        ratio=d * (1.0 - b) / (1.0 - d),
    )


def skips_needed(params: ModelParams, r: float, r_bar: float | None = None) -> int:
    """Number of no-contract rounds before the reference falls to the threshold."""
    if r_bar is None:
        r_bar = threshold(params)
    k = 0
    while r > r_bar:
        r *= params.beta
        k += 1
    return k


def value_function(params: ModelParams, r: float) -> float:
    """Employer's optimal average profit per round from reference ``r``.

    Below the threshold the contract is struck every round. Above it the
    employer waits ``k`` rounds (the fewest that bring the reference down
    to the threshold) and then contracts forever.
    """
    a = params.net_production
    r_bar = threshold(params)
    if r <= r_bar:
        return a - r
    k = skips_needed(params, r, r_bar)
    return params.delta**k * (a - params.beta**k * r)


def trajectory(params: ModelParams, r0: float, rounds: int) -> List[TrajectoryRow]:
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    r_bar = threshold(params)
    a = params.net_production
    rows = []
    r = r0
    for t in range(rounds):
        if r <= r_bar:
            # binding fixed wage at s = 1 and sigma = 0: a rent of a - r
            rows.append(TrajectoryRow(t, r, True, 1.0, r - a, 1.0 / params.c, r, a - r))
        else:
            rows.append(TrajectoryRow(t, r, False, 0.0, 0.0, 0.0, 0.0, 0.0))
            r = params.beta * r
    return rows


@dataclass(frozen=True)
class BananaRow:
    delta: float
    beta: float
    r_bar: float
    v_at_r_bar: float


def banana_curve(c: float, delta: float, beta_grid: Iterable[float]) -> List[BananaRow]:
    """Threshold and steady profit along a grid of memory parameters."""
    rows = []
    for beta in beta_grid:
        # validate the whole tuple so a bad beta is reported as such
        params = validate_params(c, 0.0, beta, delta, 0.0)
        rows.append(BananaRow(delta, beta, threshold(params), steady_profit(params)))
    return rows

