"""Seeded Monte Carlo simulation of repeated rounds under an employer policy.

Each round: the policy sees the worker's current reference and picks
``(chi, s)``; the fixed wage is always the binding one; the noise is drawn
and the round is settled as in :func:`gigcontract.model.realize_round`.

Every path draws its noise from its own Philox stream keyed by the master
seed with the path index in the counter, so results do not depend on how
paths are split across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _backend
from .deterministic import threshold
from .dp import PolicyTable
from .errors import PolicyRangeError
from .model import ModelParams, drift_check  # noqa: F401  (re-exported)

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class EmployerPolicy:
    """How the employer picks ``(chi, s)`` from the worker's reference.

    ``closed_form``: contract iff ``r <= threshold(params)``, at share 1.
    ``tabulated``: read off a :class:`PolicyTable`; references outside its
    grid use the boundary node when ``clamp`` is set, otherwise they raise
    :class:`PolicyRangeError`.
    ``fixed``: the same ``(chi, s)`` every round.
    """

    kind: str = "closed_form"
    table: Optional[PolicyTable] = None
    chi: bool = True
    s: float = 1.0
    clamp: bool = True

    def __post_init__(self):
        if self.kind not in ("closed_form", "tabulated", "fixed"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "tabulated" and self.table is None:
            raise ValueError("a tabulated policy needs a PolicyTable")
        if self.kind != "tabulated" and self.table is not None:
            raise ValueError(f"a {self.kind} policy takes no table")

    @classmethod
    def closed_form(cls):
        return cls("closed_form")

    @classmethod
    def tabulated(cls, table: PolicyTable, clamp: bool = True):
        return cls("tabulated", table=table, clamp=clamp)

    @classmethod
    def fixed(cls, s: float = 1.0, chi: bool = True):
        return cls("fixed", chi=chi, s=s)

    def decide(self, params: ModelParams, r: float):
        if not math.isfinite(r):
            raise PolicyRangeError(f"reference {r!r} is not finite")
        if self.kind == "closed_form":
            return r <= threshold(params), 1.0
        if self.kind == "fixed":
            return self.chi, self.s
        g = self.table.grid
        if not self.clamp and not g.r_min <= r <= g.r_max:
            raise PolicyRangeError(f"reference {r} outside policy grid [{g.r_min}, {g.r_max}]")
        return self.table.decide(r)


@dataclass(frozen=True)
class SimulationConfig:
    r0: float
    rounds: int = 20
    paths: int = 10_000
    seed: int = 42
    burn_in: int = 0
    pin_reference: bool = False

    def __post_init__(self):
        if not math.isfinite(self.r0):
            raise ValueError(f"r0 must be finite, got {self.r0}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.paths < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths}")
        if not 0 <= self.seed <= _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0 <= self.burn_in < self.rounds:
            raise ValueError(f"burn_in must lie in [0, rounds), got {self.burn_in}")


class Estimate(NamedTuple):
    mean: float
    se: float


@dataclass(frozen=True)
class ReferenceStats:
    mean: float
    stdev: float
    min: float
    max: float


@dataclass(frozen=True, eq=False)
class PathRecord:
    """Per-round series, each of shape ``(paths, rounds)``."""

    r: np.ndarray
    chi: np.ndarray
    s: np.ndarray
    f: np.ndarray
    z: np.ndarray
    v: np.ndarray
    pi: np.ndarray
    epsilon: np.ndarray


@dataclass(frozen=True, eq=False)
class SimulationSummary:
    mean_profit_per_round: Estimate
    mean_net_wage_per_round: Estimate
    employment_rate: float
    mean_net_wage_given_contract: Estimate
    mean_discounted_profit: Estimate
    final_reference: ReferenceStats
    paths: int
    rounds: int
    record: Optional[PathRecord] = None

    def as_dict(self) -> dict:
        def est(e):
            return {"mean": e.mean, "se": e.se}

        fr = self.final_reference
        return {
            "paths": self.paths,
            "rounds": self.rounds,
            "mean_profit_per_round": est(self.mean_profit_per_round),
            "mean_net_wage_per_round": est(self.mean_net_wage_per_round),
            "employment_rate": self.employment_rate,
            "mean_net_wage_given_contract": est(self.mean_net_wage_given_contract),
            "mean_discounted_profit": est(self.mean_discounted_profit),
            "final_reference": {"mean": fr.mean, "stdev": fr.stdev, "min": fr.min, "max": fr.max},
        }


def path_noise(params: ModelParams, seed: int, start: int, stop: int, rounds: int) -> np.ndarray:
    """Noise for paths ``start..stop-1``; row ``p`` depends only on ``(seed, p)``."""
    eps = np.zeros((stop - start, rounds))
    if params.sigma == 0:
        return eps
    for row, p in enumerate(range(start, stop)):
        bitgen = np.random.Philox(key=seed, counter=[0, 0, p, 0])
        eps[row] = np.random.Generator(bitgen).standard_normal(rounds)
    return eps * params.sigma


def _mean_sd(x: np.ndarray):
    # identical samples (e.g. sigma = 0) get an exact mean and zero spread;
    # np.mean would pick up summation rounding
    if x.shape[0] == 0:
        return 0.0, 0.0
    if x.shape[0] == 1 or np.all(x == x[0]):
        return float(x[0]), 0.0
    return float(np.mean(x)), float(np.std(x, ddof=1))


def _estimate(x: np.ndarray) -> Estimate:
    mean, sd = _mean_sd(x)
    return Estimate(mean, sd / math.sqrt(max(x.shape[0], 1)))


def _policy_args(params: ModelParams, policy: EmployerPolicy):
    empty_chi = np.zeros(1, dtype=np.uint8)
    empty_s = np.zeros(1)
    if policy.kind == "closed_form":
        return 0, threshold(params), 1.0, empty_chi, empty_s, 0.0, 1.0
    if policy.kind == "fixed":
        r_bar = math.inf if policy.chi else -math.inf
        return 0, r_bar, float(policy.s), empty_chi, empty_s, 0.0, 1.0
    t = policy.table
    return (1, 0.0, 0.0, np.ascontiguousarray(t.chi, dtype=np.uint8),
            np.ascontiguousarray(t.s, dtype=np.float64), t.grid.r_min, t.grid.r_max)


def simulate(
    params: ModelParams,
    policy: EmployerPolicy,
    config: SimulationConfig,
    workers: int = 1,
    record: bool = False,
    backend: Optional[str] = None,
) -> SimulationSummary:
    """Run ``config.paths`` independent paths of ``config.rounds`` rounds.

    Per-round means skip the first ``config.burn_in`` rounds; the discounted
    profit ``(1-delta) sum_t delta^t pi_t`` always starts at round 0.
    With ``record`` the full per-round series are kept on the summary.
    """
    kernel = _backend.get(backend)
    mode, r_bar, s_const, g_chi, g_s, r_min, r_max = _policy_args(params, policy)
    n, rounds = config.paths, config.rounds

    def run(bounds):
        start, stop = bounds
        eps = path_noise(params, config.seed, start, stop, rounds)
        agg, rec, oor = kernel.simulate_paths(
            float(config.r0), eps, params.c, params.gamma, params.beta, params.delta,
            params.sigma, mode, r_bar, s_const, g_chi, g_s, r_min, r_max,
            bool(config.pin_reference), config.burn_in, bool(record),
        )
        return np.asarray(agg), np.asarray(rec), int(oor), eps

    workers = max(1, min(int(workers), n))
    edges = np.linspace(0, n, workers + 1).astype(int)
    chunks = list(zip(edges[:-1], edges[1:]))
    if workers == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))

    out_of_range = sum(r[2] for r in results)
    if policy.kind == "tabulated" and out_of_range and not policy.clamp:
        raise PolicyRangeError(
            f"{out_of_range} policy queries fell outside [{r_min}, {r_max}]"
        )
    agg = np.concatenate([r[0] for r in results])
    r_final = agg[:, 5]
    if not np.all(np.isfinite(r_final)):
        raise PolicyRangeError("reference left the finite range")

    counted = rounds - config.burn_in
    n_con = agg[:, 2]
    with_contract = n_con > 0
    summary_record = None
    if record:
        rec = np.concatenate([r[1] for r in results], axis=1)
        eps = np.concatenate([r[3] for r in results])
        summary_record = PathRecord(rec[0], rec[1].astype(bool), rec[2], rec[3],
                                    rec[4], rec[5], rec[6], eps)

    return SimulationSummary(
        mean_profit_per_round=_estimate(agg[:, 0] / counted),
        mean_net_wage_per_round=_estimate(agg[:, 1] / counted),
        employment_rate=float(n_con.sum() / (n * counted)),
        mean_net_wage_given_contract=_estimate(agg[with_contract, 3] / n_con[with_contract]),
        mean_discounted_profit=_estimate(agg[:, 4]),
        final_reference=ReferenceStats(
            *_mean_sd(r_final),
            float(np.min(r_final)),
            float(np.max(r_final)),
        ),
        paths=n,
        rounds=rounds,
        record=summary_record,
    )
