"""Value iteration for the employer's stochastic control problem.

State: the worker's reference ``R`` on a uniform grid. Each round the
employer either skips (value ``delta * V(beta R)``) or contracts at share
``s`` with the binding fixed wage, earning expected profit
``s/c - s^2 (1/(2c) + gamma sigma^2 / 2) - R`` while the reference moves to
``R + (1-beta)(s eps + gamma s^2 sigma^2 / 2)``. Values are averages per
round, so the flow payoff carries a ``(1 - delta)`` factor.

The expectation over ``eps`` uses Gauss-Hermite quadrature; the share is
found by a coarse scan on ``[0, 2]`` refined by golden-section search.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from . import _backend
from .errors import NoConvergence, QuadratureError
from .model import ModelParams

log = logging.getLogger(__name__)

DEFAULT_QUAD_NODES = 15
MIN_QUAD_NODES = 7
SHARE_RANGE = (0.0, 2.0)
SHARE_COARSE_POINTS = 65
SHARE_TOL = 1e-8
# iterates may be nonincreasing only up to rounding
MONOTONE_TOL = 1e-12
CONTRACTION_BURN_IN = 5
CONTRACTION_SLACK = 1e-13


@dataclass(frozen=True)
class GridSpec:
    r_min: float
    r_max: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max)):
            raise ValueError("grid bounds must be finite")
        if not self.r_min < self.r_max:
            raise ValueError(f"need r_min < r_max, got {self.r_min} >= {self.r_max}")
        if int(self.points) != self.points or self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")

    @classmethod
    def default(cls, params: ModelParams, points: int = 601) -> "GridSpec":
        """Deterministic range widened by four noise standard deviations."""
        r_min = min(0.0, -4.0 * params.sigma)
        r_max = params.net_production + 4.0 * params.sigma * (1.0 - params.beta)
        return cls(r_min, r_max, points)

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.points - 1)

    def nodes(self) -> np.ndarray:
        return self.r_min + np.arange(self.points) * self.spacing


@dataclass(frozen=True, eq=False)
class ValueTable:
    grid: GridSpec
    values: np.ndarray

    def __call__(self, r):
        """Linear interpolation with clamping outside the grid."""
        g = self.grid
        out = _backend.get("python")._interp(
            self.values, g.r_min, g.r_max, g.spacing, np.asarray(r, dtype=np.float64)
        )
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class PolicyTable:
    grid: GridSpec
    chi: np.ndarray
    s: np.ndarray

    def decide(self, r: float) -> Tuple[bool, float]:
        """Policy at an arbitrary reference: nearest node for ``chi``, interpolated share."""
        g = self.grid
        n = g.points
        if r <= g.r_min:
            return bool(self.chi[0]), float(self.s[0])
        if r >= g.r_max:
            return bool(self.chi[-1]), float(self.s[-1])
        u = (r - g.r_min) / g.spacing
        i = min(int(u), n - 2)
        w = u - i
        c0, c1 = bool(self.chi[i]), bool(self.chi[i + 1])
        chi = c0 if w <= 0.5 else c1
        if c0 and c1:
            s = self.s[i] + w * (self.s[i + 1] - self.s[i])
        elif c0:
            s = self.s[i]
        else:
            s = self.s[i + 1]
        return chi, float(s)


@dataclass
class SolverReport:
    iterations: int
    final_sup_norm_delta: float
    threshold_estimate: Optional[float]
    threshold_structure_ok: bool
    converged: bool = True
    monotone_ok: bool = True
    contraction_ok: bool = True
    max_contraction_ratio: float = 0.0
    boundary_share_nodes: int = 0
    deltas: List[float] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_sup_norm_delta": self.final_sup_norm_delta,
            "threshold_estimate": self.threshold_estimate,
            "threshold_structure_ok": self.threshold_structure_ok,
            "converged": self.converged,
            "monotone_ok": self.monotone_ok,
            "contraction_ok": self.contraction_ok,
            "max_contraction_ratio": self.max_contraction_ratio,
            "boundary_share_nodes": self.boundary_share_nodes,
        }


def gauss_hermite(params: ModelParams, quad_nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    """Standard normal nodes and weights (summing to one) for ``E f(eps / sigma)``.

    With ``sigma == 0`` the expectation is exact at a single node at zero.
    """
    if isinstance(quad_nodes, bool) or int(quad_nodes) != quad_nodes or quad_nodes < 1:
        raise QuadratureError(f"quad_nodes must be a positive integer, got {quad_nodes!r}")
    if params.sigma == 0:
        return np.zeros(1), np.ones(1)
    if quad_nodes < MIN_QUAD_NODES:
        raise QuadratureError(
            f"quad_nodes={quad_nodes} is too coarse for sigma > 0 (need >= {MIN_QUAD_NODES})"
        )
    x, w = np.polynomial.hermite_e.hermegauss(int(quad_nodes))
    return x, w / w.sum()


def _backup(params, values, grid, qx, qw, backend=None):
    k = _backend.get(backend)
    new, chi, s, vc, vn = k.bellman_backup(
        np.ascontiguousarray(values, dtype=np.float64),
        grid.r_min, grid.r_max,
        params.c, params.gamma, params.beta, params.delta, params.sigma,
        qx, qw,
        SHARE_RANGE[0], SHARE_RANGE[1], SHARE_COARSE_POINTS, SHARE_TOL,
    )
    return (np.asarray(new), np.asarray(chi).astype(bool), np.asarray(s),
            np.asarray(vc), np.asarray(vn))


def bellman_backup(params: ModelParams, v: ValueTable, quad_nodes: int = DEFAULT_QUAD_NODES,
                   backend: Optional[str] = None) -> ValueTable:
    """Apply the Bellman operator once."""
    qx, qw = gauss_hermite(params, quad_nodes)
    new, *_ = _backup(params, v.values, v.grid, qx, qw, backend)
    return ValueTable(v.grid, new)


def threshold_structure(grid: GridSpec, chi, contract_value, skip_value):
    """Check that ``chi`` switches at most once, from contract to skip.

    Returns ``(ok, estimate)``. The estimate locates the crossing by linear
    interpolation of the contract advantage between the two nodes that
    bracket it; it is ``None`` if the policy never switches on the grid.
    """
    chi = np.asarray(chi, dtype=bool)
    if chi.all() or not chi.any():
        return True, None
    k = int(np.argmin(chi))  # first skip node
    if k == 0 or chi[k:].any():
        return False, None
    r = grid.nodes()
    gap = np.asarray(contract_value) - np.asarray(skip_value)
    g0, g1 = gap[k - 1], gap[k]
    frac = g0 / (g0 - g1) if g0 > g1 else 0.5
    return True, float(r[k - 1] + frac * grid.spacing)


def solve(
    params: ModelParams,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    quad_nodes: int = DEFAULT_QUAD_NODES,
    backend: Optional[str] = None,
):
    """Value iteration from ``V = 0`` to a sup-norm change of at most ``tol``.

    Returns ``(ValueTable, PolicyTable, SolverReport)``. Raises
    :class:`NoConvergence`, carrying the last iterate, if ``max_iter`` is hit.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if grid is None:
        grid = GridSpec.default(params)
    qx, qw = gauss_hermite(params, quad_nodes)

    v = np.zeros(grid.points)
    deltas = []
    monotone_ok = True
    converged = False
    for it in range(1, max_iter + 1):
        new, chi, s, vc, vn = _backup(params, v, grid, qx, qw, backend)
        deltas.append(float(np.max(np.abs(new - v))))
        if np.any(np.diff(new) > MONOTONE_TOL):
            monotone_ok = False
        v = new
        if deltas[-1] <= tol:
            converged = True
            break

    # policy greedy with respect to the final iterate
    _, chi, s, vc, vn = _backup(params, v, grid, qx, qw, backend)
    ok, estimate = threshold_structure(grid, chi, vc, vn)

    ratios = [
        deltas[k + 1] / deltas[k]
        for k in range(CONTRACTION_BURN_IN, len(deltas) - 1)
        if deltas[k] > 0
    ]
    contraction_ok = all(
        deltas[k + 1] <= params.delta * deltas[k] + CONTRACTION_SLACK
        for k in range(CONTRACTION_BURN_IN, len(deltas) - 1)
    )
    lo, hi = SHARE_RANGE
    boundary = int(np.count_nonzero(chi & ((s <= lo + 1e-6) | (s >= hi - 1e-6))))

    report = SolverReport(
        iterations=len(deltas),
        final_sup_norm_delta=deltas[-1],
        threshold_estimate=estimate,
        threshold_structure_ok=ok,
        converged=converged,
        monotone_ok=monotone_ok,
        contraction_ok=contraction_ok,
        max_contraction_ratio=max(ratios, default=0.0),
        boundary_share_nodes=boundary,
        deltas=deltas,
    )
    if not ok:
        log.warning("contract decision is not a single threshold on the grid")
    if boundary:
        log.warning("share hit the search boundary at %d nodes", boundary)

    value = ValueTable(grid, v)
    policy = PolicyTable(grid, chi, np.where(chi, s, 0.0))
    if not converged:
        raise NoConvergence(
            f"sup-norm change {deltas[-1]:.3g} > tol {tol:.3g} after {max_iter} iterations",
            value=value, policy=policy, report=report,
        )
    return value, policy, report


def policy_value_check(params: ModelParams, policy, r0: float, sim_config, workers: int = 1):
    """Monte Carlo estimate of the discounted average profit of ``policy`` from ``r0``.

    ``policy`` is a :class:`PolicyTable` or an ``EmployerPolicy``. Returns
    the simulator's ``Estimate`` (mean and standard error).
    """
    from .simulator import EmployerPolicy, simulate

    if isinstance(policy, PolicyTable):
        policy = EmployerPolicy.tabulated(policy)
    summary = simulate(params, policy, replace(sim_config, r0=r0), workers=workers)
    return summary.mean_discounted_profit
