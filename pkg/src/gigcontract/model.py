"""Per-round contract mathematics.

One round of the game: the employer offers a linear wage ``w = s*x + f``,
the myopic CARA worker picks effort ``z`` and accepts if the certainty
equivalent of the offer is at least his reference value ``R``. Output is
``x = z + eps`` with ``eps ~ N(0, sigma^2)``.

Every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoContract, ParticipationViolated

#: Certainty equivalents may undershoot the reference by this much and
#: still count as accepted (binding offers are built with rounding error).
PARTICIPATION_TOL = 1e-9

# exp() overflows just above 709; clip before that.
_EXP_CAP = 700.0


@dataclass(frozen=True)
class ModelParams:
    """Exogenous parameters of worker, employer and noise."""

    c: float
    gamma: float
    beta: float
    delta: float
    sigma: float

    def __post_init__(self):
        validate_params(self.c, self.gamma, self.beta, self.delta, self.sigma)

    @property
    def net_production(self) -> float:
        """Output minus effort cost at full share, ``1/(2c)``."""
        return 1.0 / (2.0 * self.c)

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "gamma": self.gamma,
            "beta": self.beta,
            "delta": self.delta,
            "sigma": self.sigma,
        }


@dataclass(frozen=True)
class Contract:
    chi: bool
    s: float = 0.0
    f: float = 0.0


@dataclass(frozen=True)
class WorkerState:
    r: float


@dataclass(frozen=True)
class RoundOutcome:
    epsilon: float
    z: float
    x: float
    w: float
    v: float
    pi: float
    r_next: float


def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def validate_params(c, gamma, beta, delta, sigma) -> ModelParams:
    """Check the five raw parameters and return them as :class:`ModelParams`.

    Raises :class:`DomainError` naming the first offending field.
    """
    checks = (
        ("c", c, lambda v: v > 0, "c > 0"),
        ("gamma", gamma, lambda v: v >= 0, "gamma >= 0"),
        ("beta", beta, lambda v: 0 < v < 1, "0 < beta < 1"),
        ("delta", delta, lambda v: 0 < v < 1, "0 < delta < 1"),
        ("sigma", sigma, lambda v: v >= 0, "sigma >= 0"),
    )
    for name, value, ok, requirement in checks:
        if isinstance(value, bool) or not _finite(value) or not ok(value):
            raise DomainError(name, value, requirement)
    # object.__new__ skips __post_init__, which would recurse back here
    params = object.__new__(ModelParams)
    for name, value, _, _ in checks:
        object.__setattr__(params, name, float(value))
    return params


def optimal_effort(params: ModelParams, contract: Contract) -> float:
    """Worker's best response ``z* = chi * s / c``."""
    if not contract.chi:
        return 0.0
    return contract.s / params.c


def certainty_equivalent(params: ModelParams, contract: Contract, z: float) -> float:
    """Cash amount the worker values as much as the risky net wage at effort ``z``."""
    if not contract.chi:
        raise NoContract("certainty equivalent is undefined without a contract")
    s = contract.s
    return (
        s * z
        + contract.f
        - params.c * z * z / 2.0
        - params.gamma * s * s * params.sigma**2 / 2.0
    )


def expected_utility(params: ModelParams, contract: Contract, z: float) -> float:
    """CARA expected utility ``-exp(-gamma * CE)``; zero without a contract.

    ``z`` may be an array. Exponents beyond the float range saturate to ``-inf``.
    """
    if not contract.chi:
        return 0.0 if np.ndim(z) == 0 else np.zeros(np.shape(z))
    arg = -params.gamma * certainty_equivalent(params, contract, z)
    u = np.where(arg > _EXP_CAP, -np.inf, -np.exp(np.minimum(arg, _EXP_CAP)))
    return float(u) if u.ndim == 0 else u


def binding_fix(params: ModelParams, r: float, s: float) -> float:
    """Lowest fixed wage the worker with reference ``r`` accepts at share ``s``."""
    return r - s * s / (2.0 * params.c) + params.gamma * s * s * params.sigma**2 / 2.0


def expected_profit_binding(params: ModelParams, r: float, s: float) -> float:
    """Employer's expected one-round profit when ``f`` is set by :func:`binding_fix`."""
    return (
        s / params.c
        - s * s * (1.0 / (2.0 * params.c) + params.gamma * params.sigma**2 / 2.0)
        - r
    )


def one_shot_share(params: ModelParams) -> float:
    return 1.0 / (1.0 + params.c * params.gamma * params.sigma**2)


def reference_update(params: ModelParams, r: float, v: float, chi: bool) -> float:
    if not chi:
        return params.beta * r
    return params.beta * r + (1.0 - params.beta) * v


def drift_check(params: ModelParams, s: float) -> float:
    """Expected change of the reference over one contracted round at share ``s``.

    Under a binding offer ``R_next - R = (1-beta)(s*eps + gamma s^2 sigma^2 / 2)``;
    the noise term has mean zero.
    """
    return (1.0 - params.beta) * params.gamma * s * s * params.sigma**2 / 2.0


def accepts(params: ModelParams, contract: Contract, r: float) -> bool:
    """Participation check, done on certainty equivalents to avoid overflow."""
    if not contract.chi:
        return False
    z = optimal_effort(params, contract)
    return certainty_equivalent(params, contract, z) >= r - PARTICIPATION_TOL


def realize_round(
    params: ModelParams, state: WorkerState, contract: Contract, epsilon: float
) -> RoundOutcome:
    """Play one round given the noise draw ``epsilon``.

    Raises :class:`ParticipationViolated` if a contract is offered that the
    worker would refuse.
    """
    r = state.r
    if not contract.chi:
        return RoundOutcome(epsilon, 0.0, 0.0, 0.0, 0.0, 0.0, params.beta * r)
    if not accepts(params, contract, r):
        raise ParticipationViolated(
            f"offer s={contract.s!r}, f={contract.f!r} is below reference r={r!r}"
        )
    s, f, c = contract.s, contract.f, params.c
    z = s / c
    x = z + epsilon
    w = s * x + f
    cost = c * z * z / 2.0
    v = w - cost
    pi = (1.0 - s) * x - f
    r_next = params.beta * r + (1.0 - params.beta) * v
    return RoundOutcome(epsilon, z, x, w, v, pi, r_next)
