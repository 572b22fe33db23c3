"""Seeded multi-armed bandit simulator for copy variants.

Bernoulli Thompson sampling with Beta(1,1) priors is the default
policy; epsilon-greedy ships as a comparison flag. Posteriors are
frozen inside a batch and updated at batch boundaries. Everything
downstream of the seed is deterministic, so one seed gives one
bit-identical report. The first arm in the scenario is the control
against which lifts are reported.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import InvalidScenario

POLICIES = ("thompson", "epsilon_greedy")


@dataclass(frozen=True)
class Arm:
    arm_id: str
    true_ctr: float

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Arm":
        return cls(arm_id=data["arm_id"], true_ctr=float(data["true_ctr"]))


@dataclass(frozen=True)
class ArmStats:
    """Final per-arm tallies; posterior counts are prior + observations."""

    arm_id: str
    true_ctr: float
    impressions: int
    clicks: int
    empirical_ctr: float
    posterior_alpha: int
    posterior_beta: int
    posterior_mean: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "arm_id": self.arm_id,
            "true_ctr": self.true_ctr,
            "impressions": self.impressions,
            "clicks": self.clicks,
            "empirical_ctr": self.empirical_ctr,
            "posterior_alpha": self.posterior_alpha,
            "posterior_beta": self.posterior_beta,
            "posterior_mean": self.posterior_mean,
        }


@dataclass(frozen=True)
class SimReport:
    policy: str
    seed: int
    horizon: int
    batch: int
    arms: tuple[ArmStats, ...]
    decile_allocation: tuple[tuple[float, ...], ...]
    best_arm: str
    control_arm: str
    estimated_lift: float | None
    winner_true_lift: float | None

    def final_decile_share(self, arm_id: str) -> float:
        index = next(i for i, a in enumerate(self.arms) if a.arm_id == arm_id)
        return self.decile_allocation[-1][index]

    def to_dict(self) -> dict[str, Any]:
        return {
            "policy": self.policy,
            "seed": self.seed,
            "horizon": self.horizon,
            "batch": self.batch,
            "arms": [a.to_dict() for a in self.arms],
            "decile_allocation": [list(row) for row in self.decile_allocation],
            "best_arm": self.best_arm,
            "control_arm": self.control_arm,
            "estimated_lift": self.estimated_lift,
            "winner_true_lift": self.winner_true_lift,
        }

    def trace_rows(self) -> list[dict[str, Any]]:
        """Flat rows (decile, arm_id, share) for CSV plotting."""
        rows = []
        for decile, shares in enumerate(self.decile_allocation):
            for arm, share in zip(self.arms, shares):
                rows.append({"decile": decile, "arm_id": arm.arm_id, "share": share})
        return rows


def simulate(
    arms: Sequence[Arm],
    horizon: int,
    batch: int,
    seed: int,
    policy: str = "thompson",
    epsilon: float = 0.1,
) -> SimReport:
    """Route `horizon` impressions across arms and report the outcome."""
    if not arms:
        raise InvalidScenario("at least one arm is required")
    ids = [a.arm_id for a in arms]
    if len(set(ids)) != len(ids):
        raise InvalidScenario("arm_ids must be unique")
    for arm in arms:
        if not 0.0 <= arm.true_ctr <= 1.0:
            raise InvalidScenario(f"true_ctr for {arm.arm_id!r} must be in [0, 1]")
    if batch < 1 or horizon < batch:
        raise InvalidScenario("need horizon >= batch >= 1")
    if policy not in POLICIES:
        raise InvalidScenario(f"policy must be one of {POLICIES}")
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidScenario("epsilon must be in [0, 1]")

    n = len(arms)
    rng = np.random.default_rng(seed)
    true_ctr = np.array([a.true_ctr for a in arms], dtype=np.float64)
    successes = np.zeros(n, dtype=np.int64)
    failures = np.zeros(n, dtype=np.int64)
    choices = np.empty(horizon, dtype=np.int64)

    position = 0
    while position < horizon:
        size = min(batch, horizon - position)
        if policy == "thompson":
            samples = rng.beta(successes + 1.0, failures + 1.0, size=(size, n))
            chosen = np.argmax(samples, axis=1)
        else:
            means = (successes + 1.0) / (successes + failures + 2.0)
            exploit = int(np.argmax(means))
            explore = rng.random(size) < epsilon
            random_arms = rng.integers(0, n, size=size)
            chosen = np.where(explore, random_arms, exploit)
        clicked = rng.random(size) < true_ctr[chosen]
        np.add.at(successes, chosen, clicked)
        np.add.at(failures, chosen, ~clicked)
        choices[position : position + size] = chosen
        position += size

    impressions = successes + failures
    posterior_alpha = successes + 1
    posterior_beta = failures + 1
    posterior_mean = posterior_alpha / (posterior_alpha + posterior_beta)

    stats = tuple(
        ArmStats(
            arm_id=arms[i].arm_id,
            true_ctr=float(true_ctr[i]),
            impressions=int(impressions[i]),
            clicks=int(successes[i]),
            empirical_ctr=float(successes[i] / impressions[i]) if impressions[i] else 0.0,
            posterior_alpha=int(posterior_alpha[i]),
            posterior_beta=int(posterior_beta[i]),
            posterior_mean=float(posterior_mean[i]),
        )
        for i in range(n)
    )

    allocation: list[tuple[float, ...]] = []
    for chunk in np.array_split(choices, 10):
        if len(chunk) == 0:
            allocation.append(tuple(0.0 for _ in range(n)))
            continue
        counts = np.bincount(chunk, minlength=n)
        allocation.append(tuple(float(c) / len(chunk) for c in counts))

    best = int(np.argmax(posterior_mean))
    control_mean = float(posterior_mean[0])
    estimated_lift = (float(posterior_mean[best]) - control_mean) / control_mean
    winner_true_lift = (
        (float(true_ctr[best]) - float(true_ctr[0])) / float(true_ctr[0])
        if true_ctr[0] > 0
        else None
    )

    return SimReport(
        policy=policy,
        seed=seed,
        horizon=horizon,
        batch=batch,
        arms=stats,
        decile_allocation=tuple(allocation),
        best_arm=arms[best].arm_id,
        control_arm=arms[0].arm_id,
        estimated_lift=estimated_lift,
        winner_true_lift=winner_true_lift,
    )


def simulate_scenario(data: Mapping[str, Any]) -> SimReport:
    """Run a scenario document: {arms, horizon, batch, seed, policy?, epsilon?}."""
    try:
        arms = [Arm.from_dict(a) for a in data["arms"]]
        horizon = int(data["horizon"])
        batch = int(data["batch"])
        seed = int(data["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidScenario(f"malformed scenario: {exc}") from exc
    return simulate(
        arms,
        horizon,
        batch,
        seed,
        policy=data.get("policy", "thompson"),
        epsilon=float(data.get("epsilon", 0.1)),
    )
