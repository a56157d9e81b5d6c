"""Oracle-side evaluation of played trajectories.

Everything here is post-hoc and uses the true game tables; learners never
see these quantities.  The best-feasible-policy benchmark decomposes per
context, so it is computed by brute force over actions at each realized
context.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .game import GameDefinition, Trajectory
from .gp import ConfidenceParams, beta


class NoFeasibleActionError(ValueError):
    """A realized context admits no action satisfying the true constraints."""


def _rounds_by_context(trajectory: Trajectory) -> dict[int, list[int]]:
    by_ctx: dict[int, list[int]] = {}
    for idx, rec in enumerate(trajectory.records):
        by_ctx.setdefault(int(rec.context), []).append(idx)
    return by_ctx


def _counterfactual_reward(
    game: GameDefinition, player: int, action: int, joint, z: int
) -> float:
    replaced = list(joint)
    replaced[player] = action
    return game.reward(player, tuple(replaced), z)


def best_feasible_policy(
    trajectory: Trajectory, game: GameDefinition, player: int
) -> dict[int, int]:
    """Best fixed feasible context-to-action map against the realized play."""
    policy: dict[int, int] = {}
    for z, idxs in _rounds_by_context(trajectory).items():
        feasible = np.flatnonzero(game.feasible_actions(player, z))
        if len(feasible) == 0:
            raise NoFeasibleActionError(
                f"player {player} has no feasible action at context {z}"
            )
        totals = [
            sum(
                _counterfactual_reward(
                    game, player, a, trajectory.records[i].actions, z
                )
                for i in idxs
            )
            for a in feasible
        ]
        policy[z] = int(feasible[int(np.argmax(totals))])
    return policy


def constrained_regret(
    trajectory: Trajectory, game: GameDefinition, player: int
) -> np.ndarray:
    """Cumulative regret against the T-round best feasible policy."""
    policy = best_feasible_policy(trajectory, game, player)
    increments = [
        _counterfactual_reward(
            game, player, policy[int(rec.context)], rec.actions, int(rec.context)
        )
        - rec.true_rewards[player]
        for rec in trajectory.records
    ]
    return np.cumsum(increments) if increments else np.zeros(0)


def cumulative_violations(
    trajectory: Trajectory, game: GameDefinition, player: int
) -> np.ndarray:
    """Per-constraint cumulative positive parts, shape (M, T)."""
    M = game.num_constraints
    T = trajectory.num_rounds
    out = np.zeros((M, T))
    for t, rec in enumerate(trajectory.records):
        out[:, t] = np.maximum(rec.true_constraints[player], 0.0)
    return np.cumsum(out, axis=1)


def empirical_policy(trajectory: Trajectory) -> dict[int, dict[tuple, float]]:
    """Per-context empirical distribution over played joint actions."""
    if trajectory.num_rounds < 1:
        raise ValueError("empty trajectory")
    policy: dict[int, dict[tuple, float]] = {}
    for z, idxs in _rounds_by_context(trajectory).items():
        counts: dict[tuple, int] = {}
        for i in idxs:
            a = trajectory.records[i].actions
            counts[a] = counts.get(a, 0) + 1
        policy[z] = {a: c / len(idxs) for a, c in counts.items()}
    return policy


def cce_epsilon(
    trajectory: Trajectory, game: GameDefinition
) -> tuple[float, dict]:
    """Equilibrium accuracy of the empirical joint policy.

    Returns the largest of the per-player unilateral reward gaps over
    feasible deviation policies and the per-player per-constraint expected
    violations, clamped below at zero, together with the per-player terms.
    """
    T = trajectory.num_rounds
    if T < 1:
        raise ValueError("empty trajectory")
    by_ctx = _rounds_by_context(trajectory)
    gaps = {}
    violations = {}
    for i in range(game.num_players):
        gap_total = 0.0
        viol_total = np.zeros(game.num_constraints)
        for z, idxs in by_ctx.items():
            feasible = np.flatnonzero(game.feasible_actions(i, z))
            if len(feasible) == 0:
                raise NoFeasibleActionError(
                    f"player {i} has no feasible action at context {z}"
                )
            # expectations are over the empirical joint distribution at z,
            # i.e. averages over the recorded rounds
            deviation = max(
                sum(
                    _counterfactual_reward(
                        game, i, a, trajectory.records[t].actions, z
                    )
                    for t in idxs
                )
                for a in feasible
            )
            realized = sum(
                trajectory.records[t].true_rewards[i] for t in idxs
            )
            gap_total += deviation - realized
            for t in idxs:
                viol_total += np.maximum(
                    trajectory.records[t].true_constraints[i], 0.0
                )
        gaps[i] = gap_total / T
        violations[i] = viol_total / T
    terms = [g for g in gaps.values()]
    terms += [v for vs in violations.values() for v in vs]
    eps = max(0.0, max(terms)) if terms else 0.0
    return eps, {"reward_gaps": gaps, "violation_rates": violations}


def adanormal_regret_bound(C_a: float, all_C: np.ndarray) -> float:
    """Per-expert sleeping regret bound sqrt(3*C_a*(ln K + ln B + ln(1+ln K)))."""
    K = len(all_C)
    B = 1.0 + 1.5 / K * float(np.sum(1.0 + np.log1p(all_C)))
    return math.sqrt(3.0 * C_a * (math.log(K) + math.log(B) + math.log(1.0 + math.log(K))))


def theorem_bounds(
    num_actions: int,
    num_contexts: int,
    T: int,
    delta: float,
    reward_params: ConfidenceParams,
    reward_info_gain: float,
    constraint_params: list[ConfidenceParams],
    constraint_info_gains: list[float],
    expert_magnitudes: list[np.ndarray] | None = None,
) -> tuple[float, list[float]]:
    """Explicit high-probability regret and violation bound values.

    ``expert_magnitudes`` holds the realized per-context cumulative
    magnitude vectors; when omitted the horizon-based cap on the
    weight-spread term B, 5/2 + 3/2 * log(1+T), is used instead.
    """
    K = num_actions
    if expert_magnitudes:
        B = max(
            1.0 + 1.5 / K * float(np.sum(1.0 + np.log1p(np.maximum(C, 0.0))))
            for C in expert_magnitudes
        )
    else:
        B = 2.5 + 1.5 * math.log1p(T)
    expert_term = math.sqrt(
        3.0 * num_contexts * T
        * (math.log(K) + math.log(B) + math.log(1.0 + math.log(K)))
    )
    martingale_term = math.sqrt(T / 2.0 * math.log(2.0 / delta))
    sigma0 = reward_params.noise_scale
    c1 = 8.0 / math.log1p(1.0 / sigma0**2)
    beta0 = beta(reward_params, reward_info_gain)
    gp_term = c1 * beta0 * math.sqrt(T * reward_info_gain)
    regret_bound = expert_term + martingale_term + gp_term
    violation_bounds = []
    for params, gain in zip(constraint_params, constraint_info_gains):
        c1_m = 8.0 / math.log1p(1.0 / params.noise_scale**2)
        violation_bounds.append(
            c1_m * beta(params, gain) * math.sqrt(T * gain)
        )
    return regret_bound, violation_bounds


@dataclass
class MetricsReport:
    """Per-player oracle metrics for one simulated run."""

    regret: dict[int, np.ndarray]
    violations: dict[int, np.ndarray]
    best_policy: dict[int, dict[int, int]]
    cce_eps: float
    cce_terms: dict
    status: str
    extra: dict = field(default_factory=dict)

    def final_regret(self, player: int) -> float:
        r = self.regret[player]
        return float(r[-1]) if len(r) else 0.0

    def final_violations(self, player: int) -> np.ndarray:
        v = self.violations[player]
        return v[:, -1] if v.shape[1] else np.zeros(v.shape[0])


def compute_report(trajectory: Trajectory, game: GameDefinition) -> MetricsReport:
    regret = {}
    violations = {}
    best = {}
    for i in range(game.num_players):
        regret[i] = constrained_regret(trajectory, game, i)
        violations[i] = cumulative_violations(trajectory, game, i)
        best[i] = best_feasible_policy(trajectory, game, i)
    eps, terms = cce_epsilon(trajectory, game)
    return MetricsReport(
        regret=regret,
        violations=violations,
        best_policy=best,
        cce_eps=eps,
        cce_terms=terms,
        status=trajectory.status,
    )
