"""Ground-truth games, the random-game generator, and the round engine.

The engine is the only owner of true reward/constraint values; players
receive nothing beyond the noisy bandit feedback tuple (own noisy reward,
own noisy constraint values, opponents' actions), enforced by the call
signature of ``Player.observe_feedback``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, cholesky

from .kernels import (
    KernelSpec,
    Product,
    SquaredExponential,
    cross,
    gram,
    kernel_from_config,
    kernel_to_config,
)
from .strategy import EpsilonNet, InfeasibilityDeclared, Player

GENERATOR_SCHEME = "gp-posterior-mean-of-sampled-observations-v1"


@dataclass
class GameDefinition:
    """Tabulated N-player game over finite actions and finite contexts."""

    num_players: int
    num_actions: int
    num_contexts: int
    rewards: list[np.ndarray]          # per player, shape (K,)*N + (Z,)
    constraints: list[np.ndarray]      # per player, shape (M, K) or (M, K, Z)
    reward_noise: list[float]
    constraint_noise: list[list[float]]
    metadata: dict = field(default_factory=dict)

    @property
    def num_constraints(self) -> int:
        return self.constraints[0].shape[0] if self.constraints else 0

    def context_embedding(self, z: int) -> np.ndarray:
        """Numeric context vector in [0,1]^d for continuous-context learners."""
        values = self.metadata.get("context_values")
        if values is not None:
            return np.asarray(values[z], dtype=float)
        return np.array([(z + 0.5) / self.num_contexts])

    def reward(self, player: int, joint_action, z: int) -> float:
        return float(self.rewards[player][tuple(joint_action) + (z,)])

    def constraint_values(self, player: int, own_action: int, z: int) -> np.ndarray:
        table = self.constraints[player]
        if table.size == 0:
            return np.zeros(0)
        if table.ndim == 3:
            return table[:, own_action, z].astype(float)
        return table[:, own_action].astype(float)

    def feasible_actions(self, player: int, z: int) -> np.ndarray:
        """Boolean mask of actions with all true constraints <= 0."""
        mask = np.ones(self.num_actions, dtype=bool)
        for a in range(self.num_actions):
            mask[a] = bool(np.all(self.constraint_values(player, a, z) <= 0.0))
        return mask

    def check_feasible(self) -> bool:
        """Every (player, context) admits at least one feasible action."""
        return all(
            self.feasible_actions(i, z).any()
            for i in range(self.num_players)
            for z in range(self.num_contexts)
        )

    def to_json(self) -> str:
        doc = {
            "num_players": self.num_players,
            "num_actions": self.num_actions,
            "num_contexts": self.num_contexts,
            "rewards": [r.tolist() for r in self.rewards],
            "constraints": [c.tolist() for c in self.constraints],
            "reward_noise": self.reward_noise,
            "constraint_noise": self.constraint_noise,
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GameDefinition":
        doc = json.loads(text)
        return cls(
            num_players=doc["num_players"],
            num_actions=doc["num_actions"],
            num_contexts=doc["num_contexts"],
            rewards=[np.asarray(r, dtype=float) for r in doc["rewards"]],
            constraints=[np.asarray(c, dtype=float) for c in doc["constraints"]],
            reward_noise=[float(s) for s in doc["reward_noise"]],
            constraint_noise=[[float(s) for s in row] for row in doc["constraint_noise"]],
            metadata=doc.get("metadata", {}),
        )


@dataclass
class RoundRecord:
    t: int
    context: int | np.ndarray
    actions: tuple[int, ...]
    noisy_rewards: np.ndarray
    noisy_constraints: list[np.ndarray]
    true_rewards: np.ndarray
    true_constraints: list[np.ndarray]


@dataclass
class Trajectory:
    records: list[RoundRecord]
    status: str = "completed"
    infeasible_player: int | None = None
    infeasible_round: int | None = None

    @property
    def num_rounds(self) -> int:
        return len(self.records)


def _sample_gp_function(
    rng: np.random.Generator,
    kernel: KernelSpec,
    grid: np.ndarray,
    num_samples: int,
    points_per_sample: int,
    obs_noise: float,
) -> np.ndarray:
    """Posterior mean on ``grid`` after conditioning on sampled observations.

    Draws ``num_samples`` independent functions from the GP prior, records
    each at ``points_per_sample`` uniformly chosen grid points, and returns
    the posterior mean of a single zero-mean GP conditioned on the pooled
    observations with noise variance ``obs_noise``.
    """
    obs_x = []
    obs_y = []
    for _ in range(num_samples):
        idx = rng.choice(len(grid), size=points_per_sample, replace=False)
        pts = grid[idx]
        K = gram(kernel, pts) + 1e-9 * np.eye(len(pts))
        L = cholesky(K, lower=True)
        obs_x.append(pts)
        obs_y.append(L @ rng.standard_normal(len(pts)))
    X = np.concatenate(obs_x)
    y = np.concatenate(obs_y)
    A = gram(kernel, X) + obs_noise * np.eye(len(X))
    alpha = cho_solve(cho_factor(A, lower=True), y)
    return cross(kernel, grid, X) @ alpha


def default_reward_kernel(num_players: int) -> KernelSpec:
    """Product of an action kernel (lengthscale 2) and a context kernel (0.5)."""
    return Product(
        left=SquaredExponential(lengthscale=2.0),
        right=SquaredExponential(lengthscale=0.5),
        split_index=num_players,
    )


def default_constraint_kernel() -> KernelSpec:
    return SquaredExponential(lengthscale=0.5)


def generate_random_game(
    seed: int,
    num_players: int = 3,
    num_actions: int = 7,
    num_contexts: int = 5,
    num_constraints: int = 1,
    num_gp_samples: int = 10,
    points_per_sample: int = 10,
    obs_noise: float = 0.1,
    noise_scale: float = 1.0,
    feasible_quantile: float = 0.25,
) -> GameDefinition:
    """Random N-player game with GP-smooth rewards and constraints.

    Rewards live on the joint-action x context grid and are min-max
    rescaled to [0, 1] per player; constraints are context-free over own
    actions and shifted by their ``feasible_quantile`` quantile so roughly
    that fraction of actions is feasible, which in particular guarantees a
    feasible action per player.
    """
    if num_actions < 2 or num_contexts < 1 or num_players < 2:
        raise ValueError("degenerate grid")
    rng = np.random.default_rng(seed)
    k_r = default_reward_kernel(num_players)
    k_g = default_constraint_kernel()

    action_axes = np.meshgrid(
        *[np.arange(num_actions, dtype=float)] * num_players, indexing="ij"
    )
    ctx = np.arange(num_contexts, dtype=float)
    grid = np.stack(
        [np.repeat(ax.ravel(), num_contexts) for ax in action_axes]
        + [np.tile(ctx, num_actions**num_players)],
        axis=1,
    )
    shape = (num_actions,) * num_players + (num_contexts,)

    rewards = []
    for _ in range(num_players):
        values = _sample_gp_function(
            rng, k_r, grid, num_gp_samples,
            min(points_per_sample, len(grid)), obs_noise,
        )
        lo, hi = values.min(), values.max()
        if hi - lo < 1e-12:
            values = np.full_like(values, 0.5)
        else:
            values = (values - lo) / (hi - lo)
        rewards.append(values.reshape(shape))

    action_grid = np.arange(num_actions, dtype=float)[:, None]
    constraints = []
    for _ in range(num_players):
        rows = []
        for _ in range(num_constraints):
            g = _sample_gp_function(
                rng, k_g, action_grid, num_gp_samples,
                min(points_per_sample, num_actions), obs_noise,
            )
            rows.append(g - np.quantile(g, feasible_quantile))
        table = np.asarray(rows)
        if table.size and not np.any(np.all(table <= 0.0, axis=0)):
            # per-constraint quantile shifts can leave no jointly feasible
            # action; force the least-violating action to be feasible
            best = int(np.argmax(-table.max(axis=0)))
            table -= np.maximum(table[:, best], 0.0)[:, None]
        constraints.append(table)

    game = GameDefinition(
        num_players=num_players,
        num_actions=num_actions,
        num_contexts=num_contexts,
        rewards=rewards,
        constraints=constraints,
        reward_noise=[noise_scale] * num_players,
        constraint_noise=[[noise_scale] * num_constraints] * num_players,
        metadata={
            "seed": seed,
            "generator_scheme": GENERATOR_SCHEME,
            "num_gp_samples": num_gp_samples,
            "points_per_sample": points_per_sample,
            "obs_noise": obs_noise,
            "feasible_quantile": feasible_quantile,
            "reward_kernel": kernel_to_config(k_r),
            "constraint_kernel": kernel_to_config(k_g),
        },
    )
    assert game.check_feasible(), "generated game violates feasibility"
    return game


def uniform_finite_schedule(num_contexts: int, T: int, seed: int) -> list[int]:
    rng = np.random.default_rng(seed)
    return [int(z) for z in rng.integers(num_contexts, size=T)]


def uniform_box_schedule(dim: int, T: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.random(dim) for _ in range(T)]


def fixed_schedule(contexts, T: int) -> list:
    contexts = list(contexts)
    if len(contexts) < T:
        raise ValueError("fixed context sequence shorter than the horizon")
    return contexts[:T]


def run(
    game: GameDefinition,
    players: list[Player],
    context_schedule: list,
    noise_seed: int = 0,
) -> Trajectory:
    """Simulate the repeated game round by round.

    Halts early (with status recorded) if any player declares
    infeasibility; no records exist for or after that round.
    """
    if len(players) != game.num_players:
        raise ValueError("player count does not match the game")
    rng = np.random.default_rng(noise_seed)
    records: list[RoundRecord] = []

    def view(player: Player, z: int):
        # epsilon-net learners see the numeric embedding, not the id
        if player.config.algorithm != "random" and isinstance(
            player.config.context_mode, EpsilonNet
        ):
            return game.context_embedding(z)
        return z

    for t, z in enumerate(context_schedule, start=1):
        zi = int(z)
        try:
            actions = tuple(
                p.select_action(view(p, zi))[0] for p in players
            )
        except InfeasibilityDeclared as declared:
            return Trajectory(
                records,
                status="infeasibility_declared",
                infeasible_player=declared.player_index,
                infeasible_round=t,
            )
        true_rewards = np.array(
            [game.reward(i, actions, zi) for i in range(game.num_players)]
        )
        true_constraints = [
            game.constraint_values(i, actions[i], zi)
            for i in range(game.num_players)
        ]
        noisy_rewards = true_rewards + np.array(
            [game.reward_noise[i] * rng.standard_normal() for i in range(game.num_players)]
        )
        noisy_constraints = [
            true_constraints[i]
            + np.asarray(game.constraint_noise[i][: len(true_constraints[i])])
            * rng.standard_normal(len(true_constraints[i]))
            for i in range(game.num_players)
        ]
        for i, player in enumerate(players):
            opponents = actions[:i] + actions[i + 1:]
            player.observe_feedback(
                view(player, zi), actions[i], opponents,
                noisy_rewards[i], noisy_constraints[i],
            )
        records.append(
            RoundRecord(
                t=t,
                context=zi,
                actions=actions,
                noisy_rewards=noisy_rewards,
                noisy_constraints=noisy_constraints,
                true_rewards=true_rewards,
                true_constraints=true_constraints,
            )
        )
    return Trajectory(records)
