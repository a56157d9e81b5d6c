"""Experiment orchestration and command-line entry points.

Subcommands::

    congames run <config.json> [--out DIR] [--parallel N] [--seed-override S]
    congames generate-game <config.json> --out FILE
    congames report <out-dir>

Outputs are deterministic under a fixed config: per-seed per-round CSVs,
an aggregate ``summary.json``, and a metadata stamp.  Numbers are written
with 12 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import game as game_mod
from . import metrics as metrics_mod
from .config import ConfigError, ExperimentConfig, PlayerBlock, parse_config
from .experts import SleepingExpertState
from .gp import ConfidenceParams
from .strategy import (
    ADA_NORMAL_HEDGE,
    C_ADA_NORMAL_GP,
    CZ_ADA_NORMAL_GP,
    FiniteContexts,
    Player,
    PlayerConfig,
    RANDOM,
    Z_GPMW,
)

_SEED_STRIDE = 1_000_003


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _round12(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_round12(float(v)) for v in obj.ravel()]
    if isinstance(obj, (np.floating,)):
        return float(_fmt(float(obj)))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def build_player(
    block: PlayerBlock,
    game: game_mod.GameDefinition,
    player_index: int,
    seed: int,
) -> Player:
    """Instantiate one learner from its config block and the game shape."""
    if block.algorithm == RANDOM:
        return Player(
            PlayerConfig(
                num_players=game.num_players,
                player_index=player_index,
                num_actions=game.num_actions,
                algorithm=RANDOM,
                seed=seed,
            )
        )
    uses_context = block.algorithm in (CZ_ADA_NORMAL_GP, Z_GPMW)
    uses_constraints = block.algorithm in (CZ_ADA_NORMAL_GP, C_ADA_NORMAL_GP)
    reward_kernel = block.reward_kernel
    if reward_kernel is None:
        if uses_context:
            reward_kernel = game_mod.default_reward_kernel(game.num_players)
        else:
            # non-contextual learners model rewards over joint actions only
            reward_kernel = game_mod.default_reward_kernel(game.num_players).left
    confidence = ConfidenceParams(
        rkhs_bound=block.rkhs_bound,
        noise_scale=block.noise_scale,
        failure_prob=block.delta,
        num_constraints=game.num_constraints,
    )
    num_constraints = game.num_constraints if uses_constraints else 0
    constraint_kernel = block.constraint_kernel or game_mod.default_constraint_kernel()
    return Player(
        PlayerConfig(
            num_players=game.num_players,
            player_index=player_index,
            num_actions=game.num_actions,
            algorithm=block.algorithm,
            seed=seed,
            beta_scale=block.beta_scale,
            noise_variance=block.noise_scale**2,
            context_mode=FiniteContexts(game.num_contexts),
            expert_rule=block.expert_rule,
            reward_kernel=reward_kernel,
            reward_confidence=confidence,
            num_constraints=num_constraints,
            constraint_kernels=[constraint_kernel] * num_constraints,
            constraint_confidences=[confidence] * num_constraints,
        )
    )


def _load_game(config: ExperimentConfig, seed: int) -> game_mod.GameDefinition:
    if config.game.generate is not None:
        params = config.game.generate
        return game_mod.generate_random_game(
            seed,
            num_players=params.num_players,
            num_actions=params.num_actions,
            num_contexts=params.num_contexts,
            num_constraints=params.num_constraints,
            num_gp_samples=params.num_gp_samples,
            points_per_sample=params.points_per_sample,
            obs_noise=params.obs_noise,
            noise_scale=params.noise_scale,
            feasible_quantile=params.feasible_quantile,
        )
    return game_mod.GameDefinition.from_json(Path(config.game.path).read_text())


def run_seed(config: ExperimentConfig, seed: int) -> dict:
    """Run one seed end to end and return plain-data results."""
    game = _load_game(config, seed)
    base = _SEED_STRIDE * seed
    if config.schedule.mode == "fixed_sequence":
        contexts = game_mod.fixed_schedule(config.schedule.contexts, config.T)
    else:
        contexts = game_mod.uniform_finite_schedule(
            game.num_contexts, config.T, base + 1
        )
    players = [
        build_player(block, game, i, base + 10 + i)
        for i, block in enumerate(config.players)
    ]
    trajectory = game_mod.run(game, players, contexts, noise_seed=base + 2)
    report = metrics_mod.compute_report(trajectory, game)

    bounds = {}
    if config.bound_checks:
        for i, player in enumerate(players):
            if player.config.algorithm == RANDOM:
                continue
            magnitudes = None
            if player.config.expert_rule == ADA_NORMAL_HEDGE:
                magnitudes = [
                    s.magnitudes
                    for s in player.router.states.values()
                    if isinstance(s, SleepingExpertState)
                ]
            regret_bound, violation_bounds = metrics_mod.theorem_bounds(
                num_actions=game.num_actions,
                num_contexts=game.num_contexts,
                T=max(trajectory.num_rounds, 1),
                delta=player.config.reward_confidence.failure_prob,
                reward_params=player.config.reward_confidence,
                reward_info_gain=player.reward_gp.running_info_gain,
                constraint_params=player.config.constraint_confidences,
                constraint_info_gains=[
                    gp.running_info_gain for gp in player.constraint_gps
                ],
                expert_magnitudes=magnitudes,
            )
            bounds[str(i)] = {
                "regret_bound": regret_bound,
                "violation_bounds": violation_bounds,
            }

    rows = []
    for t_idx, rec in enumerate(trajectory.records):
        row = [rec.t, int(rec.context), *rec.actions]
        for i in range(game.num_players):
            row.append(report.regret[i][t_idx])
        for i in range(game.num_players):
            row.extend(report.violations[i][:, t_idx])
        rows.append(row)

    return {
        "seed": seed,
        "status": trajectory.status,
        "infeasible_player": trajectory.infeasible_player,
        "infeasible_round": trajectory.infeasible_round,
        "num_rounds": trajectory.num_rounds,
        "num_players": game.num_players,
        "num_constraints": game.num_constraints,
        "rows": rows,
        "final_regret": [report.final_regret(i) for i in range(game.num_players)],
        "final_violations": [
            report.final_violations(i).tolist() for i in range(game.num_players)
        ],
        "regret": [report.regret[i].tolist() for i in range(game.num_players)],
        "violations": [
            report.violations[i].tolist() for i in range(game.num_players)
        ],
        "cce_eps": report.cce_eps,
        "bounds": bounds,
    }


def _csv_header(num_players: int, num_constraints: int) -> list[str]:
    header = ["t", "z"] + [f"a{i}" for i in range(num_players)]
    header += [f"regret_p{i}" for i in range(num_players)]
    for i in range(num_players):
        header += [f"viol_p{i}_m{m}" for m in range(num_constraints)]
    return header


def _write_seed_csv(out_dir: Path, result: dict) -> None:
    path = out_dir / f"rounds_seed{result['seed']}.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            _csv_header(result["num_players"], result["num_constraints"])
        )
        for row in result["rows"]:
            writer.writerow(
                [row[0], row[1]]
                + [int(v) for v in row[2 : 2 + result["num_players"]]]
                + [_fmt(v) for v in row[2 + result["num_players"]:]]
            )


def _aggregate(results: list[dict], T: int) -> dict:
    complete = [r for r in results if r.get("status") == "completed" and r["num_rounds"] == T]
    agg: dict = {"num_complete": len(complete)}
    if complete:
        num_players = complete[0]["num_players"]
        regret = np.array([r["regret"] for r in complete])  # (S, N, T)
        agg["mean_regret"] = regret.mean(axis=0).tolist()
        agg["std_regret"] = regret.std(axis=0).tolist()
        viols = np.array([r["violations"] for r in complete])  # (S, N, M, T)
        agg["mean_violations"] = viols.mean(axis=0).tolist()
        agg["std_violations"] = viols.std(axis=0).tolist()
        agg["mean_final_regret"] = [
            float(np.mean([r["final_regret"][i] for r in complete]))
            for i in range(num_players)
        ]
    return agg


def run_experiment(config: ExperimentConfig, out_dir: Path, parallel: int = 1) -> int:
    """Run all seeds, write outputs, and return the process exit code."""
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = config.seeds
    results: list[dict] = []
    failures: dict[int, str] = {}
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            futures = {s: pool.submit(run_seed, config, s) for s in seeds}
            for s in seeds:
                try:
                    results.append(futures[s].result())
                except Exception:
                    failures[s] = traceback.format_exc()
    else:
        for s in seeds:
            try:
                results.append(run_seed(config, s))
            except Exception:
                failures[s] = traceback.format_exc()

    for result in results:
        _write_seed_csv(out_dir, result)

    summary = {
        "statuses": {
            str(r["seed"]): r["status"] for r in results
        } | {str(s): "error" for s in failures},
        "errors": failures,
        "per_seed": {
            str(r["seed"]): {
                "final_regret": r["final_regret"],
                "final_violations": r["final_violations"],
                "cce_eps": r["cce_eps"],
                "bounds": r["bounds"],
                "num_rounds": r["num_rounds"],
                "infeasible_player": r["infeasible_player"],
                "infeasible_round": r["infeasible_round"],
            }
            for r in results
        },
        "aggregate": _aggregate(results, config.T),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(_round12(summary), indent=2, sort_keys=True)
    )
    return 2 if failures else 0


def _metadata_stamp(config_text: str, config: ExperimentConfig) -> dict:
    return {
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "generator_scheme": game_mod.GENERATOR_SCHEME,
        "seeds": config.seeds,
        "T": config.T,
    }


def cmd_run(args) -> int:
    try:
        text = Path(args.config).read_text()
        config = parse_config(text)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if args.seed_override is not None:
        config.seeds = [args.seed_override]
    out_dir = Path(args.out or config.output_dir or "out")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metadata.json").write_text(
        json.dumps(_metadata_stamp(text, config), indent=2, sort_keys=True)
    )
    return run_experiment(config, out_dir, parallel=args.parallel)


def cmd_generate_game(args) -> int:
    try:
        config = parse_config(Path(args.config).read_text())
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    if config.game.generate is None:
        print("config error: .game.generate block required", file=sys.stderr)
        return 1
    game = _load_game(config, config.seeds[0])
    Path(args.out).write_text(game.to_json())
    return 0


def cmd_report(args) -> int:
    out_dir = Path(args.out_dir)
    csvs = sorted(out_dir.glob("rounds_seed*.csv"))
    if not csvs:
        print(f"no per-seed CSVs found in {out_dir}", file=sys.stderr)
        return 1
    finals = []
    for path in csvs:
        with path.open() as fh:
            reader = csv.DictReader(fh)
            last = None
            for last in reader:
                pass
        if last is not None:
            finals.append(
                {
                    "seed_file": path.name,
                    "rounds": int(last["t"]),
                    **{
                        k: float(v)
                        for k, v in last.items()
                        if k.startswith(("regret_", "viol_"))
                    },
                }
            )
    keys = [k for k in finals[0] if k.startswith(("regret_", "viol_"))]
    report = {
        "num_seeds": len(finals),
        "per_seed": finals,
        "mean_final": {
            k: float(np.mean([f[k] for f in finals])) for k in keys
        },
        "std_final": {
            k: float(np.std([f[k] for f in finals])) for k in keys
        },
    }
    text = json.dumps(_round12(report), indent=2, sort_keys=True)
    (out_dir / "report.json").write_text(text)
    print(text)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="congames",
        description="Repeated contextual games with unknown constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--parallel", type=int, default=1)
    p_run.add_argument("--seed-override", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_gen = sub.add_parser("generate-game", help="write a serialized game")
    p_gen.add_argument("config")
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate_game)

    p_rep = sub.add_parser("report", help="re-aggregate per-seed CSVs")
    p_rep.add_argument("out_dir")
    p_rep.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
