"""Command-line surface: train, sweep, eval, entmax-bench, selfcheck."""

import argparse
import os
import sys

import numpy as np


def _add_run_flags(p):
    p.add_argument("--config", help="key=value config file to start from")
    p.add_argument("--env", choices=("pointmass", "cartpole_sparse"))
    p.add_argument("--strategy", choices=("random", "hard", "ent"))
    p.add_argument("--alpha", help="number or 'arcsine'")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-samples", type=int, dest="n_samples")
    p.add_argument("--gamma", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--capacity", type=int)
    p.add_argument("--mme", action="store_const", const=True,
                   dest="mme_enabled")
    p.add_argument("--eval-every", type=int, dest="eval_every")
    p.add_argument("--eval-episodes", type=int, dest="eval_episodes")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--tag")


def _config_from_args(args):
    from .harness import RunConfig
    overrides = {k: v for k, v in vars(args).items()
                 if k in {f.name for f in
                          __import__("dataclasses").fields(RunConfig)}
                 and v is not None}
    if args.config:
        return RunConfig.load(args.config, overrides)
    cfg = RunConfig()
    for key, val in overrides.items():
        if key == "alpha":
            try:
                val = float(val)
            except ValueError:
                pass
        setattr(cfg, key, val)
    return cfg


def cmd_train(args):
    from .harness import Runner
    cfg = _config_from_args(args)
    rows = Runner(cfg).run()
    final = [r.greedy_return for r in rows if r.greedy_return is not None]
    print(f"run {cfg.resolved_name()}: {cfg.episodes} episodes, "
          f"final greedy return {final[-1] if final else float('nan'):.6g}")
    return 0


def cmd_sweep(args):
    from .harness import (RunConfig, eed_configs, eed_orderings,
                          grid_conditions, sweep)
    os.makedirs(args.out_dir or "runs", exist_ok=True)
    out = args.out_dir or "runs"
    if args.preset == "eed":
        configs = eed_configs(out, seeds_per_meta=args.seeds,
                              meta_runs=args.meta_runs,
                              episodes=args.episodes or 300)
    else:
        configs = []
        for strategy, alpha in grid_conditions():
            for seed in range(args.seeds):
                configs.append(RunConfig(
                    env=args.env or "pointmass", strategy=strategy,
                    alpha=0.0 if alpha is None else alpha,
                    episodes=args.episodes or 300, seed=seed, out_dir=out))
    summary = sweep(configs, jobs=args.jobs,
                    summary_path=os.path.join(out, "summary.csv"))
    print(f"sweep complete: {len(summary)} runs -> {out}/summary.csv")
    if args.preset == "eed":
        for meta, stats in eed_orderings(summary).items():
            print(f"  {meta}: pointmass ent2 {stats['pointmass_ent2']:.4g} "
                  f"vs random {stats['pointmass_random']:.4g} "
                  f"ok={stats['pointmass_ok']}; "
                  f"cartpole random {stats['cartpole_random']:.4g} "
                  f"vs ent2 {stats['cartpole_ent2']:.4g} "
                  f"ok={stats['cartpole_ok']}")
    return 0


def cmd_eval(args):
    from .envs import make_env
    from .densities import policy_mean
    from .sac import Learner, load_checkpoint
    nets, log_temp, _, _ = load_checkpoint(args.checkpoint)
    actor = nets["actor"]
    state_dim = actor.sizes[0]
    action_dim = actor.sizes[-1] // 2
    learner = Learner(state_dim, action_dim)
    for name in ("q1", "q2", "target_q1", "target_q2", "actor"):
        getattr(learner, name).copy_from(nets[name])
    learner.log_temperature[0] = log_temp
    env = make_env(args.env)
    if env.observation_dim != state_dim or env.action_dim != action_dim:
        print(f"checkpoint dims ({state_dim}, {action_dim}) do not match "
              f"env {args.env}", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    returns = []
    for _ in range(args.episodes):
        obs = env.reset(seed=int(rng.integers(2 ** 63)))
        total = 0.0
        while True:
            res = env.step(learner.greedy_action(obs))
            total += res.reward
            obs = res.state
            if res.terminated or res.truncated:
                break
        returns.append(total)
    print(f"greedy return over {args.episodes} episodes: "
          f"mean {np.mean(returns):.6g} min {min(returns):.6g} "
          f"max {max(returns):.6g}")
    return 0


def cmd_entmax_bench(args):
    from .bench import entmax_bench, format_summary
    kwargs = {}
    if args.quick:
        kwargs = {"ns": (4, 64), "sigmas": (0.1, 10.0),
                  "alphas": [a / 10 for a in range(-20, 21, 5) if a != 0],
                  "batch": 20}
    report = entmax_bench(seed=args.seed, **kwargs)
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        report.write_csv(args.out)
    print(format_summary(report))
    ok = (report.pooled["all_evals_exactly_3"]
          and report.pooled["bounds_contain_root_frac"] == 1.0
          and report.pooled["tight_in_conventional_frac"] == 1.0)
    return 0 if ok else 1


def cmd_selfcheck(args):
    from .selfcheck import run_selfcheck
    return run_selfcheck(seed=args.seed)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="ebon",
        description="entmax best-of-N sampling with an action-influence "
                    "objective and an off-policy learner")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="one training run")
    _add_run_flags(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("sweep", help="strategy x alpha x seed grid")
    p.add_argument("--preset", choices=("eed",))
    p.add_argument("--env")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--meta-runs", type=int, default=3, dest="meta_runs")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", dest="out_dir")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("eval", help="greedy rollouts from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--env", required=True,
                   choices=("pointmass", "cartpole_sparse"))
    p.add_argument("--episodes", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("entmax-bench", help="solver accuracy/cost benchmark")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true",
                   help="small grid for a fast look")
    p.set_defaults(fn=cmd_entmax_bench)

    p = sub.add_parser("selfcheck", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_selfcheck)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except RuntimeError as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
