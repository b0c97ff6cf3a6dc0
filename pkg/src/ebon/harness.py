"""Experiment orchestration: run configuration, the episode loop, metrics.

A run wires together an environment, the off-policy learner, the transition
models, and one of the selection strategies.  Each environment step draws N
candidate actions from the current policy, scores them with the
action-influence objective, selects one, and stores the transition; at
episode end the learner and the transition models replay half the buffer in
shuffled batches.  Metrics go to an append-only CSV, one row per episode,
with the resolved configuration written alongside.
"""

import csv
import os
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import bon
from .bench import interquartile_mean
from .densities import policy_sample
from .empowerment import TransitionModels
from .envs import make_env
from .sac import Learner, ReplayBuffer, Transition, save_checkpoint

METRICS_HEADER = ("seed", "episode", "strategy", "alpha", "return", "steps",
                  "greedy_return", "wall_ms")


def alpha_schedule_arcsine(lo, hi, u):
    """Map uniform u in [0, 1) onto [lo, hi] with arcsine density.

    The image lo + (hi - lo) sin^2(pi u / 2) piles mass at both endpoints,
    so episodes mix strongly exploring and strongly exploiting selection.
    """
    if not lo < hi:
        raise ValueError("need lo < hi")
    s = np.sin(0.5 * np.pi * u)
    return lo + (hi - lo) * s * s


@dataclass
class RunConfig:
    """Everything a training run needs; round-trips through a key=value file."""
    env: str = "pointmass"
    strategy: str = "ent"        # random | hard | ent
    alpha: float | str = 0.0     # number, or "arcsine" for per-episode draws
    alpha_lo: float = -2.0
    alpha_hi: float = 2.0
    n_samples: int = 256
    episodes: int = 300
    seed: int = 0
    gamma: float = 0.99
    tau: float = 0.005
    lr: float = 1e-4
    target_entropy: float | None = None   # default |A| ln 0.4
    mme_enabled: bool = False
    batch_size: int = 256
    capacity: int = 102400
    n_components: int = 10
    eval_every: int = 25
    eval_episodes: int = 5
    actor_gradient: str = "score"  # likelihood-ratio estimator (recorded)
    dtype: str = "float32"         # training precision
    out_dir: str = "runs"
    run_name: str = ""
    tag: str = ""

    def resolved_name(self):
        if self.run_name:
            return self.run_name
        alpha = self.alpha if self.strategy == "ent" else ""
        parts = [self.env, self.strategy + str(alpha), f"s{self.seed}"]
        if self.tag:
            parts.insert(0, self.tag)
        return "_".join(parts)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            for key, val in sorted(asdict(self).items()):
                f.write(f"{key} = {val}\n")

    @classmethod
    def load(cls, path, overrides=None):
        raw = {}
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                raw[key.strip()] = val.strip()
        if overrides:
            raw.update({k: str(v) for k, v in overrides.items()})
        return cls(**{k: _coerce(cls, k, v) for k, v in raw.items()})


def _coerce(cls, key, text):
    import types
    kinds = {f.name: f.type for f in fields(cls)}
    if key not in kinds:
        raise ValueError(f"unknown config key {key!r}")
    kind = kinds[key]
    if isinstance(kind, types.UnionType):
        if text == "None" and type(None) in kind.__args__:
            return None
        try:
            return float(text)
        except ValueError:
            return text
    if kind is bool:
        return text.lower() in ("1", "true", "yes")
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    return text


@dataclass
class MetricsRow:
    seed: int
    episode: int
    strategy: str
    alpha: float | None
    ret: float
    steps: int
    greedy_return: float | None
    wall_ms: float


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def emit_metrics(rows, path):
    """Append-only CSV, UTF-8 with LF endings, 6 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(METRICS_HEADER)
        for r in rows:
            w.writerow([_fmt(v) for v in (r.seed, r.episode, r.strategy,
                                          r.alpha, r.ret, r.steps,
                                          r.greedy_return, r.wall_ms)])


def read_metrics(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        for rec in reader:
            rows.append(MetricsRow(
                seed=int(rec["seed"]), episode=int(rec["episode"]),
                strategy=rec["strategy"],
                alpha=float(rec["alpha"]) if rec["alpha"] else None,
                ret=float(rec["return"]), steps=int(rec["steps"]),
                greedy_return=(float(rec["greedy_return"])
                               if rec["greedy_return"] else None),
                wall_ms=float(rec["wall_ms"])))
    return rows


class Runner:
    """One training run: environment, learner, models, and a strategy."""

    def __init__(self, cfg):
        if cfg.strategy not in bon.STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {cfg.strategy!r}")
        self.cfg = cfg
        self.env = make_env(cfg.env)
        self.eval_env = make_env(cfg.env)
        ds, da = self.env.observation_dim, self.env.action_dim
        seq = np.random.SeedSequence(cfg.seed)
        (init_ss, env_ss, policy_ss, select_ss, train_ss,
         alpha_ss, eval_ss) = seq.spawn(7)
        init_rng = np.random.default_rng(init_ss)
        self.rng_env = np.random.default_rng(env_ss)
        self.rng_policy = np.random.default_rng(policy_ss)
        self.rng_select = np.random.default_rng(select_ss)
        self.rng_train = np.random.default_rng(train_ss)
        self.rng_alpha = np.random.default_rng(alpha_ss)
        self.rng_eval = np.random.default_rng(eval_ss)
        dtype = np.dtype(cfg.dtype)
        self.learner = Learner(ds, da, gamma=cfg.gamma, tau=cfg.tau,
                               lr=cfg.lr, target_entropy=cfg.target_entropy,
                               mme_enabled=cfg.mme_enabled, rng=init_rng,
                               dtype=dtype)
        self.models = TransitionModels(ds, da, n_components=cfg.n_components,
                                       lr=cfg.lr, rng=init_rng, dtype=dtype)
        self.buffer = ReplayBuffer(cfg.capacity, ds, da, dtype=dtype)
        # Random selection never consults the objective, so its transition
        # models would be dead weight; they are neither queried nor trained.
        self.uses_objective = cfg.strategy != "random"

    def _episode_alpha(self):
        if self.cfg.strategy != "ent":
            return None
        if self.cfg.alpha == "arcsine":
            return float(alpha_schedule_arcsine(
                self.cfg.alpha_lo, self.cfg.alpha_hi,
                self.rng_alpha.random()))
        return float(self.cfg.alpha)

    def run_episode(self, episode):
        """Collect one episode with the configured strategy, then train."""
        cfg = self.cfg
        t0 = time.perf_counter()
        alpha = self._episode_alpha()
        strat = bon.StrategyConfig(cfg.strategy, alpha or 0.0, cfg.n_samples)
        obs = self.env.reset(seed=int(self.rng_env.integers(2 ** 63)))
        ep_return = 0.0
        steps = 0
        while True:
            if not np.all(np.isfinite(obs)):
                raise RuntimeError(
                    f"non-finite state at episode {episode} step {steps}: "
                    f"{obs!r} (seed {cfg.seed}, strategy {cfg.strategy})")
            dist = self.learner.policy(obs)
            acts = policy_sample(dist, self.rng_policy,
                                 strat.candidates_per_step)
            if self.uses_objective:
                scores = np.maximum(self.models.objective(obs, acts), 0.0)
            else:
                scores = np.zeros(acts.shape[0])
            cand = bon.Candidates(acts, scores)
            action, _, _ = bon.select(cand, strat, self.rng_select)
            result = self.env.step(action)
            self.buffer.push(Transition(obs, action, result.state,
                                        result.reward, result.terminated))
            ep_return += result.reward
            steps += 1
            obs = result.state
            if result.terminated or result.truncated:
                break
        for batch in self.buffer.episode_batches(self.rng_train,
                                                 cfg.batch_size):
            self.learner.train_on_batch(batch, self.rng_train)
            if self.uses_objective:
                self.models.update(batch["s"], batch["a"], batch["s2"])
        wall_ms = 1e3 * (time.perf_counter() - t0)
        greedy = None
        if (episode + 1) % cfg.eval_every == 0 or episode + 1 == cfg.episodes:
            greedy = self.greedy_return()
        return MetricsRow(cfg.seed, episode, cfg.strategy, alpha, ep_return,
                          steps, greedy, wall_ms)

    def greedy_return(self):
        """Mean return of greedy (policy-mean) rollouts on a fresh env."""
        total = 0.0
        for _ in range(self.cfg.eval_episodes):
            obs = self.eval_env.reset(
                seed=int(self.rng_eval.integers(2 ** 63)))
            while True:
                result = self.eval_env.step(self.learner.greedy_action(obs))
                total += result.reward
                obs = result.state
                if result.terminated or result.truncated:
                    break
        return total / self.cfg.eval_episodes

    def run(self, write=True):
        """All episodes; optionally writes metrics, config, and a checkpoint."""
        cfg = self.cfg
        run_dir = os.path.join(cfg.out_dir, cfg.resolved_name())
        if write:
            os.makedirs(run_dir, exist_ok=True)
            cfg.save(os.path.join(run_dir, "config.txt"))
        rows = []
        for episode in range(cfg.episodes):
            rows.append(self.run_episode(episode))
            if write:
                emit_metrics(rows, os.path.join(run_dir, "metrics.csv"))
        if write:
            save_checkpoint(os.path.join(run_dir, "checkpoint.bin"),
                            self.learner, self.models, self.buffer)
        return rows


def run_config(cfg):
    """Run one config to completion; returns its summary record."""
    rows = Runner(cfg).run()
    final = [r.greedy_return for r in rows if r.greedy_return is not None]
    return {"run": cfg.resolved_name(), "tag": cfg.tag, "env": cfg.env,
            "strategy": cfg.strategy,
            "alpha": cfg.alpha if cfg.strategy == "ent" else "",
            "seed": cfg.seed,
            "final_greedy_return": final[-1] if final else None}

SUMMARY_FIELDS = ("run", "tag", "env", "strategy", "alpha", "seed",
                  "final_greedy_return")


def sweep(configs, jobs=1, summary_path=None):
    """Run many configs (sequentially or across processes); returns summary rows.

    Each run writes its own metrics/config/checkpoint under its out_dir.
    With ``summary_path`` the summary CSV is appended after every completed
    run and configs already present in it are skipped, so an interrupted
    sweep resumes where it stopped.
    """
    done = {}
    if summary_path and os.path.exists(summary_path):
        for rec in read_summary(summary_path):
            done[rec["run"]] = rec
    todo = [cfg for cfg in configs if cfg.resolved_name() not in done]
    summary = [done[cfg.resolved_name()] for cfg in configs
               if cfg.resolved_name() in done]

    def record(rec):
        summary.append(rec)
        if summary_path:
            write_summary(summary, summary_path)

    if jobs > 1:
        import multiprocessing as mp
        with mp.get_context("spawn").Pool(jobs) as pool:
            for rec in pool.imap(run_config, todo):
                record(rec)
    else:
        for cfg in todo:
            record(run_config(cfg))
    return summary


def write_summary(summary, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, list(SUMMARY_FIELDS), lineterminator="\n")
        w.writeheader()
        w.writerows(summary)


def read_summary(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


# -- exploration-vs-exploitation comparison ---------------------------------

GRID_ALPHAS = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


def grid_conditions():
    """The nine standard comparison conditions: random, hard, ent x 7 alphas."""
    conds = [("random", None), ("hard", None)]
    conds += [("ent", a) for a in GRID_ALPHAS]
    return conds


def eed_configs(out_dir, envs=("pointmass", "cartpole_sparse"),
                seeds_per_meta=10, meta_runs=3, episodes=300, **kwargs):
    """Configs for the two-task ordering study: random vs ent(alpha=+2).

    Each meta-run uses a disjoint block of seeds so repeats are independent.
    """
    configs = []
    for meta in range(meta_runs):
        for env in envs:
            for strategy, alpha in (("random", None), ("ent", 2.0)):
                for i in range(seeds_per_meta):
                    configs.append(RunConfig(
                        env=env, strategy=strategy,
                        alpha=0.0 if alpha is None else alpha,
                        episodes=episodes, seed=1000 * meta + i,
                        out_dir=out_dir, tag=f"meta{meta}", **kwargs))
    return configs


def eed_orderings(summary):
    """Per-meta-run IQM orderings from a sweep summary.

    Returns {meta: {"pointmass_ok": bool, "cartpole_ok": bool, ...}} where
    pointmass_ok means IQM(ent alpha=+2) >= IQM(random) and cartpole_ok the
    reverse ordering.
    """
    by_key = {}
    for rec in summary:
        key = (rec["tag"], rec["env"], rec["strategy"])
        by_key.setdefault(key, []).append(float(rec["final_greedy_return"]))
    metas = sorted({rec["tag"] for rec in summary})
    out = {}
    for meta in metas:
        iqm = {(env, strat): interquartile_mean(by_key[(meta, env, strat)])
               for env in ("pointmass", "cartpole_sparse")
               for strat in ("random", "ent")
               if (meta, env, strat) in by_key}
        out[meta] = {
            "pointmass_random": iqm.get(("pointmass", "random")),
            "pointmass_ent2": iqm.get(("pointmass", "ent")),
            "cartpole_random": iqm.get(("cartpole_sparse", "random")),
            "cartpole_ent2": iqm.get(("cartpole_sparse", "ent")),
            "pointmass_ok": iqm[("pointmass", "ent")]
            >= iqm[("pointmass", "random")],
            "cartpole_ok": iqm[("cartpole_sparse", "random")]
            >= iqm[("cartpole_sparse", "ent")],
        }
    return out
