"""Off-policy learner: twin critics with target copies, a bounded-support
policy head, and automatic temperature tuning.

The critic target bootstraps from the element-wise minimum of the two target
critics; the actor climbs the element-wise maximum of the two online critics.
Policy gradients use the likelihood-ratio estimator with the sampled-action
value as the score weight (the Beta draw is not reparameterized), with the
batch mean subtracted as a baseline.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .densities import (PolicyDist, policy_logpdf, policy_logpdf_param_grads,
                        policy_mean, policy_sample)
from .nets import (Adam, Network, load_network, polyak_update, save_network,
                   softplus, softplus_grad, softsign, softsign_grad)

# Sharpness floor keeps the policy strictly inside its parameter domain.
_SHARPNESS_FLOOR = 1e-6
_CKPT_MAGIC = b"EBONCKP1"


@dataclass
class Transition:
    s: np.ndarray
    a: np.ndarray
    s_next: np.ndarray
    r: float
    done: bool  # termination, not truncation


class ReplayBuffer:
    """Bounded FIFO ring of transitions with uniform sampling."""

    def __init__(self, capacity, state_dim, action_dim, dtype=np.float64):
        self.capacity = capacity
        self.s = np.zeros((capacity, state_dim), dtype=dtype)
        self.a = np.zeros((capacity, action_dim), dtype=dtype)
        self.s_next = np.zeros((capacity, state_dim), dtype=dtype)
        self.r = np.zeros(capacity, dtype=dtype)
        self.done = np.zeros(capacity, dtype=bool)
        self.cursor = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, tr):
        i = self.cursor
        self.s[i] = tr.s
        self.a[i] = tr.a
        self.s_next[i] = tr.s_next
        self.r[i] = tr.r
        self.done[i] = tr.done
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def _gather(self, idx):
        return {"s": self.s[idx], "a": self.a[idx], "s2": self.s_next[idx],
                "r": self.r[idx], "done": self.done[idx]}

    def sample(self, batch_size, rng):
        """Uniform batch; an undersized buffer returns itself whole (warm-up)."""
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        if self.size < batch_size:
            return self._gather(np.arange(self.size))
        return self._gather(rng.integers(0, self.size, size=batch_size))

    def episode_batches(self, rng, batch_size=256):
        """Per-episode replay schedule: ceil(size/2) shuffled transitions,
        partitioned into batches (the last partial batch is kept)."""
        n_replay = -(-self.size // 2)
        idx = rng.permutation(self.size)[:n_replay]
        for start in range(0, n_replay, batch_size):
            yield self._gather(idx[start:start + batch_size])


class Learner:
    """Twin-critic actor-critic with auto-tuned temperature."""

    def __init__(self, state_dim, action_dim, gamma=0.99, tau=0.005, lr=1e-4,
                 target_entropy=None, mme_enabled=False, rng=None,
                 init_temperature=1.0, dtype=np.float64):
        rng = rng or np.random.default_rng()
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.gamma = gamma
        self.tau = tau
        self.mme_enabled = mme_enabled
        # entropy target: |A| ln 0.4, i.e. ln 0.2 below the |A| ln 2 maximum
        self.target_entropy = (action_dim * np.log(0.4)
                               if target_entropy is None else target_entropy)
        self.dtype = np.dtype(dtype)
        self.q1 = Network(state_dim + action_dim, 1, rng, dtype=dtype)
        self.q2 = Network(state_dim + action_dim, 1, rng, dtype=dtype)
        self.target_q1 = self.q1.copy()
        self.target_q2 = self.q2.copy()
        self.actor = Network(state_dim, 2 * action_dim, rng, dtype=dtype)
        self.log_temperature = np.array([np.log(init_temperature)])
        self.q1_opt = Adam(self.q1.params(), lr=lr)
        self.q2_opt = Adam(self.q2.params(), lr=lr)
        self.actor_opt = Adam(self.actor.params(), lr=lr)
        self.temp_opt = Adam([self.log_temperature], lr=lr)

    @property
    def temperature(self):
        return float(np.exp(self.log_temperature[0]))

    # -- policy head ---------------------------------------------------------

    def _dist_from_raw(self, raw):
        da = self.action_dim
        return PolicyDist(softsign(raw[..., :da]),
                          softplus(raw[..., da:]) + _SHARPNESS_FLOOR)

    def policy(self, s):
        """The current policy at one state or a batch of states."""
        return self._dist_from_raw(self.actor.forward(s))

    def greedy_action(self, s):
        return policy_mean(self.policy(s))

    # -- critic side ---------------------------------------------------------

    def critic_target(self, batch, rng):
        """Bootstrap target y with stop-gradient semantics (plain values)."""
        dist = self.policy(batch["s2"])
        a2 = policy_sample(dist, rng)
        logp2 = policy_logpdf(dist, a2)
        x2 = np.concatenate([np.asarray(batch["s2"], dtype=self.dtype),
                             a2.astype(self.dtype)], axis=-1)
        tq = np.minimum(self.target_q1.forward(x2)[:, 0],
                        self.target_q2.forward(x2)[:, 0])
        alpha_t = self.temperature
        boot = tq - alpha_t * logp2
        if self.mme_enabled:
            boot = boot + alpha_t * (1.0 - self.gamma) * logp2
        return batch["r"] + (~batch["done"]) * self.gamma * boot

    def critic_loss(self, batch, rng):
        """Mean squared residual over the batch and both critics."""
        y = self.critic_target(batch, rng)
        x = np.concatenate([batch["s"], batch["a"]], axis=-1)
        r1 = self.q1.forward(x)[:, 0] - y
        r2 = self.q2.forward(x)[:, 0] - y
        return 0.5 * float(np.mean(r1 * r1) + np.mean(r2 * r2))

    def update_critics(self, batch, rng):
        y = self.critic_target(batch, rng)
        x = np.concatenate([batch["s"], batch["a"]], axis=-1)
        n = x.shape[0]
        loss = 0.0
        for net, opt in ((self.q1, self.q1_opt), (self.q2, self.q2_opt)):
            out, cache = net.forward_cached(x)
            resid = out[:, 0] - y
            loss += 0.5 * float(np.mean(resid * resid))
            grads, _ = net.backward(cache, (resid / n)[:, None])
            opt.step(net.params(), grads)
        return loss

    # -- actor side ----------------------------------------------------------

    def _actor_terms(self, batch, rng):
        raw, cache = self.actor.forward_cached(batch["s"])
        dist = self._dist_from_raw(raw)
        a = policy_sample(dist, rng)
        logp = policy_logpdf(dist, a)
        x = np.concatenate([np.asarray(batch["s"], dtype=self.dtype),
                            a.astype(self.dtype)], axis=-1)
        qmax = np.maximum(self.q1.forward(x)[:, 0], self.q2.forward(x)[:, 0])
        w = self.temperature * logp - qmax
        return raw, cache, dist, a, logp, w

    def actor_loss(self, batch, rng):
        """Mean of alpha * ln pi(a|s) - max_k Q_k(s, a) on fresh samples."""
        *_, w = self._actor_terms(batch, rng)
        return float(w.mean())

    def update_actor(self, batch, rng):
        """Score-function policy gradient step; returns (loss, entropy estimate)."""
        raw, cache, dist, a, logp, w = self._actor_terms(batch, rng)
        n = w.shape[0]
        weights = (w - w.mean()) / n
        dmode, dsharp = policy_logpdf_param_grads(dist, a)
        da = self.action_dim
        draw = np.empty_like(raw)
        draw[:, :da] = weights[:, None] * dmode * softsign_grad(raw[:, :da])
        draw[:, da:] = weights[:, None] * dsharp * softplus_grad(raw[:, da:])
        grads, _ = self.actor.backward(cache, draw)
        self.actor_opt.step(self.actor.params(), grads)
        return float(w.mean()), float(-logp.mean())

    # -- temperature and targets ----------------------------------------------

    def temperature_step(self, entropy_estimate):
        """Descend alpha * (H_hat - H_target) in log-temperature space."""
        g = self.temperature * (entropy_estimate - self.target_entropy)
        self.temp_opt.step([self.log_temperature], [np.array([g])])
        return self.temperature

    def temperature_update(self, batch, rng):
        """Standalone temperature step from fresh policy samples."""
        dist = self.policy(batch["s"])
        logp = policy_logpdf(dist, policy_sample(dist, rng))
        return self.temperature_step(float(-logp.mean()))

    def update_targets(self):
        polyak_update(self.target_q1, self.q1, self.tau)
        polyak_update(self.target_q2, self.q2, self.tau)

    # -- one full step ---------------------------------------------------------

    def train_on_batch(self, batch, rng):
        critic_loss = self.update_critics(batch, rng)
        actor_loss, entropy = self.update_actor(batch, rng)
        self.temperature_step(entropy)
        self.update_targets()
        return {"critic_loss": critic_loss, "actor_loss": actor_loss,
                "entropy": entropy, "temperature": self.temperature}


def save_checkpoint(path, learner, models=None, buffer=None):
    """All networks, the temperature, and the buffer cursor in one file."""
    nets = {"q1": learner.q1, "q2": learner.q2,
            "target_q1": learner.target_q1, "target_q2": learner.target_q2,
            "actor": learner.actor}
    if models is not None:
        nets["cond"] = models.cond_net
        nets["marg"] = models.marg_net
    cursor = buffer.cursor if buffer is not None else 0
    size = buffer.size if buffer is not None else 0
    with open(path, "wb") as f:
        f.write(_CKPT_MAGIC)
        f.write(struct.pack("<dqq", learner.log_temperature[0], cursor, size))
        f.write(struct.pack("<I", len(nets)))
        for name, net in nets.items():
            blob = name.encode()
            f.write(struct.pack("<I", len(blob)))
            f.write(blob)
            save_network(f, net)


def load_checkpoint(path):
    """Returns (networks dict, log_temperature, buffer cursor, buffer size)."""
    with open(path, "rb") as f:
        if f.read(len(_CKPT_MAGIC)) != _CKPT_MAGIC:
            raise ValueError("not a checkpoint file (bad magic)")
        log_temp, cursor, size = struct.unpack("<dqq", f.read(24))
        (count,) = struct.unpack("<I", f.read(4))
        nets = {}
        for _ in range(count):
            (n,) = struct.unpack("<I", f.read(4))
            name = f.read(n).decode()
            nets[name] = load_network(f)
    return nets, log_temp, cursor, size
