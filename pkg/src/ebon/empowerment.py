"""Action-influence objective from learned transition models.

Two density models are trained on replayed transitions by maximum
likelihood: an action-conditioned Student-t ``p_e(s' | s, a)`` and an
action-marginalized 10-component t-mixture ``p_m(s' | s)``.  The objective
for a candidate action is a non-negative one-sample estimate of their KL
divergence, evaluated at the conditioned model's mean (no sampling):

    d = ln p_e(s'* | s, a) - ln p_m(s'* | s),   s'* = E[p_e(. | s, a)]
    J = d + exp(-d) - 1

``d + exp(-d) - 1`` is convex with minimum 0 at d = 0, so J >= 0 for any
model pair; working in the log-ratio d avoids forming raw density ratios.
"""

import numpy as np

from .densities import (MixtureT, StudentT, mixture_logpdf, t_logpdf,
                        t_logpdf_param_grads)
from .nets import Adam, Network, softplus, softplus_grad

# Floor on softplus-mapped scales; keeps log-densities finite if a raw
# output drifts far negative during training.
SCALE_FLOOR = 1e-6


def kl_surrogate(d):
    """The non-negative per-sample divergence estimate d + exp(-d) - 1.

    Evaluated as d + expm1(-d), which keeps the quadratic floor near d = 0
    from cancelling to a negative float.
    """
    d = np.asarray(d, dtype=float)
    return d + np.expm1(-d)


class TransitionModels:
    """Conditioned Student-t head and marginal t-mixture head, plus training."""

    def __init__(self, state_dim, action_dim, n_components=10, lr=1e-4,
                 rng=None, dtype=np.float64):
        rng = rng or np.random.default_rng()
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.n_components = n_components
        self.cond_net = Network(state_dim + action_dim, 2 * state_dim + 1,
                                rng, dtype=dtype)
        self.marg_net = Network(
            state_dim, n_components * (2 * state_dim + 1) + n_components,
            rng, dtype=dtype)
        self.cond_opt = Adam(self.cond_net.params(), lr=lr)
        self.marg_opt = Adam(self.marg_net.params(), lr=lr)
        self.skipped_updates = 0

    # -- parameter heads ---------------------------------------------------

    def _cond_dist(self, raw):
        ds = self.state_dim
        return StudentT(raw[..., :ds],
                        softplus(raw[..., ds:2 * ds]) + SCALE_FLOOR,
                        2.0 + softplus(raw[..., 2 * ds]))

    def _marg_dist(self, raw):
        ds, k = self.state_dim, self.n_components
        lead = raw.shape[:-1]
        loc = raw[..., :k * ds].reshape(lead + (k, ds))
        scale = softplus(raw[..., k * ds:2 * k * ds]).reshape(lead + (k, ds))
        dof = 2.0 + softplus(raw[..., 2 * k * ds:2 * k * ds + k])
        # weights normalized in float64 so they sum to one at full precision
        logits = np.asarray(raw[..., 2 * k * ds + k:], dtype=np.float64)
        shifted = np.exp(logits - logits.max(axis=-1, keepdims=True))
        weights = shifted / shifted.sum(axis=-1, keepdims=True)
        return MixtureT(weights, loc, scale + SCALE_FLOOR, dof)

    def conditioned(self, s, a):
        """p_e(. | s, a) as a (possibly batched) StudentT."""
        return self._cond_dist(self.cond_net.forward(
            np.concatenate([s, a], axis=-1)))

    def marginal(self, s):
        """p_m(. | s) as a (possibly batched) MixtureT."""
        return self._marg_dist(self.marg_net.forward(s))

    # -- objective ----------------------------------------------------------

    def objective(self, s, a):
        """J for one action or a batch of candidate actions at one state.

        Deterministic given (s, a) and the current parameters: the next
        state is pinned to the conditioned model's mean, never sampled.
        """
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        single = a.ndim == 1
        a2 = a[None, :] if single else a
        s2 = np.broadcast_to(s, (a2.shape[0], self.state_dim)) \
            if s.ndim == 1 else s
        p_e = self.conditioned(s2, a2)
        s_pred = p_e.loc
        log_e = t_logpdf(p_e, s_pred)
        if s.ndim == 1:
            p_m = self.marginal(s[None, :])
        else:
            p_m = self.marginal(s)
        log_m = mixture_logpdf(p_m, s_pred)
        j = kl_surrogate(log_e - log_m)
        return float(j[0]) if single else j

    # -- training -----------------------------------------------------------

    def nll(self, s, a, s_next):
        """Held-out negative log-likelihoods (conditioned, marginal) means."""
        le = t_logpdf(self.conditioned(s, a), s_next)
        lm = mixture_logpdf(self.marginal(s), s_next)
        return -float(le.mean()), -float(lm.mean())

    def update(self, s, a, s_next):
        """One optimizer step of joint negative log-likelihood on a batch.

        Returns the pre-step loss.  A non-finite loss skips the step and
        increments ``skipped_updates``.
        """
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        s_next = np.asarray(s_next, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1:
            raise ValueError("update requires a non-empty batch")
        n = s.shape[0]
        ds, k = self.state_dim, self.n_components

        raw_e, cache_e = self.cond_net.forward_cached(
            np.concatenate([s, a], axis=-1))
        p_e = self._cond_dist(raw_e)
        le = t_logpdf(p_e, s_next)

        raw_m, cache_m = self.marg_net.forward_cached(s)
        p_m = self._marg_dist(raw_m)
        comp = t_logpdf(StudentT(p_m.loc, p_m.scale, p_m.dof),
                        s_next[:, None, :])
        terms = np.log(p_m.weights) + comp
        shift = terms.max(axis=-1, keepdims=True)
        w_shift = np.exp(terms - shift)
        total = w_shift.sum(axis=-1, keepdims=True)
        lm = shift[..., 0] + np.log(total[..., 0])
        post = w_shift / total                      # responsibilities (n, k)

        loss = -float(le.mean()) - float(lm.mean())
        if not np.isfinite(loss):
            self.skipped_updates += 1
            return loss

        # conditioned head: d(-mean le)/d(raw outputs)
        dloc, dscale, ddof = t_logpdf_param_grads(p_e, s_next)
        draw_e = np.empty_like(raw_e)
        draw_e[:, :ds] = dloc
        draw_e[:, ds:2 * ds] = dscale * softplus_grad(raw_e[:, ds:2 * ds])
        draw_e[:, 2 * ds] = ddof * softplus_grad(raw_e[:, 2 * ds])
        draw_e *= -1.0 / n
        grads_e, _ = self.cond_net.backward(cache_e, draw_e)

        # marginal head: responsibilities weight each component's gradient
        dloc_k, dscale_k, ddof_k = t_logpdf_param_grads(
            StudentT(p_m.loc, p_m.scale, p_m.dof), s_next[:, None, :])
        draw_m = np.empty_like(raw_m)
        draw_m[:, :k * ds] = (post[..., None] * dloc_k).reshape(n, k * ds)
        raw_scale = raw_m[:, k * ds:2 * k * ds].reshape(n, k, ds)
        draw_m[:, k * ds:2 * k * ds] = (
            post[..., None] * dscale_k * softplus_grad(raw_scale)
        ).reshape(n, k * ds)
        draw_m[:, 2 * k * ds:2 * k * ds + k] = (
            post * ddof_k * softplus_grad(raw_m[:, 2 * k * ds:2 * k * ds + k]))
        draw_m[:, 2 * k * ds + k:] = post - p_m.weights
        draw_m *= -1.0 / n
        grads_m, _ = self.marg_net.backward(cache_m, draw_m)

        self.cond_opt.step(self.cond_net.params(), grads_e)
        self.marg_opt.step(self.marg_net.params(), grads_m)
        return loss


def objective_values(models, s, actions):
    """Objective J for each candidate action at state s."""
    return models.objective(s, actions)
