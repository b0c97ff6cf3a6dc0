"""Entmax-weighted best-of-N action selection with an action-influence
objective and a compact off-policy learner, on desk-scale environments."""

from .bench import entmax_bench, interquartile_mean
from .bon import (Candidates, StrategyConfig, auto_beta, sample_categorical,
                  select, select_ebon, select_hard, selection_probs)
from .densities import (MixtureT, PolicyDist, StudentT, mixture_logpdf,
                        policy_logpdf, policy_logpdf_and_sample, policy_mean,
                        policy_sample, t_logpdf, t_mean)
from .empowerment import TransitionModels, kl_surrogate, objective_values
from .entmax import (EntmaxSolution, LambdaBounds, conventional_bounds,
                     lambda_bounds, probabilities, residual, solve_approx,
                     solve_oracle)
from .envs import CartPoleSparse, PointMass, make_env
from .harness import (MetricsRow, RunConfig, Runner, alpha_schedule_arcsine,
                      eed_configs, eed_orderings, emit_metrics, read_metrics,
                      sweep)
from .nets import Adam, Network, polyak_update
from .sac import Learner, ReplayBuffer, Transition
from .tsallis import q_exp, q_kl, q_log

__version__ = "0.1.0"

__all__ = [
    "Adam", "Candidates", "CartPoleSparse", "EntmaxSolution", "LambdaBounds",
    "Learner", "MetricsRow", "MixtureT", "Network", "PointMass", "PolicyDist",
    "ReplayBuffer", "RunConfig", "Runner", "StrategyConfig", "StudentT",
    "Transition", "TransitionModels", "alpha_schedule_arcsine", "auto_beta",
    "conventional_bounds", "eed_configs", "eed_orderings", "emit_metrics",
    "entmax_bench", "interquartile_mean", "kl_surrogate", "lambda_bounds",
    "make_env", "mixture_logpdf", "objective_values", "policy_logpdf",
    "policy_logpdf_and_sample", "policy_mean", "policy_sample",
    "polyak_update", "probabilities", "q_exp", "q_kl", "q_log",
    "read_metrics", "residual", "sample_categorical", "select", "select_ebon",
    "select_hard", "selection_probs", "solve_approx", "solve_oracle",
    "sweep", "t_logpdf", "t_mean",
]
