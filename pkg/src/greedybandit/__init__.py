"""Combinatorial multi-armed bandit simulator: Thompson sampling and index
policies over a greedy offline oracle, with gap analytics and an experiment
harness."""

from .analysis import (
    BoundReport,
    GapReport,
    compute_gaps,
    exploration_price,
    greedy_regret,
    make_figure1_instance,
    upper_bound_value,
)
from .backend import backend_name
from .errors import (
    CapacityError,
    DomainError,
    GreedyBanditError,
    InfeasibleError,
    InvalidActionError,
    MultipleSolutionsError,
    UninitializedStateError,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    RegretTrace,
    run_experiment,
    run_replication,
    scaling_study,
)
from .model import Feedback, Instance, Unit, draw_outcomes, observe, union_arms
from .oracle import (
    GreedyResult,
    brute_force_best,
    enumerate_sigma_k,
    greedy,
    min_reward_greedy_solution,
)
from .policies import (
    BetaState,
    CucbState,
    GaussianState,
    initialize_gaussian,
    sample_theta_beta,
    sample_theta_gaussian,
    select_action,
    update_beta,
    update_gaussian,
)
from .rewards import RewardFunction, make_reward_function, marginal_gain, reward, verify_lipschitz

__version__ = "0.1.0"
