"""Pure-Python simulation kernel.

Implements exactly the same arithmetic, in the same order, as the compiled
kernel in _kernel.pyx: both consume the generator's underlying bit stream
identically (vectorized draws fill element-by-element in the same order the C
kernel draws scalars), so traces are bit-reproducible across backends.
"""

from __future__ import annotations

import math

import numpy as np

from ._codes import (
    OUT_BERNOULLI,
    OUT_DETERMINISTIC,
    POLICY_BETA,
    POLICY_CUCB,
    POLICY_GAUSSIAN,
    REWARD_LINEAR,
)

COMPILED = False


def simulate(
    lowered,
    policy,
    T,
    rng,
    r_baseline,
    beta_a=None,
    beta_b=None,
    counts=None,
    emp_means=None,
    clamp_theta=False,
):
    """Run T rounds; mutates the policy state arrays in place.

    Returns (actions, inst_regret): the (T, K) selected unit indices in pick
    order and the per-round greedy regret against `r_baseline`.
    """
    unit_arms = [list(map(int, u)) for u in lowered.units_arms]
    arm_unit = lowered.arm_unit
    arm_right = [int(v) for v in lowered.arm_right]
    mu = lowered.mu
    mu_list = [float(x) for x in mu]
    m = len(mu_list)
    n = len(unit_arms)
    n_right = lowered.n_right
    K = lowered.K
    linear = lowered.reward_code == REWARD_LINEAR

    actions = np.empty((T, K), dtype=np.int32)
    regret = np.empty(T, dtype=np.float64)
    chosen = [False] * n

    for t in range(T):
        # environment outcomes (all arms, action-independent draw count)
        if lowered.outcome_code == OUT_DETERMINISTIC:
            x = mu
        elif lowered.outcome_code == OUT_BERNOULLI:
            x = (rng.random(m) < mu).astype(np.float64)
        else:
            x = mu + rng.standard_normal(m)

        # policy parameter vector
        if policy == POLICY_BETA:
            theta = rng.beta(beta_a, beta_b)
        elif policy == POLICY_GAUSSIAN:
            theta = emp_means + rng.standard_normal(m) / np.sqrt(counts)
        else:
            theta = np.ones(m, dtype=np.float64)
            seen = counts > 0
            with np.errstate(divide="ignore", invalid="ignore"):
                radius = np.sqrt(3.0 * math.log(float(t + 1)) / (2.0 * counts))
            theta[seen] = np.clip(emp_means[seen] + radius[seen], 0.0, 1.0)
        if clamp_theta:
            theta = np.clip(theta, 0.0, 1.0)
        th = [float(v) for v in theta]

        # greedy selection via incremental marginal gains
        for u in range(n):
            chosen[u] = False
        cover = [1.0] * n_right
        for step in range(K):
            best_gain = -math.inf
            best_u = -1
            for u in range(n):
                if chosen[u]:
                    continue
                if linear:
                    gain = 0.0
                    for a in unit_arms[u]:
                        gain += th[a]
                else:
                    touched_v: list[int] = []
                    touched_p: list[float] = []
                    for a in unit_arms[u]:
                        v = arm_right[a]
                        if v in touched_v:
                            j = touched_v.index(v)
                        else:
                            touched_v.append(v)
                            touched_p.append(cover[v])
                            j = len(touched_v) - 1
                        touched_p[j] = touched_p[j] * (1.0 - th[a])
                    gain = 0.0
                    for j, v in enumerate(touched_v):
                        gain += cover[v] - touched_p[j]
                if gain > best_gain:
                    best_gain = gain
                    best_u = u
            chosen[best_u] = True
            actions[t, step] = best_u
            if not linear:
                for a in unit_arms[best_u]:
                    cover[arm_right[a]] *= 1.0 - th[a]

        # true expected reward of the selected action
        if linear:
            val = 0.0
            for u in range(n):
                if chosen[u]:
                    for a in unit_arms[u]:
                        val += mu_list[a]
        else:
            cover_mu = [1.0] * n_right
            for u in range(n):
                if chosen[u]:
                    for a in unit_arms[u]:
                        cover_mu[arm_right[a]] *= 1.0 - mu_list[a]
            val = 0.0
            for v in range(n_right):
                val += 1.0 - cover_mu[v]
        reg = r_baseline - val
        regret[t] = reg if reg > 0.0 else 0.0

        # posterior update over observed arms, ascending arm index
        obs = np.flatnonzero([chosen[int(u)] for u in arm_unit])
        if policy == POLICY_BETA:
            u01 = rng.random(len(obs))
            y = u01 < x[obs]
            beta_a[obs[y]] += 1.0
            beta_b[obs[~y]] += 1.0
        else:
            emp_means[obs] = (emp_means[obs] * counts[obs] + x[obs]) / (counts[obs] + 1)
            counts[obs] += 1

    return actions, regret
