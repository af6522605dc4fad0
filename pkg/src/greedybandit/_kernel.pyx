#cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simulation kernel.

Mirrors _kernel_py.simulate exactly: same arithmetic, same RNG consumption
order (scalar draws through numpy's C distribution functions, which are the
very functions the Generator methods loop over), so both backends produce
bit-identical traces for the Beta and Gaussian policies.
"""

import numpy as np

from libc.math cimport INFINITY, log, sqrt
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_beta,
    random_standard_normal,
    random_standard_uniform,
)

from ._codes import (
    OUT_BERNOULLI,
    OUT_DETERMINISTIC,
    POLICY_BETA,
    POLICY_CUCB,
    POLICY_GAUSSIAN,
    REWARD_LINEAR,
)

COMPILED = True

cdef int C_OUT_DET = OUT_DETERMINISTIC
cdef int C_OUT_BERN = OUT_BERNOULLI
cdef int C_POL_BETA = POLICY_BETA
cdef int C_POL_GAUSS = POLICY_GAUSSIAN
cdef int C_REW_LINEAR = REWARD_LINEAR


def simulate(
    lowered,
    int policy,
    long T,
    rng,
    double r_baseline,
    double[::1] beta_a=None,
    double[::1] beta_b=None,
    long[::1] counts=None,
    double[::1] emp_means=None,
    bint clamp_theta=False,
):
    """Run T rounds; mutates the policy state arrays in place.

    Returns (actions, inst_regret) like the pure-Python kernel.
    """
    cdef bitgen_t *bg = <bitgen_t *> PyCapsule_GetPointer(
        rng.bit_generator.capsule, "BitGenerator"
    )

    cdef long[::1] unit_ptr = lowered.unit_ptr
    cdef long[::1] unit_arms = lowered.unit_arms_flat
    cdef long[::1] arm_unit = lowered.arm_unit
    cdef long[::1] arm_right = lowered.arm_right
    cdef double[::1] mu = lowered.mu
    cdef int n_right = lowered.n_right
    cdef int K = lowered.K
    cdef int reward_code = lowered.reward_code
    cdef int outcome_code = lowered.outcome_code
    cdef bint linear = reward_code == C_REW_LINEAR

    cdef long m = mu.shape[0]
    cdef long n = unit_ptr.shape[0] - 1
    cdef long max_unit = 0, sz
    cdef long u
    for u in range(n):
        sz = unit_ptr[u + 1] - unit_ptr[u]
        if sz > max_unit:
            max_unit = sz

    actions_arr = np.empty((T, K), dtype=np.int32)
    regret_arr = np.empty(T, dtype=np.float64)
    cdef int[:, ::1] actions = actions_arr
    cdef double[::1] regret = regret_arr

    x_arr = np.empty(m, dtype=np.float64)
    theta_arr = np.empty(m, dtype=np.float64)
    cover_arr = np.empty(n_right if n_right > 0 else 1, dtype=np.float64)
    cover_mu_arr = np.empty(n_right if n_right > 0 else 1, dtype=np.float64)
    chosen_arr = np.zeros(n, dtype=np.uint8)
    tv_arr = np.empty(max_unit, dtype=np.int64)
    tp_arr = np.empty(max_unit, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] theta = theta_arr
    cdef double[::1] cover = cover_arr
    cdef double[::1] cover_mu = cover_mu_arr
    cdef unsigned char[::1] chosen = chosen_arr
    cdef long[::1] tv = tv_arr
    cdef double[::1] tp = tp_arr

    cdef long t, i, a, v, j, nt, step, best_u, slot
    cdef double gain, best_gain, val, reg, u01, radius, idx

    for t in range(T):
        # environment outcomes
        if outcome_code == C_OUT_DET:
            for i in range(m):
                x[i] = mu[i]
        elif outcome_code == C_OUT_BERN:
            for i in range(m):
                x[i] = 1.0 if random_standard_uniform(bg) < mu[i] else 0.0
        else:
            for i in range(m):
                x[i] = mu[i] + random_standard_normal(bg)

        # policy parameter vector
        if policy == C_POL_BETA:
            for i in range(m):
                theta[i] = random_beta(bg, beta_a[i], beta_b[i])
        elif policy == C_POL_GAUSS:
            for i in range(m):
                theta[i] = emp_means[i] + random_standard_normal(bg) / sqrt(
                    <double> counts[i]
                )
        else:
            for i in range(m):
                if counts[i] == 0:
                    theta[i] = 1.0
                else:
                    radius = sqrt(3.0 * log(<double> (t + 1)) / (2.0 * counts[i]))
                    idx = emp_means[i] + radius
                    if idx > 1.0:
                        idx = 1.0
                    elif idx < 0.0:
                        idx = 0.0
                    theta[i] = idx
        if clamp_theta:
            for i in range(m):
                if theta[i] > 1.0:
                    theta[i] = 1.0
                elif theta[i] < 0.0:
                    theta[i] = 0.0

        # greedy selection via incremental marginal gains
        for u in range(n):
            chosen[u] = 0
        for v in range(n_right):
            cover[v] = 1.0
        for step in range(K):
            best_gain = -INFINITY
            best_u = -1
            for u in range(n):
                if chosen[u]:
                    continue
                gain = 0.0
                if linear:
                    for j in range(unit_ptr[u], unit_ptr[u + 1]):
                        gain += theta[unit_arms[j]]
                else:
                    nt = 0
                    for j in range(unit_ptr[u], unit_ptr[u + 1]):
                        a = unit_arms[j]
                        v = arm_right[a]
                        slot = -1
                        for i in range(nt):
                            if tv[i] == v:
                                slot = i
                                break
                        if slot < 0:
                            tv[nt] = v
                            tp[nt] = cover[v]
                            slot = nt
                            nt += 1
                        tp[slot] = tp[slot] * (1.0 - theta[a])
                    for i in range(nt):
                        gain += cover[tv[i]] - tp[i]
                if gain > best_gain:
                    best_gain = gain
                    best_u = u
            chosen[best_u] = 1
            actions[t, step] = <int> best_u
            if not linear:
                for j in range(unit_ptr[best_u], unit_ptr[best_u + 1]):
                    a = unit_arms[j]
                    cover[arm_right[a]] *= 1.0 - theta[a]

        # true expected reward of the selected action
        if linear:
            val = 0.0
            for u in range(n):
                if chosen[u]:
                    for j in range(unit_ptr[u], unit_ptr[u + 1]):
                        val += mu[unit_arms[j]]
        else:
            for v in range(n_right):
                cover_mu[v] = 1.0
            for u in range(n):
                if chosen[u]:
                    for j in range(unit_ptr[u], unit_ptr[u + 1]):
                        a = unit_arms[j]
                        cover_mu[arm_right[a]] *= 1.0 - mu[a]
            val = 0.0
            for v in range(n_right):
                val += 1.0 - cover_mu[v]
        reg = r_baseline - val
        regret[t] = reg if reg > 0.0 else 0.0

        # posterior update over observed arms, ascending arm index
        if policy == C_POL_BETA:
            for i in range(m):
                if chosen[arm_unit[i]]:
                    u01 = random_standard_uniform(bg)
                    if u01 < x[i]:
                        beta_a[i] += 1.0
                    else:
                        beta_b[i] += 1.0
        else:
            for i in range(m):
                if chosen[arm_unit[i]]:
                    emp_means[i] = (emp_means[i] * counts[i] + x[i]) / (counts[i] + 1)
                    counts[i] += 1

    return actions_arr, regret_arr
