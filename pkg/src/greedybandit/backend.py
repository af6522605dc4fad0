"""Kernel backend selection and instance lowering.

The compiled extension is preferred when importable; the pure-Python kernel
is the fallback. Set GREEDYBANDIT_BACKEND=python (or =compiled) to force one.
Both expose the same `simulate` signature and produce bit-identical traces
for the Beta and Gaussian policies.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _kernel_py
from ._codes import OUTCOME_CODES, POLICY_CODES, REWARD_CODES
from .model import Instance

try:
    from . import _kernel  # compiled extension, may be absent
except ImportError:  # pragma: no cover - depends on the build
    _kernel = None

_FORCED = os.environ.get("GREEDYBANDIT_BACKEND", "").strip().lower()
if _FORCED == "python":
    _active = _kernel_py
elif _FORCED == "compiled":
    if _kernel is None:
        raise ImportError("GREEDYBANDIT_BACKEND=compiled but the extension is not built")
    _active = _kernel
else:
    _active = _kernel if _kernel is not None else _kernel_py


def backend_name() -> str:
    return "compiled" if _active.COMPILED else "python"


def available_backends() -> dict[str, object]:
    out = {"python": _kernel_py}
    if _kernel is not None:
        out["compiled"] = _kernel
    return out


@dataclass(frozen=True)
class LoweredInstance:
    """Flat-array view of an Instance consumed by the kernels."""

    unit_ptr: np.ndarray        # int64, n+1 CSR offsets into unit_arms_flat
    unit_arms_flat: np.ndarray  # int64, arm indices grouped by unit
    units_arms: tuple           # tuple of per-unit arm tuples (python kernel)
    arm_unit: np.ndarray        # int64, arm -> unit
    arm_right: np.ndarray       # int64, arm -> right node (zeros for linear)
    mu: np.ndarray              # float64 true means
    n_right: int
    K: int
    reward_code: int
    outcome_code: int


def lower_instance(instance: Instance) -> LoweredInstance:
    units_arms = tuple(u.arms for u in instance.units)
    flat = []
    ptr = [0]
    for arms in units_arms:
        flat.extend(arms)
        ptr.append(len(flat))
    m = instance.arm_count
    # copies: Instance arrays are frozen read-only, memoryviews need writable
    arm_right = (
        np.array(instance.arm_right, dtype=np.int64)
        if instance.arm_right is not None
        else np.zeros(m, dtype=np.int64)
    )
    return LoweredInstance(
        unit_ptr=np.asarray(ptr, dtype=np.int64),
        unit_arms_flat=np.asarray(flat, dtype=np.int64),
        units_arms=units_arms,
        arm_unit=np.array(instance.arm_unit, dtype=np.int64),
        arm_right=arm_right,
        mu=np.array(instance.means, dtype=np.float64),
        n_right=instance.right_count,
        K=instance.action_size,
        reward_code=REWARD_CODES[instance.reward_kind],
        outcome_code=OUTCOME_CODES[instance.outcome_model],
    )


def simulate(
    lowered: LoweredInstance,
    policy: str,
    T: int,
    rng: np.random.Generator,
    r_baseline: float,
    beta_a: np.ndarray | None = None,
    beta_b: np.ndarray | None = None,
    counts: np.ndarray | None = None,
    emp_means: np.ndarray | None = None,
    clamp_theta: bool = False,
    kernel=None,
):
    """Dispatch one replication's main loop to the active (or given) kernel."""
    kernel = kernel if kernel is not None else _active
    return kernel.simulate(
        lowered,
        POLICY_CODES[policy],
        int(T),
        rng,
        float(r_baseline),
        beta_a,
        beta_b,
        counts,
        emp_means,
        bool(clamp_theta),
    )
