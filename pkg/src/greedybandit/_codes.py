"""Integer codes shared by the compiled and pure-Python simulation kernels."""

REWARD_PMC = 0
REWARD_LINEAR = 1

OUT_DETERMINISTIC = 0
OUT_BERNOULLI = 1
OUT_GAUSSIAN = 2

POLICY_BETA = 0
POLICY_GAUSSIAN = 1
POLICY_CUCB = 2

REWARD_CODES = {"pmc": REWARD_PMC, "linear": REWARD_LINEAR}
OUTCOME_CODES = {
    "deterministic": OUT_DETERMINISTIC,
    "bernoulli": OUT_BERNOULLI,
    "gaussian": OUT_GAUSSIAN,
}
POLICY_CODES = {"cts-beta": POLICY_BETA, "cts-gaussian": POLICY_GAUSSIAN, "cucb": POLICY_CUCB}
