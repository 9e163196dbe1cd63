"""Self-verification: closed-form kernels against the recursion.

Draws random models, evaluates every interval transition matrix both
ways and checks agreement and row stochasticity.  Used by the CLI verify
command and by the acceptance tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import interval_transition_closed, interval_transition_recursive, random_model
from .nhmodel import nh_interval_closed, nh_interval_recursive, random_nh_model

__all__ = ["VerificationResult", "run_verification", "EQUALITY_TOL", "ROW_SUM_CHECK_TOL"]

EQUALITY_TOL = 1e-10
ROW_SUM_CHECK_TOL = 1e-10


@dataclass
class VerificationResult:
    seed: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)
    max_equality_gap: float = 0.0
    max_row_sum_gap: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lines = ["%s: %d checks, %d failures (sweep seed %d)"
                 % (status, self.checks, len(self.failures), self.seed),
                 "max |closed - recursive| = %.3g (tol %g)" % (self.max_equality_gap, EQUALITY_TOL),
                 "max |row sum - 1|        = %.3g (tol %g)" % (self.max_row_sum_gap, ROW_SUM_CHECK_TOL)]
        lines.extend("  " + f for f in self.failures[:20])
        if len(self.failures) > 20:
            lines.append("  ... %d more" % (len(self.failures) - 20))
        return "\n".join(lines)


def _record(result: VerificationResult, label: str, n: int,
            q_closed: np.ndarray, q_recursive: np.ndarray) -> None:
    result.checks += 1
    gap = float(np.abs(q_closed - q_recursive).max())
    result.max_equality_gap = max(result.max_equality_gap, gap)
    if gap > EQUALITY_TOL:
        result.failures.append(
            "%s n=%d: closed vs recursive gap %.3g > %g" % (label, n, gap, EQUALITY_TOL))
    for name, q in (("closed", q_closed), ("recursive", q_recursive)):
        rs_gap = float(np.abs(q.sum(axis=1) - 1.0).max())
        result.max_row_sum_gap = max(result.max_row_sum_gap, rs_gap)
        if rs_gap > ROW_SUM_CHECK_TOL:
            result.failures.append(
                "%s n=%d: %s kernel row sums off by %.3g > %g"
                % (label, n, name, rs_gap, ROW_SUM_CHECK_TOL))


def run_verification(horizon: int = 12, n_models: int = 20, n_nh_models: int = 10,
                     nh_horizon: int | None = None, seed: int = 20260814,
                     m_max: int = 6, perturb: float = 0.0) -> VerificationResult:
    """Cross-validate kernels on random homogeneous and position-dependent models.

    horizon 0 only checks Q(0) = I.  perturb > 0 injects that much error
    into the closed-form side, to confirm the harness can fail.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0, got %d" % horizon)
    if nh_horizon is None:
        nh_horizon = horizon
    result = VerificationResult(seed=seed)
    rng = np.random.default_rng(seed)
    for idx in range(n_models):
        model_seed = seed + 1 + idx
        mm = int(rng.integers(2, m_max + 1))
        model = random_model(model_seed, m_max=mm)
        kern = interval_transition_recursive(model, horizon)
        label = "homogeneous[seed=%d m_max=%d]" % (model_seed, mm)
        for n in range(horizon + 1):
            q_closed = interval_transition_closed(model, n)
            if perturb:
                q_closed = q_closed + perturb
            _record(result, label, n, q_closed, kern.Q[n])
    for idx in range(n_nh_models):
        model_seed = seed + 10_001 + idx
        mm = int(rng.integers(2, m_max + 1))
        model = random_nh_model(model_seed, m_max=mm)
        kern = nh_interval_recursive(model, nh_horizon)
        for k in range(model.s):
            label = "position-dependent[seed=%d m_max=%d] k=%d" % (model_seed, mm, k)
            for n in range(nh_horizon + 1):
                q_closed = nh_interval_closed(model, k, n)
                if perturb:
                    q_closed = q_closed + perturb
                _record(result, label, n, q_closed, kern.Q[k, n])
    return result
