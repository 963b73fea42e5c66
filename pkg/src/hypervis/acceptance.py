"""Acceptance verification suite: each criterion runs at its stated tolerance
with a pinned seed and reports one pass/fail line. Statistical criteria were
pre-verified for the pinned seeds; --fresh-seed reruns report without asserting.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import closedform, harness, intersect, visibility
from .closedform import FixedRadius
from .rng import stream

DEFAULT_SEED = 42


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime_s: float
    z_scores: list[float] = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} ({self.runtime_s:6.1f}s) {self.name}: {self.detail}"


def criterion_1(seed: int) -> CriterionResult:
    """Exponential visibility law: KS of 1e4 conditioned ranges against Exp(2 gamma sinh 0.5)."""
    t0 = time.perf_counter()
    law = FixedRadius(0.5)
    values, censored = visibility.sample_visibility_ranges(2, 1.5, law, 10_000, 12.0, seed)
    rate = 2.0 * 1.5 * math.sinh(0.5)
    ks = harness.ks_exponential(values[~censored], rate)
    runtime = time.perf_counter() - t0
    passed = ks.passed and runtime < 30.0
    detail = f"KS={ks.statistic:.5f} < {ks.critical_1pct:.5f} (n={ks.n}, rate={rate:.6f})"
    return CriterionResult(1, "exponential visibility law", passed, detail, runtime)


def criterion_2(seed: int) -> CriterionResult:
    """Mean visible volume: |z| < 3 against 2 pi^3/(gamma^2 v1^2 - pi^2)."""
    t0 = time.perf_counter()
    law = FixedRadius(0.5)
    rec = visibility.estimate_visible_volume(2, 1.5, law, 2000, 200, None, 12.0, seed)
    runtime = time.perf_counter() - t0
    passed = abs(rec.z_score) < 3.0 and runtime < 120.0
    detail = f"estimate={rec.estimate:.4f} +- {rec.stderr:.4f}, closed={rec.closed_form:.5f}, z={rec.z_score:+.2f}"
    return CriterionResult(2, "mean visible volume", passed, detail, runtime, [rec.z_score])


def criterion_3(seed: int) -> CriterionResult:
    """Finiteness threshold: Infinite exactly for gamma <= beta_c; beta_c = 0.9595 to 4 decimals."""
    t0 = time.perf_counter()
    law = FixedRadius(0.5)
    beta_c = closedform.visibility_threshold(2, 0.5)
    at = closedform.mean_visible_volume(2, beta_c, law)
    below = closedform.mean_visible_volume(2, 0.9 * beta_c, law)
    above = closedform.mean_visible_volume(2, beta_c * (1.0 + 1e-6), law)
    ok_inf = math.isinf(at) and math.isinf(below) and math.isfinite(above)
    ok_value = round(beta_c, 4) == 0.9595
    passed = ok_inf and ok_value
    detail = f"beta_c={beta_c:.6f}, vol(beta_c)={at}, vol(0.9 beta_c)={below}, vol(beta_c(1+1e-6)) finite={math.isfinite(above)}"
    return CriterionResult(3, "finiteness threshold", passed, detail, time.perf_counter() - t0)


def criterion_4(seed: int) -> CriterionResult:
    """Intersection density: |z| < 3 against 4 pi sinh^2(0.5)."""
    t0 = time.perf_counter()
    rec = intersect.estimate_intersection_density(1.0, FixedRadius(0.5), 3.0, 2000, seed)
    runtime = time.perf_counter() - t0
    passed = abs(rec.z_score) < 3.0 and runtime < 120.0
    detail = f"estimate={rec.estimate:.4f} +- {rec.stderr:.4f}, closed={rec.closed_form:.5f}, z={rec.z_score:+.2f}"
    return CriterionResult(4, "intersection density", passed, detail, runtime, [rec.z_score])


def criterion_5(seed: int) -> CriterionResult:
    """Zero cell: |z| < 3 against 2 pi^3/(16 - pi^2) and KS of ranges against Exp(4/pi)."""
    t0 = time.perf_counter()
    rec = visibility.estimate_zero_cell_volume(2, 2.0, 2000, 200, 12.0, seed)
    values, censored = visibility.sample_zero_cell_ranges(2, 2.0, 10_000, 12.0, seed + 1)
    ks = harness.ks_exponential(values[~censored], 4.0 / math.pi)
    runtime = time.perf_counter() - t0
    passed = abs(rec.z_score) < 3.0 and ks.passed and runtime < 120.0
    detail = (
        f"estimate={rec.estimate:.4f} +- {rec.stderr:.4f}, closed={rec.closed_form:.5f}, "
        f"z={rec.z_score:+.2f}; KS={ks.statistic:.5f} < {ks.critical_1pct:.5f}"
    )
    return CriterionResult(5, "zero-cell volume", passed, detail, runtime, [rec.z_score])


def criterion_6(seed: int) -> CriterionResult:
    """Steiner-coefficient identity: quadrature residuals < 1e-8 on the grid."""
    t0 = time.perf_counter()
    worst = 0.0
    for d, k, j in ((3, 1, 0), (3, 2, 0), (3, 2, 1), (4, 2, 1), (4, 3, 1)):
        for r in (0.3, 1.0, 2.0):
            worst = max(worst, closedform.verify_ell_identity(d, k, j, r))
    runtime = time.perf_counter() - t0
    passed = worst < 1e-8 and runtime < 5.0
    return CriterionResult(6, "ell identity", passed, f"max residual {worst:.2e}", runtime)


def criterion_7(seed: int) -> CriterionResult:
    """Rate integral: gamma form vs quadrature < 1e-10 relative; spot value (2,2) = 1/3."""
    t0 = time.perf_counter()
    worst = 0.0
    for d, a in ((2, 1.5), (2, 2.0), (3, 4.0), (4, 6.0)):
        gamma_form = closedform.sinh_exp_integral(d, a)
        quad_form = closedform.sinh_exp_integral_quadrature(d, a)
        worst = max(worst, abs(gamma_form - quad_form) / gamma_form)
    spot = abs(closedform.sinh_exp_integral(2, 2.0) - 1.0 / 3.0)
    passed = worst < 1e-10 and spot < 1e-14
    detail = f"max rel err {worst:.2e}, |value(2,2) - 1/3| = {spot:.2e}"
    return CriterionResult(7, "rate-integral identity", passed, detail, time.perf_counter() - t0)


def criterion_8(seed: int) -> CriterionResult:
    """Steiner fit V0(ball R=1) = cosh 1 within 1e-6; MC ball volume z < 3."""
    t0 = time.perf_counter()
    coeffs = closedform.steiner_ball_coefficients(2, 1.0)
    v0_err = abs(coeffs[0] - math.cosh(1.0))
    est, stderr = closedform.mc_ball_volume(2, 1.0, 200_000, stream(seed, 808))
    target = 2.0 * math.pi * (math.cosh(1.0) - 1.0)
    z = (est - target) / stderr
    passed = v0_err < 1e-6 and abs(z) < 3.0
    detail = f"|V0 - cosh 1| = {v0_err:.2e}; MC volume {est:.4f} +- {stderr:.4f} vs {target:.5f}, z={z:+.2f}"
    return CriterionResult(8, "Steiner and ball-volume checks", passed, detail, time.perf_counter() - t0, [z])


def criterion_9(seed: int) -> CriterionResult:
    """Critical truncated growth: (estimate(20) - estimate(10))/10 within 5% of pi."""
    t0 = time.perf_counter()
    law = FixedRadius(0.5)
    gamma = closedform.visibility_threshold(2, 0.5)
    est = visibility.estimate_visible_volume_stratified(
        2, gamma, law, (10.0, 20.0), band_width=0.5, sims_per_band=25_000, n_batches=8, seed=seed
    )
    increment = (est.estimates[1] - est.estimates[0]) / 10.0
    runtime = time.perf_counter() - t0
    passed = abs(increment - math.pi) < 0.05 * math.pi and runtime < 180.0
    detail = (
        f"estimates {est.estimates[0]:.3f}@10, {est.estimates[1]:.3f}@20; "
        f"increment/10 = {increment:.4f} vs pi = {math.pi:.4f} ({abs(increment / math.pi - 1) * 100:.2f}%)"
    )
    return CriterionResult(9, "critical truncated growth", passed, detail, runtime)


def criterion_10(seed: int) -> CriterionResult:
    """Near-critical scaling: closed form within 1% of omega_d/(2^{d-1} delta) for d in {2, 3}."""
    t0 = time.perf_counter()
    delta = 1e-3
    worst = 0.0
    for d in (2, 3):
        law = FixedRadius(0.5)
        v_star = closedform.grain_moments(d, law).v_dm1_star
        gamma = (d - 1 + delta) / v_star
        ratio = closedform.mean_visible_volume(d, gamma, law) / closedform.critical_scaling(d, delta)
        worst = max(worst, abs(ratio - 1.0))
    passed = worst < 0.01
    return CriterionResult(10, "near-critical scaling", passed, f"max |ratio - 1| = {worst:.2e}", time.perf_counter() - t0)


def criterion_11(seed: int) -> CriterionResult:
    """Crofton consistency: mean crossings of a unit segment within 3 stderr of 2/pi."""
    t0 = time.perf_counter()
    rec = visibility.estimate_segment_crossings(2, 1.0, 1.0, 10_000, seed)
    passed = abs(rec.z_score) < 3.0
    detail = f"mean={rec.estimate:.4f} +- {rec.stderr:.4f} vs {rec.closed_form:.5f}, z={rec.z_score:+.2f}"
    return CriterionResult(11, "Crofton segment crossings", passed, detail, time.perf_counter() - t0, [rec.z_score])


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_all(fresh_seed: bool = False, only: set[int] | None = None) -> list[CriterionResult]:
    """Run the acceptance criteria; pinned seed unless fresh_seed is set.

    Each criterion draws from its own sub-seed (master + 1000 * number) so the
    pinned runs are independent and individually pre-verified.
    """
    seed = int(np.random.SeedSequence().entropy % 2**31) if fresh_seed else DEFAULT_SEED
    results = []
    zs: list[float] = []
    for number, fn in sorted(CRITERIA.items()):
        if only is not None and number not in only:
            continue
        res = fn(seed + 1000 * number)
        results.append(res)
        zs.extend(res.z_scores)
    if only is None and zs:
        worst = max(abs(z) for z in zs)
        results.append(
            CriterionResult(12, "family-wise z bound", worst < 4.0, f"max |z| = {worst:.2f} < 4", 0.0)
        )
    return results
