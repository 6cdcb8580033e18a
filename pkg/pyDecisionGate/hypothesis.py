"""Fixed-horizon one-sided z-tests, the sample ratio mismatch test and the power algebra.

Variances are treated as known. Callers pass the standard error of the
treatment-minus-control estimate directly.
"""

import math

from pyDecisionGate.errors import ConfigurationError, DomainError, PlanningError
from pyDecisionGate.model import MetricReadout, TestKind, TestOutcome, TestSpec
from pyDecisionGate.numeric import (
    chi_square_sf,
    std_normal_cdf,
    std_normal_quantile,
    std_normal_sf,
    upper_critical,
)

SRM_PLATFORM_ALPHA = 1e-4


def _expect_kind(spec: TestSpec, kind: TestKind) -> None:
    if spec.kind != kind:
        raise DomainError(f"Expected a {kind} test specification, got {spec.kind}")


def _bounds(readout: MetricReadout, alpha: float) -> tuple[float, float]:
    margin = upper_critical(alpha) * readout.std_error
    return readout.estimate - margin, readout.estimate + margin


def run_superiority(readout: MetricReadout, spec: TestSpec) -> TestOutcome:
    _expect_kind(spec, TestKind.SUPERIORITY)
    z = readout.estimate / readout.std_error
    p_value = std_normal_sf(z)
    lower, upper = _bounds(readout, spec.significance_level)
    return TestOutcome(
        z_statistic=z,
        p_value=p_value,
        rejected=p_value < spec.significance_level,
        significance_level=spec.significance_level,
        ci_lower=lower,
        ci_upper=upper,
    )


def run_noninferiority(readout: MetricReadout, spec: TestSpec) -> TestOutcome:
    if spec.kind == TestKind.NON_INFERIORITY and spec.nim is None:
        raise ConfigurationError("nim", "non-inferiority tests require a NIM")
    _expect_kind(spec, TestKind.NON_INFERIORITY)
    nim = float(spec.nim)  # type: ignore[arg-type]
    z = (readout.estimate + nim) / readout.std_error
    p_value = std_normal_sf(z)
    lower, upper = _bounds(readout, spec.significance_level)
    return TestOutcome(
        z_statistic=z,
        p_value=p_value,
        rejected=p_value < spec.significance_level,
        significance_level=spec.significance_level,
        ci_lower=lower,
        ci_upper=upper,
    )


def run_inferiority(readout: MetricReadout, spec: TestSpec) -> TestOutcome:
    _expect_kind(spec, TestKind.INFERIORITY)
    z = readout.estimate / readout.std_error
    p_value = std_normal_cdf(z)
    lower, upper = _bounds(readout, spec.significance_level)
    return TestOutcome(
        z_statistic=z,
        p_value=p_value,
        rejected=p_value < spec.significance_level,
        significance_level=spec.significance_level,
        ci_lower=lower,
        ci_upper=upper,
    )


def run_srm(
    observed_treatment: int,
    observed_control: int,
    planned_ratio: float = 1.0,
    alpha: float = SRM_PLATFORM_ALPHA,
) -> TestOutcome:
    """Chi-square goodness of fit of the observed split against treatment:control = planned_ratio."""
    if observed_treatment < 0 or observed_control < 0:
        raise DomainError("Observed counts must be non-negative")
    total = observed_treatment + observed_control
    if total == 0:
        raise DomainError("Sample ratio mismatch test needs at least one observation")
    if planned_ratio <= 0:
        raise DomainError(f"Planned ratio must be positive, got {planned_ratio}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Significance level must be in (0, 1), got {alpha}")
    expected_treatment = total * planned_ratio / (1.0 + planned_ratio)
    expected_control = total / (1.0 + planned_ratio)
    statistic = (observed_treatment - expected_treatment) ** 2 / expected_treatment
    statistic += (observed_control - expected_control) ** 2 / expected_control
    p_value = chi_square_sf(statistic, df=1)
    return TestOutcome(
        z_statistic=statistic,
        p_value=p_value,
        rejected=p_value < alpha,
        significance_level=alpha,
    )


def run_external_quality(p_value: float, alpha: float) -> TestOutcome:
    """Wraps a p-value from a quality test computed elsewhere, e.g. a pre-exposure bias check."""
    if not 0.0 <= p_value <= 1.0:
        raise DomainError(f"p-value must be in [0, 1], got {p_value}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Significance level must be in (0, 1), got {alpha}")
    return TestOutcome(
        z_statistic=math.nan,
        p_value=p_value,
        rejected=p_value < alpha,
        significance_level=alpha,
    )


def run_test(readout: MetricReadout, spec: TestSpec) -> TestOutcome:
    if spec.kind == TestKind.SUPERIORITY:
        return run_superiority(readout, spec)
    if spec.kind == TestKind.NON_INFERIORITY:
        return run_noninferiority(readout, spec)
    if spec.kind == TestKind.INFERIORITY:
        return run_inferiority(readout, spec)
    raise DomainError(f"{spec.kind} is not a metric test")


def _check_probability(value: float, name: str) -> None:
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must be in (0, 1), got {value}")


def _raw_sample_size(variance: float, effect: float, alpha: float, beta: float) -> float:
    drift = upper_critical(alpha) + upper_critical(beta)
    return 2.0 * variance * drift**2 / effect**2


def required_sample_size(variance: float, effect: float, alpha: float, beta: float) -> int:
    """Per-group n for a two-sample one-sided z-test with power 1 - beta at `effect`."""
    _check_probability(alpha, "alpha")
    _check_probability(beta, "beta")
    if variance <= 0:
        raise DomainError(f"Variance must be positive, got {variance}")
    if effect <= 0:
        raise PlanningError(f"Effect must be positive to size a test, got {effect}")
    return max(1, math.ceil(_raw_sample_size(variance, effect, alpha, beta)))


def achieved_power(variance: float, effect: float, n_per_group: int, alpha: float) -> float:
    _check_probability(alpha, "alpha")
    return std_normal_sf(upper_critical(alpha) - effect / design_std_error(variance, n_per_group))


def design_std_error(variance: float, n_per_group: int) -> float:
    if variance <= 0:
        raise DomainError(f"Variance must be positive, got {variance}")
    if n_per_group < 1:
        raise DomainError(f"Sample size must be at least 1, got {n_per_group}")
    return math.sqrt(2.0 * variance / n_per_group)


def calibrated_nim(std_error: float, alpha: float, beta: float) -> float:
    """NIM giving the non-inferiority test power 1 - beta at delta = 0."""
    return std_error * (upper_critical(alpha) + std_normal_quantile(1.0 - beta))
