"""Binary hypothesis tests for location verification.

Two simple-vs-simple Gaussian tests are provided:

* a mean-shift likelihood-ratio test, used against the time-delay attack,
  where honest and malicious observations differ only in their means;
* a variance (chi-square) test, used against the optimal-cloning attack,
  where the malicious observations carry extra quadrature noise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScenarioError, InvalidParameterError

_EPS = 1e-16
_MAX_ITER = 100_000


class Decision(enum.Enum):
    LEGITIMATE = 0
    MALICIOUS = 1


@dataclass(frozen=True)
class ErrorRates:
    """False-positive rate, detection rate and total error of a verifier."""

    alpha: float
    beta: float
    total_error: float
    p0: float = 0.5

    @property
    def false_negative(self) -> float:
        return 1.0 - self.beta


@dataclass(frozen=True)
class Threshold:
    """Likelihood-ratio threshold ``lam`` and its image ``gamma``.

    ``lam`` is None when the threshold was set directly on the statistic and
    no likelihood ratio corresponds to it.
    """

    lam: float | None
    gamma: float


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


def _check_p0(p0: float) -> None:
    if not 0.0 <= p0 <= 1.0:
        raise InvalidParameterError("p0 must lie in [0, 1]")


@dataclass(frozen=True)
class MeanShiftScenario:
    """``Y ~ N(u, sigma I)`` under H0 and ``Y ~ N(v, sigma I)`` under H1.

    ``sigma`` is the per-component noise *variance*.
    """

    u: np.ndarray
    v: np.ndarray
    sigma: float
    p0: float = 0.5

    def __post_init__(self) -> None:
        u, v = _as_vector(self.u, "u"), _as_vector(self.v, "v")
        if u.size < 1 or u.shape != v.shape:
            raise InvalidParameterError("u and v must be non-empty and the same length")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParameterError("sigma must be positive")
        _check_p0(self.p0)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n_obs(self) -> int:
        return self.u.size

    @property
    def shift(self) -> np.ndarray:
        return self.v - self.u

    @property
    def mahalanobis(self) -> float:
        """Separation ``d = |v - u| / sqrt(sigma)`` of the two hypotheses."""
        return float(np.linalg.norm(self.shift) / math.sqrt(self.sigma))


def _check_length(y: np.ndarray, n: int) -> None:
    if y.shape[-1:] != (n,):
        raise InvalidParameterError(f"observation length {y.shape[-1:]} does not match N={n}")


def mean_shift_statistic(scenario: MeanShiftScenario, y):
    """Test statistic ``(v - u)^T y / sigma``.

    ``y`` may be a single observation or a stack of them along the leading
    axes; the statistic is returned with the same leading shape.
    """
    y = np.asarray(y, dtype=float)
    _check_length(y, scenario.n_obs)
    t = (y @ scenario.shift) / scenario.sigma
    return float(t) if t.ndim == 0 else t


def mean_shift_threshold(scenario: MeanShiftScenario, lam: float) -> Threshold:
    if not lam > 0:
        raise InvalidParameterError("likelihood-ratio threshold must be positive")
    gamma = math.log(lam) + 0.5 * float(scenario.shift @ (scenario.v + scenario.u)) / scenario.sigma
    return Threshold(lam=lam, gamma=gamma)


def _decide(statistic, gamma: float):
    if np.ndim(statistic) == 0:
        return Decision.MALICIOUS if statistic >= gamma else Decision.LEGITIMATE
    return np.asarray(statistic) >= gamma


def decide_mean_shift(scenario: MeanShiftScenario, threshold: Threshold, y):
    """Decide H1 iff ``T(y) >= gamma``.

    For a single observation a :class:`Decision` is returned; for a stack of
    observations a boolean array (True = malicious).
    """
    return _decide(mean_shift_statistic(scenario, y), threshold.gamma)


def normal_sf(z: float) -> float:
    """Upper tail ``Q(z)`` of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def total_error(alpha: float, beta: float, p0: float = 0.5) -> float:
    """``p0 * alpha + (1 - p0) * (1 - beta)``."""
    for name, value in (("alpha", alpha), ("beta", beta), ("p0", p0)):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameterError(f"{name} must lie in [0, 1], got {value}")
    return p0 * alpha + (1.0 - p0) * (1.0 - beta)


def mean_shift_rates(scenario: MeanShiftScenario, threshold: Threshold) -> ErrorRates:
    """Closed-form error rates of the mean-shift test.

    Under either hypothesis the statistic is normal with standard deviation
    ``d`` (the Mahalanobis distance) and mean ``shift . mean / sigma``.

    Raises:
        DegenerateScenarioError: ``u == v``, so the statistic is constant.
    """
    d = scenario.mahalanobis
    if d == 0.0:
        raise DegenerateScenarioError("u equals v; the hypotheses are indistinguishable")
    mean0 = float(scenario.shift @ scenario.u) / scenario.sigma
    mean1 = float(scenario.shift @ scenario.v) / scenario.sigma
    alpha = normal_sf((threshold.gamma - mean0) / d)
    beta = normal_sf((threshold.gamma - mean1) / d)
    return ErrorRates(alpha, beta, total_error(alpha, beta, scenario.p0), scenario.p0)


@dataclass(frozen=True)
class VarianceScenario:
    """``Y_i ~ N(u_i, sigma_0)`` under H0 and ``N(u_i, sigma_cl)`` under H1.

    ``u`` defaults to zero means of length ``n_obs``.
    """

    n_obs: int
    sigma_0: float
    sigma_cl: float
    u: np.ndarray = field(default=None)
    p0: float = 0.5

    def __post_init__(self) -> None:
        if int(self.n_obs) != self.n_obs or self.n_obs < 0:
            raise InvalidParameterError("n_obs must be a non-negative integer")
        if not (math.isfinite(self.sigma_0) and self.sigma_0 > 0):
            raise InvalidParameterError("sigma_0 must be positive")
        if not (math.isfinite(self.sigma_cl) and self.sigma_cl >= self.sigma_0):
            raise InvalidParameterError("sigma_cl must be >= sigma_0")
        _check_p0(self.p0)
        u = np.zeros(self.n_obs) if self.u is None else _as_vector(self.u, "u")
        if u.size != self.n_obs:
            raise InvalidParameterError("u must have length n_obs")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def _lrt_scale(self) -> float:
        if self.sigma_cl == self.sigma_0:
            raise DegenerateScenarioError("sigma_cl equals sigma_0; no likelihood-ratio threshold exists")
        return 2.0 * self.sigma_0 * self.sigma_cl / (self.sigma_cl - self.sigma_0)


def variance_statistic(scenario: VarianceScenario, y):
    """Sum of squared deviations ``sum_i (y_i - u_i)**2`` (stack-aware)."""
    y = np.asarray(y, dtype=float)
    _check_length(y, scenario.n_obs)
    t = np.sum((y - scenario.u) ** 2, axis=-1)
    return float(t) if t.ndim == 0 else t


def cloning_threshold(lam: float, scenario: VarianceScenario) -> Threshold:
    """Statistic threshold equivalent to likelihood-ratio threshold ``lam``.

    ``gamma = 2 s0 scl / (scl - s0) * (ln lam + N ln sqrt(scl / s0))``.
    """
    if not lam > 0:
        raise InvalidParameterError("likelihood-ratio threshold must be positive")
    half_log_ratio = 0.5 * math.log(scenario.sigma_cl / scenario.sigma_0)
    gamma = scenario._lrt_scale() * (math.log(lam) + scenario.n_obs * half_log_ratio)
    return Threshold(lam=lam, gamma=gamma)


def lambda_for_gamma(gamma_target: float, scenario: VarianceScenario) -> float:
    """Invert :func:`cloning_threshold`: the ``lam`` whose image is ``gamma_target``."""
    half_log_ratio = 0.5 * math.log(scenario.sigma_cl / scenario.sigma_0)
    return math.exp(gamma_target / scenario._lrt_scale() - scenario.n_obs * half_log_ratio)


def decide_variance(scenario: VarianceScenario, threshold: Threshold, y):
    return _decide(variance_statistic(scenario, y), threshold.gamma)


def _lower_gamma_series(a: float, x: float) -> float:
    term = total = 1.0 / a
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_fraction(a: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_lower_gamma(a: float, x: float) -> float:
    """``P(a, x)``: series below ``x < a + 1``, continued fraction above."""
    if x < 0 or a <= 0:
        raise InvalidParameterError("need a > 0 and x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _lower_gamma_series(a, x))
    return max(0.0, 1.0 - _upper_gamma_fraction(a, x))


def chi_square_cdf(x: float, n: int) -> float:
    """Chi-square CDF with ``n`` degrees of freedom, ``P(n/2, x/2)``."""
    if not x >= 0:
        raise InvalidParameterError("chi-square argument must be non-negative")
    if int(n) != n or n < 1:
        raise InvalidParameterError("degrees of freedom must be a positive integer")
    return regularized_lower_gamma(0.5 * n, 0.5 * x)


def cloning_rates(threshold: Threshold, scenario: VarianceScenario) -> ErrorRates:
    """``alpha = 1 - chi2_N(gamma/s0)`` and ``beta = 1 - chi2_N(gamma/scl)``."""
    if threshold.gamma < 0:
        raise InvalidParameterError("variance threshold must be non-negative")
    if scenario.n_obs < 1:
        raise InvalidParameterError("need at least one observation")
    n = scenario.n_obs
    alpha = 1.0 - chi_square_cdf(threshold.gamma / scenario.sigma_0, n)
    beta = 1.0 - chi_square_cdf(threshold.gamma / scenario.sigma_cl, n)
    return ErrorRates(alpha, beta, total_error(alpha, beta, scenario.p0), scenario.p0)
