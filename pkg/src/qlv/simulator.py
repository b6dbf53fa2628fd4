"""Seeded Monte Carlo sweeps over the number of observations N.

Every random stream is derived from the master seed with
:class:`numpy.random.SeedSequence` keyed on ``(N, stream, block)``, where a
block is a fixed run of :data:`BLOCK_SIZE` trials.  Blocks are independent
units of work, so a sweep returns identical counts for any number of worker
threads.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import DegenerateScenarioError, InvalidConfigError, InvalidParameterError
from .gaussian import CloningChannelParams, clone_variance
from .hypothesis import (
    Decision,
    ErrorRates,
    MeanShiftScenario,
    Threshold,
    VarianceScenario,
    cloning_rates,
    cloning_threshold,
    decide_mean_shift,
    decide_variance,
    lambda_for_gamma,
    mean_shift_rates,
    mean_shift_threshold,
)

BLOCK_SIZE = 8192
DEFAULT_TRIALS = 100_000
DEFAULT_RS_RADIUS = 5000.0
_MAX_SEED = 2**64 - 1

_GEOMETRY, _HONEST, _MALICIOUS = 0, 1, 2


class Mode(str, enum.Enum):
    DELAY = "delay"
    CLONE = "clone"


class Hypothesis(enum.Enum):
    H0 = 0
    H1 = 1


class Placement(str, enum.Enum):
    RANDOM_DISC = "random_disc"
    FIXED = "fixed"


@dataclass(frozen=True)
class ThresholdPolicy:
    """``fixed_lambda``: LRT threshold ``value``; ``gamma_equals``: ``gamma = value * N``."""

    kind: str = "fixed_lambda"
    value: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("fixed_lambda", "gamma_equals"):
            raise InvalidConfigError(f"unknown threshold policy {self.kind!r}")
        if self.kind == "fixed_lambda" and not self.value > 0:
            raise InvalidConfigError("lambda must be positive")
        if self.kind == "gamma_equals" and not self.value >= 0:
            raise InvalidConfigError("gamma multiplier must be non-negative")

    @classmethod
    def fixed_lambda(cls, lam: float) -> ThresholdPolicy:
        return cls("fixed_lambda", lam)

    @classmethod
    def gamma_equals(cls, per_observation: float) -> ThresholdPolicy:
        return cls("gamma_equals", per_observation)


@dataclass(frozen=True)
class ScenarioConfig:
    mode: Mode
    n_values: tuple[int, ...]
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    rs_placement: Placement = Placement.RANDOM_DISC
    rs_radius: float = DEFAULT_RS_RADIUS
    rs_points: tuple[tuple[float, float], ...] | None = None
    sigma_t_std: float = 1e-6
    d_v: float = 1000.0
    eve_strategy: geo.EveStrategy = geo.EveStrategy.TOWARD_RS
    clone_inputs: CloningChannelParams | None = None
    threshold_policy: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    p0: float = 0.5

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
            object.__setattr__(self, "rs_placement", Placement(self.rs_placement))
            object.__setattr__(self, "eve_strategy", geo.EveStrategy(self.eve_strategy))
        except ValueError as exc:
            raise InvalidConfigError(str(exc)) from None
        n_values = tuple(self.n_values)
        if not n_values:
            raise InvalidConfigError("n_values must not be empty")
        if any(int(n) != n or n < 1 for n in n_values):
            raise InvalidConfigError("n_values must be positive integers")
        n_values = tuple(int(n) for n in n_values)
        if any(b <= a for a, b in zip(n_values, n_values[1:])):
            raise InvalidConfigError("n_values must be strictly increasing")
        object.__setattr__(self, "n_values", n_values)
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidConfigError("trials must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed <= _MAX_SEED:
            raise InvalidConfigError("seed must be an unsigned 64-bit integer")
        if not 0.0 <= self.p0 <= 1.0:
            raise InvalidConfigError("p0 must lie in [0, 1]")
        if self.mode is Mode.DELAY:
            self._check_delay()
        elif self.clone_inputs is None:
            raise InvalidConfigError("clone mode needs clone_inputs")

    def _check_delay(self) -> None:
        if self.n_values[0] < 3:
            raise InvalidConfigError("the protocol needs at least three reference stations")
        if not (math.isfinite(self.sigma_t_std) and self.sigma_t_std > 0):
            raise InvalidConfigError("sigma_t_std must be positive")
        if not (math.isfinite(self.d_v) and self.d_v >= 0):
            raise InvalidConfigError("d_v must be non-negative")
        if self.rs_placement is Placement.FIXED:
            if self.rs_points is None or len(self.rs_points) < self.n_values[-1]:
                raise InvalidConfigError("fixed placement needs at least max(n_values) rs_points")
        elif not self.rs_radius > 0:
            raise InvalidConfigError("rs_radius must be positive")


@dataclass(frozen=True)
class SweepRecord:
    n: int
    trials: int
    gamma: float | None
    lam: float | None
    analytic: ErrorRates | None
    alpha_empirical: float
    beta_empirical: float
    te_empirical: float
    se_alpha: float
    se_beta: float
    se_total: float


@dataclass(frozen=True)
class SweepResult:
    config: ScenarioConfig
    records: tuple[SweepRecord, ...]


def binomial_ci(successes: int, trials: int) -> tuple[float, float]:
    """Rate and binomial standard error ``sqrt(p (1 - p) / n)``."""
    if trials < 1 or not 0 <= successes <= trials:
        raise InvalidParameterError("need 0 <= successes <= trials and trials >= 1")
    rate = successes / trials
    return rate, math.sqrt(rate * (1.0 - rate) / trials)


def _stream(seed: int, n: int, kind: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, kind, block)))


def simulate_round(hypothesis, scenario, threshold: Threshold, rng, noise_variance=None, size=None):
    """Sample observation(s) under ``hypothesis`` and apply the detector.

    ``scenario`` selects the detector: a :class:`MeanShiftScenario` uses the
    mean-shift test, a :class:`VarianceScenario` the chi-square test.  By
    default the noise variance is the scenario's own (for the variance test,
    ``sigma_0`` under H0 and ``sigma_cl`` under H1).

    Returns ``(y, decision)``; with ``size`` set, ``y`` has shape
    ``(size, N)`` and ``decision`` is a boolean array (True = malicious).
    """
    hypothesis = Hypothesis(hypothesis)
    h1 = hypothesis is Hypothesis.H1
    if isinstance(scenario, MeanShiftScenario):
        means = scenario.v if h1 else scenario.u
        variance = scenario.sigma if noise_variance is None else noise_variance
        decide = decide_mean_shift
    elif isinstance(scenario, VarianceScenario):
        means = scenario.u
        variance = (scenario.sigma_cl if h1 else scenario.sigma_0) if noise_variance is None else noise_variance
        decide = decide_variance
    else:
        raise InvalidParameterError(f"unsupported scenario type {type(scenario).__name__}")
    if variance < 0:
        raise InvalidParameterError("noise variance must be non-negative")
    shape = means.shape if size is None else (size, means.size)
    y = means + math.sqrt(variance) * rng.standard_normal(shape)
    return y, decide(scenario, threshold, y)


def _blocks(trials: int):
    for block, start in enumerate(range(0, trials, BLOCK_SIZE)):
        yield block, min(BLOCK_SIZE, trials - start)


def _run_tasks(tasks, workers: int):
    if workers <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda task: task(), tasks))


def _record(n, trials, counts, p0, gamma, lam, analytic) -> SweepRecord:
    alpha, se_alpha = binomial_ci(counts[0], trials)
    beta, se_beta = binomial_ci(counts[1], trials)
    return SweepRecord(
        n=n,
        trials=trials,
        gamma=gamma,
        lam=lam,
        analytic=analytic,
        alpha_empirical=alpha,
        beta_empirical=beta,
        te_empirical=p0 * alpha + (1.0 - p0) * (1.0 - beta),
        se_alpha=se_alpha,
        se_beta=se_beta,
        se_total=math.hypot(p0 * se_alpha, (1.0 - p0) * se_beta),
    )


def _fixed_block(config, scenario, threshold, n, block, size):
    counts = []
    for kind, hyp in ((_HONEST, Hypothesis.H0), (_MALICIOUS, Hypothesis.H1)):
        _, rejected = simulate_round(hyp, scenario, threshold, _stream(config.seed, n, kind, block), size=size)
        counts.append(int(np.count_nonzero(rejected)))
    return counts


def _attack_shifts(config: ScenarioConfig, stations: np.ndarray) -> np.ndarray:
    origin = np.zeros(2)
    if config.eve_strategy is geo.EveStrategy.TOWARD_RS:
        return geo.toward_rs_shifts(stations, origin, config.d_v)[2]
    shifts = np.empty(stations.shape[:-1])
    for t, points in enumerate(stations):
        geometry = geo.NetworkGeometry(points, origin)
        deployment = geo.place_eve_devices(geometry, config.d_v, config.eve_strategy)
        shifts[t] = geo.delay_vector(geometry, deployment) - geo.honest_means(geometry)
    return shifts


def _random_delay_block(config: ScenarioConfig, n: int, block: int, size: int):
    stations = geo.random_disc_stations(_stream(config.seed, n, _GEOMETRY, block), (size, n), config.rs_radius)
    u = np.linalg.norm(stations, axis=-1) / geo.SPEED_OF_LIGHT
    shift = _attack_shifts(config, stations)
    v = u + shift
    sigma = config.sigma_t_std**2
    gamma = math.log(config.threshold_policy.value) + 0.5 * np.sum(shift * (v + u), axis=-1) / sigma
    counts = []
    for kind, means in ((_HONEST, u), (_MALICIOUS, v)):
        noise = _stream(config.seed, n, kind, block).standard_normal((size, n))
        y = means + config.sigma_t_std * noise
        statistic = np.sum(shift * y, axis=-1) / sigma
        counts.append(int(np.count_nonzero(statistic >= gamma)))
    return counts


def _fixed_delay_scenario(config: ScenarioConfig, n: int) -> MeanShiftScenario:
    geometry = geo.NetworkGeometry(np.asarray(config.rs_points[:n], dtype=float), (0.0, 0.0))
    deployment = geo.place_eve_devices(geometry, config.d_v, config.eve_strategy)
    return MeanShiftScenario(
        u=geo.honest_means(geometry),
        v=geo.delay_vector(geometry, deployment),
        sigma=config.sigma_t_std**2,
        p0=config.p0,
    )


def run_delay_sweep(config: ScenarioConfig, workers: int = 1) -> SweepResult:
    """Time-delay attack: empirical (and, for fixed stations, analytic) rates per N.

    Fixed ``rs_points`` are given relative to the claimed location at the
    origin; sweep cell N uses the first N of them.

    Raises:
        InvalidConfigError: wrong mode or inconsistent configuration.
        DegenerateScenarioError: ``d_v == 0`` so the attack is undetectable.
    """
    if config.mode is not Mode.DELAY:
        raise InvalidConfigError("run_delay_sweep needs a delay-mode config")
    if config.threshold_policy.kind != "fixed_lambda":
        raise InvalidConfigError("delay mode uses a fixed likelihood-ratio threshold")
    if config.d_v == 0:
        raise DegenerateScenarioError("d_v = 0 puts Eve at the claimed location: U equals V")
    lam = config.threshold_policy.value
    cells = []
    for n in config.n_values:
        if config.rs_placement is Placement.FIXED:
            scenario = _fixed_delay_scenario(config, n)
            threshold = mean_shift_threshold(scenario, lam)
            try:
                analytic = mean_shift_rates(scenario, threshold)
            except DegenerateScenarioError:
                analytic = None
            tasks = [
                (lambda n=n, b=b, s=s, sc=scenario, th=threshold: _fixed_block(config, sc, th, n, b, s))
                for b, s in _blocks(config.trials)
            ]
            cells.append((n, threshold.gamma, lam, analytic, tasks))
        else:
            tasks = [
                (lambda n=n, b=b, s=s: _random_delay_block(config, n, b, s)) for b, s in _blocks(config.trials)
            ]
            cells.append((n, None, lam, None, tasks))
    return _collect(config, cells, workers)


def _collect(config, cells, workers) -> SweepResult:
    flat = [task for *_, tasks in cells for task in tasks]
    results = iter(_run_tasks(flat, workers))
    records = []
    for n, gamma, lam, analytic, tasks in cells:
        counts = [int(c) for c in np.sum([next(results) for _ in tasks], axis=0)]
        records.append(_record(n, config.trials, counts, config.p0, gamma, lam, analytic))
    return SweepResult(config=config, records=tuple(records))


def clone_scenario(config: ScenarioConfig, n: int) -> tuple[VarianceScenario, Threshold]:
    params = config.clone_inputs
    scenario = VarianceScenario(
        n_obs=n, sigma_0=params.sigma_0, sigma_cl=clone_variance(params), p0=config.p0
    )
    policy = config.threshold_policy
    if policy.kind == "fixed_lambda":
        return scenario, cloning_threshold(policy.value, scenario)
    gamma = float(policy.value * n)
    lam = lambda_for_gamma(gamma, scenario) if scenario.sigma_cl > scenario.sigma_0 else None
    return scenario, Threshold(lam=lam, gamma=gamma)


def run_clone_sweep(config: ScenarioConfig, workers: int = 1) -> SweepResult:
    """Optimal-cloning attack: analytic chi-square rates and empirical rates per N.

    Honest quadratures have variance ``sigma_0`` (perfect legitimate memory);
    malicious ones carry the cloner's variance.  No timing noise enters.
    """
    if config.mode is not Mode.CLONE:
        raise InvalidConfigError("run_clone_sweep needs a clone-mode config")
    cells = []
    for n in config.n_values:
        scenario, threshold = clone_scenario(config, n)
        tasks = [
            (lambda n=n, b=b, s=s, sc=scenario, th=threshold: _fixed_block(config, sc, th, n, b, s))
            for b, s in _blocks(config.trials)
        ]
        cells.append((n, threshold.gamma, threshold.lam, cloning_rates(threshold, scenario), tasks))
    return _collect(config, cells, workers)


def run_sweep(config: ScenarioConfig, workers: int = 1) -> SweepResult:
    if config.mode is Mode.DELAY:
        return run_delay_sweep(config, workers)
    return run_clone_sweep(config, workers)


__all__ = [
    "BLOCK_SIZE",
    "Decision",
    "Hypothesis",
    "Mode",
    "Placement",
    "ScenarioConfig",
    "SweepRecord",
    "SweepResult",
    "ThresholdPolicy",
    "binomial_ci",
    "clone_scenario",
    "run_clone_sweep",
    "run_delay_sweep",
    "run_sweep",
    "simulate_round",
]
