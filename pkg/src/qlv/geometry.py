"""Planar verification geometry, attack timing and positioning bounds.

Timing convention: every reference station (RS) emits its share of the
verification information (VI) so that all shares reach the claimed location
at t = 0.  An honest prover answers immediately, so the response reaches
RS i at ``U_i = |RS_i - claimed| / c``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateScenarioError, InvalidParameterError

SPEED_OF_LIGHT = 299_792_458.0
_TIE_RTOL = 1e-12


class PlanarPoint(NamedTuple):
    x: float
    y: float


def _points(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidParameterError(f"{name} must be a sequence of (x, y) points")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must have finite coordinates")
    arr.setflags(write=False)
    return arr


def _point(value, name: str) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(-1)
    if arr.shape != (2,) or not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} must be a finite (x, y) point")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class NetworkGeometry:
    """Reference-station positions and the prover's claimed location (meters).

    The verification protocol itself needs at least three stations; that is
    enforced by the simulator, so single-station thought experiments and
    two-station bounds remain expressible here.
    """

    reference_stations: np.ndarray
    claimed_location: np.ndarray
    c: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        stations = _points(self.reference_stations, "reference_stations")
        claimed = _point(self.claimed_location, "claimed_location")
        if len(stations) < 1:
            raise InvalidParameterError("need at least one reference station")
        if not self.c > 0:
            raise InvalidParameterError("signal speed must be positive")
        if np.any(np.linalg.norm(stations - claimed, axis=1) == 0.0):
            raise InvalidParameterError("a reference station coincides with the claimed location")
        object.__setattr__(self, "reference_stations", stations)
        object.__setattr__(self, "claimed_location", claimed)

    @property
    def n_stations(self) -> int:
        return len(self.reference_stations)

    @property
    def distances(self) -> np.ndarray:
        return np.linalg.norm(self.reference_stations - self.claimed_location, axis=1)

    @property
    def bearings(self) -> np.ndarray:
        """Full-quadrant bearing of each station seen from the claimed location."""
        rel = self.reference_stations - self.claimed_location
        return np.arctan2(rel[:, 1], rel[:, 0])


@dataclass(frozen=True)
class EveDeployment:
    """Adversary devices, one per station, and the device holding the state."""

    devices: np.ndarray
    holder_index: int

    def __post_init__(self) -> None:
        devices = _points(self.devices, "devices")
        if not 0 <= self.holder_index < len(devices):
            raise InvalidParameterError("holder_index out of range")
        object.__setattr__(self, "devices", devices)


@dataclass(frozen=True)
class TimingModel:
    sigma_t_std: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma_t_std) and self.sigma_t_std > 0):
            raise InvalidParameterError("timing noise standard deviation must be positive")

    @property
    def variance(self) -> float:
        return self.sigma_t_std**2


class EveStrategy(str, enum.Enum):
    TOWARD_RS = "toward_rs"
    MINIMIZE_MAHALANOBIS = "minimize_mahalanobis"


def honest_means(geometry: NetworkGeometry) -> np.ndarray:
    """Honest response arrival times ``|RS_i - claimed| / c`` (seconds)."""
    return geometry.distances / geometry.c


def _earliest_by_holder(stations, claimed, devices, c):
    """Earliest light-speed response times for every choice of holder.

    Works on stacked inputs: ``stations`` and ``devices`` are ``(..., N, 2)``
    and ``claimed`` broadcasts against ``(..., 2)``.  Returns ``(..., H, N)``
    where entry ``[h, k]`` is the arrival at RS k when device h holds the
    state.
    """
    claimed = np.asarray(claimed)[..., None, :]
    d_claimed = np.linalg.norm(stations - claimed, axis=-1)
    # rs_dev[..., h, i] = |RS_i - dev_h|
    rs_dev = np.linalg.norm(stations[..., None, :, :] - devices[..., :, None, :], axis=-1)
    lead = np.max(rs_dev - d_claimed[..., None, :], axis=-1)
    t_hold = np.maximum(lead, 0.0) / c
    hop = np.linalg.norm(devices[..., :, None, :] - devices[..., None, :, :], axis=-1)
    last_leg = np.diagonal(rs_dev, axis1=-2, axis2=-1)
    return t_hold[..., None] + (hop + last_leg[..., None, :]) / c


def earliest_response_times(geometry: NetworkGeometry, deployment: EveDeployment) -> np.ndarray:
    """Earliest instant Eve's response can reach each station (seconds).

    The holder must first collect every VI share (never before t = 0), then
    its outcome travels holder -> device k -> RS k at light speed.
    """
    _check_deployment(geometry, deployment)
    by_holder = _earliest_by_holder(
        geometry.reference_stations, geometry.claimed_location, deployment.devices, geometry.c
    )
    return by_holder[deployment.holder_index]


def delay_vector(geometry: NetworkGeometry, deployment: EveDeployment) -> np.ndarray:
    """Mean response times ``V`` produced by the time-delay attack (seconds).

    Eve knows every station position, so a response that could arrive
    before the honest time is held back until ``U_k``; an early answer would
    betray her as surely as a late one.
    """
    return np.maximum(earliest_response_times(geometry, deployment), honest_means(geometry))


def _check_deployment(geometry: NetworkGeometry, deployment: EveDeployment) -> None:
    if len(deployment.devices) != geometry.n_stations:
        raise InvalidParameterError("Eve needs exactly one device per reference station")


def _pick_holder(shift_norms: np.ndarray) -> np.ndarray:
    """Lowest holder index among those within rounding of the minimum."""
    best = np.min(shift_norms, axis=-1, keepdims=True)
    near = shift_norms <= best * (1.0 + _TIE_RTOL) + 1e-300
    return np.argmax(near, axis=-1)


def toward_rs_shifts(stations, claimed, d_v: float, c: float = SPEED_OF_LIGHT):
    """Stacked toward-RS attack: devices, chosen holders and ``V - U``.

    Returns ``(devices, holders, shifts)`` with shapes ``(..., N, 2)``,
    ``(...)`` and ``(..., N)``.
    """
    stations = np.asarray(stations, dtype=float)
    claimed = np.asarray(claimed, dtype=float)
    rel = stations - claimed[..., None, :]
    dist = np.linalg.norm(rel, axis=-1, keepdims=True)
    devices = claimed[..., None, :] + d_v * rel / dist
    honest = dist[..., 0] / c
    by_holder = _earliest_by_holder(stations, claimed, devices, c)
    shifts_all = np.maximum(by_holder, honest[..., None, :]) - honest[..., None, :]
    holders = _pick_holder(np.linalg.norm(shifts_all, axis=-1))
    shifts = np.take_along_axis(shifts_all, holders[..., None, None], axis=-2)[..., 0, :]
    return devices, holders, shifts


def _best_holder(geometry: NetworkGeometry, devices: np.ndarray) -> tuple[int, float]:
    honest = honest_means(geometry)
    by_holder = _earliest_by_holder(
        geometry.reference_stations, geometry.claimed_location, devices, geometry.c
    )
    norms = np.linalg.norm(np.maximum(by_holder, honest) - honest, axis=-1)
    holder = int(_pick_holder(norms))
    return holder, float(norms[holder])


def place_eve_devices(
    geometry: NetworkGeometry,
    d_v: float,
    strategy: EveStrategy | str = EveStrategy.TOWARD_RS,
    n_angles: int = 64,
    sweeps: int = 3,
) -> EveDeployment:
    """Place one device per station at distance ``d_v`` from the claimed location.

    ``toward_rs`` puts device k on the segment toward RS k and picks the
    holder that minimizes ``|V - U|``.  ``minimize_mahalanobis`` starts from
    that deployment and runs coordinate descent over ``n_angles`` equally
    spaced positions on the radius-``d_v`` circle for each device, keeping a
    move only when it strictly lowers ``|V - U|``.
    """
    try:
        strategy = EveStrategy(strategy)
    except ValueError:
        raise InvalidParameterError(f"unknown placement strategy {strategy!r}") from None
    if not (math.isfinite(d_v) and d_v > 0):
        raise InvalidParameterError("verification distance must be positive")
    devices, _, _ = toward_rs_shifts(
        geometry.reference_stations, geometry.claimed_location, d_v, geometry.c
    )
    devices = np.array(devices)
    holder, score = _best_holder(geometry, devices)
    if strategy is EveStrategy.MINIMIZE_MAHALANOBIS:
        if n_angles < 1 or sweeps < 0:
            raise InvalidParameterError("search grid must have at least one angle")
        angles = 2.0 * np.pi * np.arange(n_angles) / n_angles
        ring = geometry.claimed_location + d_v * np.column_stack([np.cos(angles), np.sin(angles)])
        for _ in range(sweeps):
            improved = False
            for k in range(len(devices)):
                for candidate in ring:
                    trial = devices.copy()
                    trial[k] = candidate
                    h, s = _best_holder(geometry, trial)
                    if s < score:
                        devices, holder, score = trial, h, s
                        improved = True
            if not improved:
                break
    return EveDeployment(devices=devices, holder_index=holder)


def random_disc_stations(rng: np.random.Generator, n: int, radius: float, center=(0.0, 0.0)) -> np.ndarray:
    """``n`` points uniform over a disc (stackable: ``n`` may be a shape tuple)."""
    shape = (n,) if np.isscalar(n) else tuple(n)
    rho = radius * np.sqrt(rng.random(shape))
    theta = 2.0 * np.pi * rng.random(shape)
    return np.asarray(center, dtype=float) + np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=-1)


def crlb_position_std(geometry: NetworkGeometry, timing: TimingModel, n_obs: int | None = None) -> float:
    """Lower bound on the position-error standard deviation (meters).

    ``c * sqrt(var_t * N) / sqrt(sum_{i<j} sin^2(phi_i - phi_j))`` with the
    bearings ``phi`` taken from the claimed location.  ``n_obs`` defaults to
    the number of stations.

    Raises:
        DegenerateScenarioError: every station lies on one line through the
            device, so the bearing pair-sum vanishes.
    """
    n = geometry.n_stations if n_obs is None else n_obs
    if int(n) != n or n < 1:
        raise InvalidParameterError("n_obs must be a positive integer")
    phi = geometry.bearings
    i, j = np.triu_indices(len(phi), k=1)
    pair_sum = float(np.sum(np.sin(phi[i] - phi[j]) ** 2))
    if pair_sum <= 1e-12:
        raise DegenerateScenarioError("stations are collinear with the device; position is unobservable")
    return geometry.c * math.sqrt(timing.variance * n) / math.sqrt(pair_sum)


def quantum_scaling_advantage(n_obs: float, n_photons: float) -> float:
    """Error-reduction factor ``sqrt(N) * sqrt(N_p)`` from quantum timing.

    Classical timing error scales as ``1/sqrt(N)`` and ``1/sqrt(N_p)``;
    entangled and squeezed probes turn these into ``1/N`` and ``1/N_p``.
    """
    if not (n_obs >= 1 and n_photons >= 1):
        raise InvalidParameterError("observation and photon counts must be >= 1")
    return math.sqrt(n_obs) * math.sqrt(n_photons)
