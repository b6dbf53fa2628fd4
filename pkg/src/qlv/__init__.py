"""Quantum location verification toolkit for vehicular networks.

Gaussian continuous-variable states, binary verification tests against the
time-delay and optimal-cloning attacks, planar attack geometry and
positioning bounds, and seeded Monte Carlo sweeps over the observation
count.
"""

from .errors import (
    DegenerateScenarioError,
    DomainError,
    InvalidConfigError,
    InvalidParameterError,
    QLVError,
    UnsupportedFormError,
)
from .gaussian import (
    CloningChannelParams,
    GaussianState,
    clone_variance,
    is_entangled,
    sample_quadrature,
    standard_form_blocks,
    symplectic_spectrum,
    tmsv,
    tmsv_fock_coefficients,
)
from .geometry import (
    EveDeployment,
    EveStrategy,
    NetworkGeometry,
    PlanarPoint,
    TimingModel,
    crlb_position_std,
    delay_vector,
    honest_means,
    place_eve_devices,
    quantum_scaling_advantage,
)
from .hypothesis import (
    Decision,
    ErrorRates,
    MeanShiftScenario,
    Threshold,
    VarianceScenario,
    chi_square_cdf,
    cloning_rates,
    cloning_threshold,
    lambda_for_gamma,
    mean_shift_rates,
    mean_shift_threshold,
    total_error,
)
from .simulator import ScenarioConfig, SweepResult, ThresholdPolicy, run_clone_sweep, run_delay_sweep

__version__ = "0.1.0"
