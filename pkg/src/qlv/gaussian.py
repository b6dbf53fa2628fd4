r"""Continuous-variable Gaussian states in the :math:`\hbar = 2` convention.

Quadratures are ordered ``(q1, p1, ..., qn, pn)`` throughout, so the vacuum
covariance matrix is the identity and the vacuum quadrature variance is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameterError, UnsupportedFormError

SYMMETRY_RTOL = 1e-12
IDENTITY_RTOL = 1e-9
PHYSICAL_ATOL = 1e-9

Q, P = "q", "p"


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the 2n x 2n symplectic form for interleaved quadratures."""
    omega = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(n_modes), omega)


def symplectic_eigenvalues(covariance: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, sorted ascending.

    Computed as the moduli of the eigenvalues of ``i * Omega @ M``; each
    value appears once.
    """
    cov = np.asarray(covariance, dtype=float)
    n = cov.shape[0] // 2
    eig = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    return np.sort(eig)[::2]


def _check_symmetric(matrix: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=SYMMETRY_RTOL * scale):
        raise InvalidParameterError("covariance matrix is not symmetric")


@dataclass(frozen=True)
class GaussianState:
    """First moments and covariance matrix of an n-mode Gaussian state.

    Args:
        first_moments: vector ``<R>`` of length ``2 * n_modes``.
        covariance: symmetric ``2n x 2n`` matrix
            ``M_ij = <R_i R_j + R_j R_i>/2 - <R_i><R_j>``.

    Raises:
        InvalidParameterError: on shape mismatch, asymmetry, or a covariance
            that violates the uncertainty principle.
    """

    first_moments: np.ndarray
    covariance: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self) -> None:
        moments = np.array(self.first_moments, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        if moments.size == 0 or moments.size % 2:
            raise InvalidParameterError("first moments must have even, nonzero length")
        if cov.shape != (moments.size, moments.size):
            raise InvalidParameterError(
                f"covariance shape {cov.shape} does not match {moments.size} quadratures"
            )
        if not (np.all(np.isfinite(moments)) and np.all(np.isfinite(cov))):
            raise InvalidParameterError("state contains non-finite entries")
        _check_symmetric(cov)
        cov = 0.5 * (cov + cov.T)
        if symplectic_eigenvalues(cov)[0] < 1.0 - PHYSICAL_ATOL:
            raise InvalidParameterError("covariance violates the uncertainty principle")
        moments.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "first_moments", moments)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "n_modes", moments.size // 2)


def vacuum(n_modes: int = 1) -> GaussianState:
    if n_modes < 1:
        raise InvalidParameterError("n_modes must be positive")
    return GaussianState(np.zeros(2 * n_modes), np.eye(2 * n_modes))


def coherent(q: float, p: float = 0.0) -> GaussianState:
    """Single-mode coherent state with quadrature means ``(q, p)``."""
    return GaussianState(np.array([q, p]), np.eye(2))


def thermal(variance: float, n_modes: int = 1) -> GaussianState:
    """Product of thermal modes with quadrature variance ``variance >= 1``."""
    return GaussianState(np.zeros(2 * n_modes), variance * np.eye(2 * n_modes))


def squeezed_vacuum(r: float) -> GaussianState:
    """Single-mode vacuum squeezed along q (variance ``e^{-2r}``)."""
    if not math.isfinite(r):
        raise InvalidParameterError("squeezing must be finite")
    return GaussianState(np.zeros(2), np.diag([math.exp(-2 * r), math.exp(2 * r)]))


def tmsv(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter ``r``.

    The covariance is ``[[v I, s Z], [s Z, v I]]`` with ``v = cosh(2r)``,
    ``s = sqrt(v**2 - 1)`` and ``Z = diag(1, -1)``.
    """
    if not math.isfinite(r):
        raise InvalidParameterError("squeezing must be finite")
    v = math.cosh(2 * r)
    # sinh(2|r|) == sqrt(v^2 - 1) without the cancellation near r = 0
    s = math.sinh(2 * abs(r))
    z = np.diag([1.0, -1.0])
    cov = np.block([[v * np.eye(2), s * z], [s * z, v * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


@dataclass(frozen=True)
class FockCoefficients:
    r: float
    coefficients: np.ndarray

    @property
    def norm(self) -> float:
        """Squared norm of the truncated expansion."""
        return math.fsum(self.coefficients**2)


def tmsv_fock_coefficients(r: float, n_max: int) -> FockCoefficients:
    """Coefficients ``c_n`` of ``|n>_a |n>_b`` in the TMSV expansion.

    ``c_n = sqrt(1 - lam**2) * (-lam)**n`` with ``lam = tanh(r)``.
    """
    if n_max < 0:
        raise InvalidParameterError("n_max must be non-negative")
    if not (math.isfinite(r) and r >= 0):
        raise InvalidParameterError("r must be finite and non-negative")
    lam = math.tanh(r)
    # 1 - tanh^2 = sech^2
    c0 = 1.0 / math.cosh(r)
    coeffs = c0 * np.power(-lam, np.arange(n_max + 1))
    coeffs.setflags(write=False)
    return FockCoefficients(r=r, coefficients=coeffs)


@dataclass(frozen=True)
class StandardFormBlocks:
    a_tilde: float
    b_tilde: float
    c_plus: float
    c_minus: float

    def matrix(self) -> np.ndarray:
        """Reconstruct the 4x4 standard-form covariance matrix."""
        a = self.a_tilde * np.eye(2)
        b = self.b_tilde * np.eye(2)
        c = np.diag([self.c_plus, self.c_minus])
        return np.block([[a, c], [c.T, b]])

    @property
    def det_a(self) -> float:
        return self.a_tilde**2

    @property
    def det_b(self) -> float:
        return self.b_tilde**2

    @property
    def det_c(self) -> float:
        return self.c_plus * self.c_minus


def standard_form_blocks(covariance) -> StandardFormBlocks:
    """Read off ``(a, b, c+, c-)`` from a two-mode covariance matrix.

    Only matrices whose off-diagonal block is already diagonal are accepted.
    When that block is nonzero the local blocks must also be proportional to
    the identity, otherwise the reconstructed matrix would not share the
    source matrix's determinant.

    Raises:
        InvalidParameterError: wrong shape or asymmetric input.
        UnsupportedFormError: the matrix is not in standard form.
    """
    cov = np.asarray(covariance, dtype=float)
    if cov.shape != (4, 4):
        raise InvalidParameterError("standard form needs a 4x4 covariance matrix")
    _check_symmetric(cov)
    a, b, c = cov[:2, :2], cov[2:, 2:], cov[:2, 2:]
    tol = IDENTITY_RTOL * max(1.0, float(np.max(np.abs(cov))))
    if abs(c[0, 1]) > tol or abs(c[1, 0]) > tol:
        raise UnsupportedFormError("off-diagonal block is not diagonal")
    if np.any(np.abs(np.diag(c)) > tol):
        for block in (a, b):
            if abs(block[0, 1]) > tol or abs(block[0, 0] - block[1, 1]) > tol:
                raise UnsupportedFormError(
                    "correlated modes need local blocks proportional to the identity"
                )
    det_a, det_b = np.linalg.det(a), np.linalg.det(b)
    if det_a <= 0 or det_b <= 0:
        raise DomainError("local blocks must have positive determinant")
    return StandardFormBlocks(
        a_tilde=math.sqrt(det_a),
        b_tilde=math.sqrt(det_b),
        c_plus=float(c[0, 0]),
        c_minus=float(c[1, 1]),
    )


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu_plus: float
    nu_minus: float
    partially_transposed: bool


def symplectic_spectrum(blocks: StandardFormBlocks, partial_transpose: bool) -> SymplecticSpectrum:
    """Two-mode symplectic spectrum from the standard-form invariants.

    ``nu_pm**2 = (Delta +- sqrt(Delta**2 - 4 det M)) / 2`` where
    ``Delta = det A + det B -+ 2 det C``; the minus sign gives the spectrum of
    the partially transposed matrix.

    Raises:
        DomainError: the invariants do not describe a positive matrix.
    """
    a, b = blocks.a_tilde, blocks.b_tilde
    cp, cm = blocks.c_plus, blocks.c_minus
    det_m = (a * b - cp * cp) * (a * b - cm * cm)
    sign = -1.0 if partial_transpose else 1.0
    delta = blocks.det_a + blocks.det_b + sign * 2.0 * blocks.det_c
    # Delta^2 - 4 det M expanded so that pure states do not cancel catastrophically
    disc = (
        (a * a - b * b) ** 2
        + 4.0 * a * b * (cp + sign * cm) ** 2
        + sign * 4.0 * (a - b) ** 2 * cp * cm
    )
    scale = max(1.0, delta * delta)
    positive = a > 0 and b > 0 and a * b > cp * cp and a * b > cm * cm
    if disc < -PHYSICAL_ATOL * scale or not positive or delta <= 0:
        raise DomainError("symplectic invariants are not physical")
    root = math.sqrt(max(disc, 0.0))
    nu_plus_sq = 0.5 * (delta + root)
    # product form avoids cancellation in (delta - root)
    nu_minus_sq = det_m / nu_plus_sq
    return SymplecticSpectrum(
        nu_plus=math.sqrt(nu_plus_sq),
        nu_minus=math.sqrt(nu_minus_sq),
        partially_transposed=partial_transpose,
    )


def is_entangled(state: GaussianState) -> bool:
    """PPT test: entangled iff the partially transposed ``nu_minus < 1``."""
    if state.n_modes != 2:
        raise InvalidParameterError("entanglement test needs exactly two modes")
    spectrum = symplectic_spectrum(standard_form_blocks(state.covariance), partial_transpose=True)
    return spectrum.nu_minus < 1.0 - PHYSICAL_ATOL


@dataclass(frozen=True)
class CloningChannelParams:
    """Optimal ``N_c -> M_c`` Gaussian cloner acting on coherent states."""

    n_input: int
    m_output: int
    sigma_0: float = 1.0

    def __post_init__(self) -> None:
        if int(self.n_input) != self.n_input or self.n_input < 1:
            raise InvalidParameterError("n_input must be a positive integer")
        if int(self.m_output) != self.m_output or self.m_output < 2:
            raise InvalidParameterError("m_output must be an integer >= 2")
        if self.m_output < self.n_input:
            raise InvalidParameterError("m_output must be >= n_input")
        if not (math.isfinite(self.sigma_0) and self.sigma_0 > 0):
            raise InvalidParameterError("sigma_0 must be positive")

    @property
    def sigma_cl(self) -> float:
        return clone_variance(self)


def clone_variance(params: CloningChannelParams) -> float:
    """Quadrature variance of each clone, ``sigma_0 + (2/N_c - 2/M_c) sigma_0``."""
    if params.m_output == params.n_input:
        return params.sigma_0
    excess = 2.0 / params.n_input - 2.0 / params.m_output
    return params.sigma_0 + excess * params.sigma_0


def cloned(state: GaussianState, params: CloningChannelParams) -> GaussianState:
    """Apply the cloner's excess noise to every quadrature of ``state``.

    The cloner is represented by its effect on measurement statistics: each
    quadrature variance grows by ``clone_variance(params) - sigma_0``.
    """
    excess = clone_variance(params) - params.sigma_0
    cov = state.covariance + excess * np.eye(2 * state.n_modes)
    return GaussianState(state.first_moments, cov)


def _quadrature_index(state: GaussianState, mode: int, which: str) -> int:
    if not 0 <= mode < state.n_modes:
        raise InvalidParameterError(f"mode {mode} out of range for {state.n_modes} modes")
    if which not in (Q, P):
        raise InvalidParameterError("which must be 'q' or 'p'")
    return 2 * mode + (which == P)


def sample_quadrature(state: GaussianState, mode: int, which: str, rng: np.random.Generator, size=None):
    """Homodyne outcome(s) of quadrature ``which`` on ``mode``.

    Returns a float when ``size`` is None, otherwise an array of draws.
    """
    idx = _quadrature_index(state, mode, which)
    mean = state.first_moments[idx]
    std = math.sqrt(state.covariance[idx, idx])
    draw = rng.normal(mean, std, size=size)
    return float(draw) if size is None else draw
