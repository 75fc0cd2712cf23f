"""Almost-Hermitian triple (g, J, omega) on the tangent bundle of the lognormal family.

Matrices act on coordinate vectors ordered ``(x1, x2, thetadot1, thetadot2)``,
where ``(x1, x2)`` is either ``(theta1, theta2)`` (NATURAL) or
``(eta1, eta2)`` (MIXED). A 2-form is stored as the matrix
``omega[i, j] = omega(e_i, e_j)``, so the compatibility ``omega = g(J., .)``
reads ``omega = J^T g`` in matrix form.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import finite_diff as fd
from .errors import DomainError, StencilDomainError
from .manifold import (
    THETA2_GUARD,
    DualPoint,
    NaturalPoint,
    dual_coordinates,
    fisher_metric,
    inverse_metric,
    natural_from_dual,
)

_Z2 = np.zeros((2, 2))
_I2 = np.eye(2)
J_NATURAL = np.block([[_Z2, -_I2], [_I2, _Z2]])
OMEGA_CANONICAL = np.block([[_Z2, _I2], [-_I2, _Z2]])


class Coordinates(str, enum.Enum):
    NATURAL = "natural"
    MIXED = "mixed"


@dataclass(frozen=True)
class TangentState:
    theta: NaturalPoint
    thetadot: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        td = tuple(float(v) for v in self.thetadot)
        if len(td) != 2 or not all(math.isfinite(v) for v in td):
            raise DomainError(f"fiber coordinates must be two finite reals, got {self.thetadot}")
        object.__setattr__(self, "thetadot", td)

    @classmethod
    def from_array(cls, x) -> "TangentState":
        x = np.asarray(x, dtype=float).ravel()
        if x.size != 4:
            raise DomainError(f"a tangent state has 4 coordinates, got {x.size}")
        return cls(NaturalPoint(x[0], x[1]), (x[2], x[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.theta.theta1, self.theta.theta2, *self.thetadot])

    @property
    def z1(self) -> complex:
        return complex(self.theta.theta1, self.thetadot[0])

    @property
    def z2(self) -> complex:
        return complex(self.theta.theta2, self.thetadot[1])


def as_state(s) -> TangentState:
    return s if isinstance(s, TangentState) else TangentState.from_array(s)


@dataclass(frozen=True)
class KahlerStructure:
    g: np.ndarray
    J: np.ndarray
    omega: np.ndarray
    coordinate_tag: Coordinates


@dataclass
class VerificationReport:
    residuals: dict[str, float]
    det_omega: float
    min_eig_g: float
    tol: float
    passed: bool
    # Diagnostics not used for the verdict.
    info: dict[str, float] = field(default_factory=dict)


def kahler_natural(s: TangentState) -> KahlerStructure:
    s = as_state(s)
    h = fisher_metric(s.theta)
    g = np.block([[h, _Z2], [_Z2, h]])
    omega = np.block([[_Z2, h], [-h, _Z2]])
    return KahlerStructure(g, J_NATURAL.copy(), omega, Coordinates.NATURAL)


def kahler_mixed(s: TangentState) -> KahlerStructure:
    """Triple in ``(eta1, eta2, thetadot1, thetadot2)``; J's upper-right block is ``-h``."""
    s = as_state(s)
    h = fisher_metric(s.theta)
    hinv = inverse_metric(s.theta)
    g = np.block([[hinv, _Z2], [_Z2, h]])
    J = np.block([[_Z2, -h], [hinv, _Z2]])
    return KahlerStructure(g, J, OMEGA_CANONICAL.copy(), Coordinates.MIXED)


def kahler(s: TangentState, coordinates: Coordinates | str = Coordinates.NATURAL) -> KahlerStructure:
    coordinates = Coordinates(coordinates)
    return kahler_natural(s) if coordinates is Coordinates.NATURAL else kahler_mixed(s)


def verify_structure(K: KahlerStructure, tol: float = 1e-10) -> VerificationReport:
    g, J, om = K.g, K.J, K.omega
    eye = np.eye(g.shape[0])
    residuals = {
        "J_squared_plus_I": float(np.abs(J @ J + eye).max()),
        "JtgJ_minus_g": float(np.abs(J.T @ g @ J - g).max()),
        "omega_minus_g_of_J": float(np.abs(om - J.T @ g).max()),
        "omega_plus_omegaT": float(np.abs(om + om.T).max()),
        "g_minus_gT": float(np.abs(g - g.T).max()),
    }
    det_omega = float(np.linalg.det(om))
    min_eig = float(np.linalg.eigvalsh(0.5 * (g + g.T)).min())
    passed = all(r <= tol for r in residuals.values()) and det_omega != 0.0 and min_eig > 0
    info = {"omega_minus_gJ_product": float(np.abs(om - g @ J).max())}
    return VerificationReport(residuals, det_omega, min_eig, tol, bool(passed), info)


# --- closedness of omega -----------------------------------------------------


def _omega_field(coordinates: Coordinates):
    """omega as a function of the chart coordinates of the given system."""
    if coordinates is Coordinates.NATURAL:
        return lambda x: kahler_natural(TangentState.from_array(x)).omega

    def omega_mixed(x):
        theta = natural_from_dual(DualPoint(x[0], x[1]))
        return kahler_mixed(TangentState(theta, (x[2], x[3]))).omega

    return omega_mixed


def _chart_point(s: TangentState, coordinates: Coordinates) -> np.ndarray:
    if coordinates is Coordinates.NATURAL:
        return s.as_array()
    eta = dual_coordinates(s.theta)
    return np.array([eta.eta1, eta.eta2, *s.thetadot])


def _stencil_ok(x: np.ndarray, coordinates: Coordinates, h: np.ndarray, reach: int) -> bool:
    lo, hi = x - reach * h, x + reach * h
    if coordinates is Coordinates.NATURAL:
        return hi[1] < THETA2_GUARD
    # eta2 - eta1^2 > 0 over the whole box
    worst = lo[1] - max(lo[0] ** 2, hi[0] ** 2)
    return worst > 0


def fit_stencil_step(x, coordinates, step: float, reach: int) -> float:
    """Return ``step`` or a once-shrunk step so the stencil stays on the manifold."""
    x = np.asarray(x, dtype=float)
    for candidate in (step, step / 10.0):
        if _stencil_ok(x, coordinates, fd.scaled_steps(x, candidate), reach):
            return candidate
    raise StencilDomainError(
        f"finite-difference stencil (step {step}) leaves the manifold at {x.tolist()}"
    )


def closedness_residual(
    s: TangentState,
    step: float = 1e-4,
    coordinates: Coordinates | str = Coordinates.NATURAL,
    order: int = 4,
) -> float:
    """max over i<j<k of |d_k w_ij + d_i w_jk + d_j w_ki| by central differences."""
    s = as_state(s)
    coordinates = Coordinates(coordinates)
    if not step > 0:
        raise ValueError("step must be positive")
    x = _chart_point(s, coordinates)
    step = fit_stencil_step(x, coordinates, step, reach=order // 2)
    om = _omega_field(coordinates)
    # dom[k] = d omega / d x_k
    dom = [fd.partial(om, x, k, step, order) for k in range(4)]
    worst = 0.0
    for i, j, k in itertools.combinations(range(4), 3):
        cyc = dom[k][i, j] + dom[i][j, k] + dom[j][k, i]
        worst = max(worst, abs(float(cyc)))
    return worst


# --- Siegel-Jacobi identification -------------------------------------------


class SiegelConvention(str, enum.Enum):
    # (z1, z2) -> (-i z2, i z1)
    ROTATED = "rotated"
    # (z1, z2) -> (-i z2, z1)
    PLAIN = "plain"


@dataclass(frozen=True)
class ComplexCoordinates:
    z1: complex
    z2: complex
    w1: complex
    w2: complex


def to_siegel_jacobi(
    s: TangentState, convention: SiegelConvention | str = SiegelConvention.ROTATED
) -> ComplexCoordinates:
    s = as_state(s)
    convention = SiegelConvention(convention)
    z1, z2 = s.z1, s.z2
    w1 = -1j * z2
    w2 = 1j * z1 if convention is SiegelConvention.ROTATED else z1
    if not w1.imag > 0:
        raise DomainError("image is not in the upper half-plane")
    return ComplexCoordinates(z1, z2, w1, w2)


def pullback_to_mixed(s: TangentState) -> KahlerStructure:
    """Transport the natural triple into mixed coordinates via ``d theta = h^-1 d eta``."""
    s = as_state(s)
    K = kahler_natural(s)
    A = np.block([[inverse_metric(s.theta), _Z2], [_Z2, _I2]])
    Ainv = np.linalg.inv(A)
    return KahlerStructure(A.T @ K.g @ A, Ainv @ K.J @ A, A.T @ K.omega @ A, Coordinates.MIXED)


def dual_jacobian_fd(p: NaturalPoint, step: float = 1e-5) -> np.ndarray:
    """Finite-difference Jacobian d eta / d theta (should equal the Fisher metric)."""

    def eta(t):
        return dual_coordinates(NaturalPoint(t[0], t[1])).as_array()

    return fd.jacobian(eta, p.as_array(), step, order=4)
