"""Exponential wavefunction, quantization operators and Schrödinger-type residuals.

Functions of ``x > 0`` are sampled on a uniform grid in ``u = log x``. The
wavefunction attached to a tangent state is

    Psi(u) = exp{ (c(u) - i z2 u + i z1 u^2 - Phi(theta)) / 2 },  c(u) = -u - i u,

with ``z1 = theta1 + i thetadot1``, ``z2 = theta2 + i thetadot2`` and ``Phi``
the log-partition function. Evolution is along the real parameter ``s`` of a
:class:`~lognormal_kahler.jacobi.SpectralCurve`.

Generator coefficients map onto the Hamiltonian-density slots as
``lambda1..lambda5 = (F, G, H, P, R)``; the Q coefficient plays the part of
``xi`` (``gamma`` when xi is held constant).
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import finite_diff as fd
from .dombrowski import TangentState, as_state
from .errors import GridError, PoleError, WavefunctionOverflowError
from .jacobi import BASIS, JacobiElement, SpectralCurve
from .manifold import NaturalPoint, dual_coordinates, potential

MAX_REAL_EXPONENT = 700.0
POLE_GUARD = 1e-9


@dataclass(frozen=True)
class LogGrid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 8:
            raise GridError(f"a log-grid needs at least 8 points, got {pts.size}")
        d = np.diff(pts)
        if not np.all(d > 0):
            raise GridError("grid points must be strictly increasing")
        if np.abs(d - d.mean()).max() > 1e-12 * max(1.0, abs(d.mean())):
            raise GridError("grid must be uniform")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, lo: float = -4.0, hi: float = 4.0, n: int = 257) -> "LogGrid":
        return cls(np.linspace(lo, hi, n))

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])

    def __len__(self) -> int:
        return self.points.size


@dataclass(frozen=True)
class WaveSamples:
    grid: LogGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.points.shape:
            raise GridError("values do not match the grid")
        if not np.all(np.isfinite(vals)):
            raise WavefunctionOverflowError("non-finite wave samples")
        object.__setattr__(self, "values", vals)


class ThetaRate(str, enum.Enum):
    CURVE = "curve"   # d theta / ds taken from the curve's velocities
    FIBER = "fiber"   # d theta / ds replaced by the fiber coordinates thetadot


@dataclass(frozen=True)
class ConventionFlags:
    sign_z2_term: int = 1
    include_potential_drift: bool = True
    psi_prefactor_half: bool = True
    theta_rate: ThetaRate = ThetaRate.CURVE

    def __post_init__(self):
        if self.sign_z2_term not in (1, -1):
            raise ValueError("sign_z2_term must be +1 or -1")
        object.__setattr__(self, "theta_rate", ThetaRate(self.theta_rate))

    def as_dict(self) -> dict:
        d = asdict(self)
        d["theta_rate"] = self.theta_rate.value
        return d


CALIBRATED = ConventionFlags()
LITERAL = ConventionFlags(
    sign_z2_term=-1, include_potential_drift=False, psi_prefactor_half=True, theta_rate=ThetaRate.FIBER
)


class XiSource(str, enum.Enum):
    GAMMA = "gamma"       # xi held at the constant gamma
    FORMULA = "formula"   # xi evaluated pointwise from the closed-form coefficient


class XiVariant(str, enum.Enum):
    PRIMARY = "primary"
    ALTERNATE = "alternate"   # differs in several numerator terms


@dataclass(frozen=True)
class SchrodingerParams:
    lambdas: tuple[float, float, float, float, float] = (0.0,) * 5
    betas: tuple[float, float, float, float, float, float] = (0.0,) * 6
    gamma: float = 0.0
    flags: ConventionFlags = CALIBRATED
    xi_source: XiSource = XiSource.GAMMA
    xi_variant: XiVariant = XiVariant.PRIMARY

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        bet = tuple(float(v) for v in self.betas)
        if len(lam) != 5 or len(bet) != 6:
            raise ValueError("need 5 lambdas and 6 betas")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "betas", bet)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "xi_source", XiSource(self.xi_source))
        object.__setattr__(self, "xi_variant", XiVariant(self.xi_variant))

    @classmethod
    def for_generator(cls, gen: JacobiElement, **kw) -> "SchrodingerParams":
        c = dict(zip(BASIS, gen.coefficients()))
        lambdas = (c["F"], c["G"], c["H"], c["P"], c["R"])
        return cls(lambdas=lambdas, gamma=c["Q"], **kw)

    def as_dict(self) -> dict:
        return {
            "lambdas": list(self.lambdas),
            "betas": list(self.betas),
            "gamma": self.gamma,
            "flags": self.flags.as_dict(),
            "xi_source": self.xi_source.value,
            "xi_variant": self.xi_variant.value,
        }


# --- wavefunction --------------------------------------------------------------


def psi_values(x: np.ndarray, u) -> np.ndarray:
    """Wavefunction of state array ``x`` at log-points ``u`` (no grid checks)."""
    t1, t2, d1, d2 = x
    u = np.asarray(u, dtype=float)
    z1, z2 = complex(t1, d1), complex(t2, d2)
    c = -u - 1j * u
    expo = 0.5 * (c - 1j * z2 * u + 1j * z1 * u * u - potential(NaturalPoint(t1, t2)))
    if np.any(expo.real > MAX_REAL_EXPONENT):
        raise WavefunctionOverflowError(
            f"wavefunction exponent reaches {float(np.max(expo.real)):.1f}"
        )
    return np.exp(expo)


def wavefunction(s: TangentState, grid: LogGrid) -> WaveSamples:
    return WaveSamples(grid, psi_values(as_state(s).as_array(), grid.points))


# --- quantization operators ---------------------------------------------------


def _derivative(v: np.ndarray, spacing: float, deriv: int) -> np.ndarray:
    """4th-order differences: centred inside, one-sided on the two boundary pairs."""
    n = v.size
    if n < 8:
        raise GridError(f"derivative operators need at least 8 grid points, got {n}")
    out = np.empty_like(v)
    centre = fd.stencil_weights((-2, -1, 0, 1, 2), deriv)
    acc = np.zeros(n - 4, dtype=v.dtype)
    for o, w in zip(range(-2, 3), centre):
        acc = acc + w * v[2 + o : n - 2 + o]
    out[2:-2] = acc
    # deriv 1 needs 5 points for 4th order, deriv 2 needs 6
    width = 4 + deriv
    for i in (0, 1):
        w = fd.stencil_weights(tuple(range(-i, width - i)), deriv)
        out[i] = w @ v[:width]
        w = fd.stencil_weights(tuple(range(i - width + 1, i + 1)), deriv)
        out[n - 1 - i] = w @ v[n - width :]
    return out / spacing ** deriv


def apply_quantization(L: JacobiElement, w: WaveSamples) -> WaveSamples:
    u = w.grid.points
    v = w.values
    h = w.grid.spacing
    out = np.zeros_like(v)
    c = dict(zip(BASIS, L.coefficients()))
    if c["F"]:
        out += c["F"] * (-(u ** 2) * v)
    if c["Q"]:
        out += c["Q"] * (u * v)
    if c["R"]:
        out += c["R"] * (-0.25 * v)
    if c["P"] or c["H"]:
        dv = _derivative(v, h, 1)
        if c["P"]:
            out += c["P"] * (-1j * dv)
        if c["H"]:
            out += c["H"] * (2j * (u * dv + 0.5 * v))
    if c["G"]:
        out += c["G"] * (-_derivative(v, h, 2))
    return WaveSamples(w.grid, out)


def _action_symbols(x: np.ndarray, u: np.ndarray) -> dict[str, np.ndarray]:
    """Closed-form multipliers m_L(u) with Q(L) Psi = m_L Psi."""
    z1, z2 = complex(x[0], x[2]), complex(x[1], x[3])
    return {
        "F": -(u ** 2) + 0j,
        "P": -z2 + 2 * z1 * u,
        "G": -(2j * z1 + (-1j * z2 + 2j * z1 * u) ** 2),
        "Q": u + 0j,
        "H": 2 * u * z2 - 4 * z1 * u ** 2 + 1j,
        "R": np.full(u.shape, -0.25 + 0j),
    }


def closed_form_action(L: JacobiElement, s: TangentState, grid: LogGrid) -> WaveSamples:
    x = as_state(s).as_array()
    u = grid.points
    sym = _action_symbols(x, u)
    mult = sum(c * sym[n] for n, c in zip(BASIS, L.coefficients()))
    return WaveSamples(grid, mult * psi_values(x, u))


def operator_discrepancy(L: JacobiElement, s: TangentState, grid: LogGrid) -> float:
    """max over interior grid points of |Q(L) Psi - closed-form action|."""
    w = wavefunction(s, grid)
    diff = apply_quantization(L, w).values - closed_form_action(L, s, grid).values
    return float(np.abs(diff[2:-2]).max())


# --- xi coefficient and Hamiltonian density ------------------------------------


def _xi_primary(x, acc, u, p: SchrodingerParams, psi_u: complex) -> complex:
    t1, t2, d1, d2 = x
    a1, a2 = acc
    l1, l2, l3, l4, l5 = p.lambdas
    b1, b2, b3, b4, b5, b6 = p.betas
    I = 1j
    num = (
        -4 * I * a1 * u ** 2 - 4 * I * u * a2 + 4 * l1 * u ** 2 + 8 * I * l2 * d1 * t2 + l5 - 4 * I * l3
        + 16 * l3 * t1 * u ** 2 - 8 * l4 * t1 * u + 8 * l2 * t1 * t2 + 8 * I * l2 * t1
        + 4 * I * l4 * d2 - 8 * l2 * d2 * d1
        + 2 * l2 * d2 ** 2 + 8 * l2 * d1 + 4 * l4 * t2 - 8 * l2 * d1 - 2 * l2 * t2 ** 2
        - 8 * l2 * t1 ** 2 - 4 * d1 * u ** 2 - 4 * d2 * u
        - 8 * l3 * (t2 + I * d2) * u + 8 * l2 * t1 * d2 - 16 * I * l2 * t1 * d1
        + 16 * I * l3 * d1 * u ** 2 - 8 * I * l4 * d2 - 4 * I * l2 * t2 * d2
    )
    beta_block = -4 * l1 * b1 - 4 * l2 * b2 - 4 * l2 * b2 - 4 * l3 * b3 - 4 * l4 * b4 - 4 * l5 * b6
    den = 4 * (b5 + u)
    if abs(b5 + u) < POLE_GUARD:
        raise PoleError(f"xi has a pole at u = {u} (beta5 = {b5})")
    return num / den + beta_block / (den * psi_u)


def _xi_alternate(x, acc, u, p: SchrodingerParams, psi_u: complex) -> complex:
    t1, t2, d1, d2 = x
    l1, l2, l3, l4, l5 = p.lambdas
    b1, b2, b3, b4, b5, b6 = p.betas
    I = 1j
    num = (
        l5 - 4 * I * l2 * t2 * d2 - 4 * I * l3 + 8 * t2 * u - 8 * t1 * u ** 2 - 8 * l2 * d2
        - 2 * l2 * t2 ** 2 - 8 * l2 * t1 ** 2 - 8 * l3 * (t2 + I * d2) + 8 * l2 * d1 ** 2
        + 2 * l2 * d2 ** 2 + 4 * l4 * t2
        + 4 * l1 * u ** 2 - 8 * l2 * d1 * d2 + 8 * l2 * t2 * t1 + 4 * I * l4 * d2
        - 8 * I * l3 * d1 * u ** 2
        + 8 * I * d2 * u + 8 * I * l2 * t1 - 8 * l4 * t1 * u + 16 * l3 * t1 * u ** 2
        + 8 * I * l2 * t2 * d1 + 8 * I * l2 * t1 * d1 - 16 * I * l2 * t1 * d1
        + 16 * I * l3 * d1 * u ** 2
    )
    beta_block = -4 * l4 * b4 - 4 * l5 * b6 - 4 * l3 * b3 - 4 * l2 * b2
    den = 4 * (b5 + u * psi_u)
    if abs(b5 + u * psi_u) < POLE_GUARD:
        raise PoleError(f"xi has a pole at u = {u} (beta5 = {b5})")
    return num * psi_u / den + beta_block / den


def xi_coefficient(c: SpectralCurve, k: int, u: float, p: SchrodingerParams) -> complex:
    """Closed-form xi at sample ``k``; thetadot's s-derivative comes from the curve."""
    if not -len(c) <= k < len(c):
        raise IndexError(f"sample {k} outside curve of length {len(c)}")
    x = c.states[k]
    acc = c.velocities[k, 2:4]
    psi_u = complex(psi_values(x, np.array([u]))[0])
    fn = _xi_primary if p.xi_variant is XiVariant.PRIMARY else _xi_alternate
    return complex(fn(x, acc, float(u), p, psi_u))


def hamiltonian_density(s: TangentState, u, p: SchrodingerParams, xi_value) -> np.ndarray | complex:
    x = as_state(s).as_array()
    z1, z2 = complex(x[0], x[2]), complex(x[1], x[3])
    u_arr = np.asarray(u, dtype=float)
    l1, l2, l3, l4, l5 = p.lambdas
    out = (
        -l1 * u_arr ** 2
        - l2 * (2j * z1 + (-1j * z2 + 2j * z1 * u_arr) ** 2)
        + l3 * (2 * u_arr * z2 - 4 * z1 * u_arr ** 2 + 1j)
        + l4 * (-z2 + 2 * z1 * u_arr)
        + np.asarray(xi_value) * u_arr
        - 0.25 * l5
    )
    return complex(out) if np.ndim(out) == 0 else out


# --- residuals ----------------------------------------------------------------


@dataclass
class ResidualField:
    s: np.ndarray                 # (m,)
    u: np.ndarray                 # (n,)
    eq23: np.ndarray              # (m, n) |i dPsi/ds - chain-rule form|
    eq21: np.ndarray              # (m, n) |i dPsi/ds - (H Psi + K terms) / 2|
    hamiltonian: np.ndarray       # (m, n) complex
    params: SchrodingerParams
    fd_order: int = 6
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "max_abs_residual_eq23": float(self.eq23.max()),
            "mean_abs_residual_eq23": float(self.eq23.mean()),
            "max_abs_residual_eq21": float(self.eq21.max()),
            "mean_abs_residual_eq21": float(self.eq21.mean()),
            "samples": int(self.s.size),
            "grid_points": int(self.u.size),
            "fd_order": self.fd_order,
            "params": self.params.as_dict(),
        }


def _psi_along(c: SpectralCurve, u: np.ndarray) -> np.ndarray:
    return np.array([psi_values(x, u) for x in c.states])


def eq23_rhs(c: SpectralCurve, k: int, u: np.ndarray, psi_k: np.ndarray, flags: ConventionFlags) -> np.ndarray:
    x, v = c.states[k], c.velocities[k]
    rate = v[:2] if flags.theta_rate is ThetaRate.CURVE else x[2:4]
    acc = v[2:4]
    bracket = -(u ** 2) * (rate[0] + 1j * acc[0]) + flags.sign_z2_term * u * (rate[1] + 1j * acc[1])
    if flags.include_potential_drift:
        eta = dual_coordinates(NaturalPoint(x[0], x[1])).as_array()
        bracket = bracket - 1j * float(eta @ v[:2])
    pref = 0.5 if flags.psi_prefactor_half else 1.0
    return pref * bracket * psi_k


def schrodinger_residual(
    c: SpectralCurve, grid: LogGrid, p: SchrodingerParams, fd_order: int = 6
) -> ResidualField:
    """Residual fields of both evolution equations along ``c``.

    The left side ``i dPsi/ds`` is a centred finite difference along the curve
    (the widest stencil up to ``fd_order`` that fits), so residuals are only
    reported on interior samples.
    """
    if len(c) < 3:
        raise ValueError("curve needs at least 3 samples")
    u = grid.points
    psis = _psi_along(c, u)
    dpsi, m = fd.derivative_along(psis, c.step, fd_order)
    lhs = 1j * dpsi
    ks = range(m, len(c) - m)
    eq23 = np.empty(lhs.shape)
    eq21 = np.empty(lhs.shape)
    ham = np.empty(lhs.shape, dtype=complex)
    l1, l2, l3, l4, l5 = p.lambdas
    b1, b2, b3, b4, b5, b6 = p.betas
    for row, k in enumerate(ks):
        psi_k = psis[k]
        eq23[row] = np.abs(lhs[row] - eq23_rhs(c, k, u, psi_k, p.flags))
        if p.xi_source is XiSource.GAMMA:
            xi = np.full(u.shape, p.gamma, dtype=complex)
        else:
            xi = np.array([xi_coefficient(c, k, ui, p) for ui in u])
        state = c.state(k)
        ham[row] = hamiltonian_density(state, u, p, xi)
        k_terms = l1 * b1 + l2 * b2 + l3 * b3 + l4 * b4 + xi * b5 + l5 * b6
        eq21[row] = np.abs(lhs[row] - 0.5 * ham[row] * psi_k - 0.5 * k_terms)
    return ResidualField(c.params[m : len(c) - m], u, eq23, eq21, ham, p, min(fd_order, 2 * m))


def calibrate_flags(curves: Sequence[SpectralCurve], grid: LogGrid) -> ConventionFlags:
    """Pick the sign and prefactor that minimise the worst chain-rule residual.

    The potential drift and curve-based theta rates stay switched on.
    """
    best, best_val = None, math.inf
    for sign in (1, -1):
        for half in (True, False):
            flags = ConventionFlags(sign, True, half, ThetaRate.CURVE)
            p = SchrodingerParams(flags=flags)
            worst = max(float(schrodinger_residual(c, grid, p).eq23.max()) for c in curves)
            if worst < best_val:
                best, best_val = flags, worst
    return best


def chain_rule_derivative(c: SpectralCurve, k: int, u: np.ndarray) -> np.ndarray:
    """Analytic dPsi/ds at sample ``k`` from the exponent's dependence on the state."""
    x, v = c.states[k], c.velocities[k]
    dz1 = complex(v[0], v[2])
    dz2 = complex(v[1], v[3])
    eta = dual_coordinates(NaturalPoint(x[0], x[1])).as_array()
    dphi = float(eta @ v[:2])
    return 0.5 * (-1j * dz2 * u + 1j * dz1 * u ** 2 - dphi) * psi_values(x, u)


def energy_spread(c: SpectralCurve, u: float = 1.0, p: SchrodingerParams | None = None) -> float:
    """Largest excursion of the Hamiltonian density along ``c`` at a fixed ``u``."""
    p = p or SchrodingerParams.for_generator(c.generator)
    vals = np.array([hamiltonian_density(c.state(k), u, p, p.gamma) for k in range(len(c))])
    return float(max(np.ptp(vals.real), np.ptp(vals.imag)))


RESIDUAL_COLUMNS = ("s", "u", "abs_residual_eq23", "abs_residual_eq21", "hamiltonian_re", "hamiltonian_im")


def write_residual_csv(r: ResidualField, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESIDUAL_COLUMNS)
        for i, s in enumerate(r.s):
            for j, u in enumerate(r.u):
                h = r.hamiltonian[i, j]
                w.writerow([repr(float(s)), repr(float(u)), repr(float(r.eq23[i, j])),
                            repr(float(r.eq21[i, j])), repr(float(h.real)), repr(float(h.imag))])
    return path


def write_residual_summary(r: ResidualField, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(r.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
