"""Jacobi-algebra observables and their Hamiltonian flows on the tangent bundle.

A Hamiltonian field of an observable ``f`` is

    d theta_j / ds    =  h^{ij} df/dthetadot_i
    d thetadot_j / ds = -h^{ij} df/dtheta_i

with ``h^{ij}`` the inverse Fisher metric; it satisfies ``omega(X, .) = df``
for the natural-coordinate 2-form, so ``f`` is conserved and omega preserved.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import finite_diff as fd
from .dombrowski import TangentState, as_state, kahler_natural
from .errors import DomainError, DomainExitError
from .manifold import THETA2_GUARD, inverse_metric

BASIS = ("F", "G", "H", "P", "Q", "R")


@dataclass(frozen=True)
class JacobiElement:
    lambda_F: float = 0.0
    lambda_G: float = 0.0
    lambda_H: float = 0.0
    lambda_P: float = 0.0
    lambda_Q: float = 0.0
    lambda_R: float = 0.0

    def __post_init__(self):
        for name in BASIS:
            v = float(getattr(self, f"lambda_{name}"))
            if not math.isfinite(v):
                raise ValueError(f"lambda_{name} must be finite")
            object.__setattr__(self, f"lambda_{name}", v)

    @classmethod
    def basis(cls, name: str) -> "JacobiElement":
        name = name.upper()
        if name not in BASIS:
            raise ValueError(f"unknown basis element {name!r}; expected one of {BASIS}")
        return cls(**{f"lambda_{name}": 1.0})

    @classmethod
    def parse(cls, text: str) -> "JacobiElement":
        """Parse ``"Q"`` or ``"P=1,Q=-0.5"``."""
        coeffs = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            name, _, val = part.partition("=")
            name = name.upper()
            if name not in BASIS:
                raise ValueError(f"unknown basis element {name!r} in {text!r}")
            coeffs[f"lambda_{name}"] = coeffs.get(f"lambda_{name}", 0.0) + (float(val) if val else 1.0)
        if not coeffs:
            raise ValueError(f"empty generator {text!r}")
        return cls(**coeffs)

    def coefficients(self) -> np.ndarray:
        return np.array([getattr(self, f"lambda_{n}") for n in BASIS])

    def __add__(self, other: "JacobiElement") -> "JacobiElement":
        return JacobiElement(*(self.coefficients() + other.coefficients()))

    def __mul__(self, a: float) -> "JacobiElement":
        return JacobiElement(*(a * self.coefficients()))

    __rmul__ = __mul__

    def label(self) -> str:
        return ",".join(f"{n}={c:g}" for n, c in zip(BASIS, self.coefficients()) if c != 0.0) or "0"


@dataclass(frozen=True)
class Observable:
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]

    def __call__(self, s) -> float:
        return self.value(_arr(s))


def _arr(s) -> np.ndarray:
    if isinstance(s, TangentState):
        return s.as_array()
    return np.asarray(s, dtype=float)


# psi on the basis: (value, gradient) over x = (theta1, theta2, thetadot1, thetadot2)
_PSI = {
    "F": (lambda x: 0.0, lambda x: np.zeros(4)),
    "P": (lambda x: x[1] + x[2], lambda x: np.array([0.0, 1.0, 1.0, 0.0])),
    "G": (
        lambda x: 0.5 * x[1] ** 2 + x[1] + x[2] + 0.5 * x[3] ** 2,
        lambda x: np.array([0.0, x[1] + 1.0, 1.0, x[3]]),
    ),
    "Q": (lambda x: x[1], lambda x: np.array([0.0, 1.0, 0.0, 0.0])),
    "H": (lambda x: x[0], lambda x: np.array([1.0, 0.0, 0.0, 0.0])),
    "R": (lambda x: -0.25, lambda x: np.zeros(4)),
}


def psi(L: JacobiElement) -> Observable:
    """Linear map from the Jacobi algebra to observables on the tangent bundle."""
    terms = [(c, _PSI[n]) for n, c in zip(BASIS, L.coefficients()) if c != 0.0]

    def value(x):
        return float(sum(c * v(x) for c, (v, _) in terms))

    def gradient(x):
        out = np.zeros(4)
        for c, (_, g) in terms:
            out = out + c * g(x)
        return out

    return Observable(value, gradient)


def _field_at(f: Observable, x: np.ndarray) -> np.ndarray:
    hinv = inverse_metric((x[0], x[1]))
    df = f.gradient(x)
    return np.concatenate([hinv @ df[2:], -(hinv @ df[:2])])


def hamiltonian_field(f: Observable, s) -> np.ndarray:
    return _field_at(f, as_state(s).as_array())


def closed_form_field(L: JacobiElement, s) -> np.ndarray:
    """Field of psi(L) assembled from hand-written per-generator expressions."""
    x = as_state(s).as_array()
    t1, t2, _, d2 = x
    fields = {
        "F": np.zeros(4),
        "P": np.array([2 * t1 ** 2 - 2 * t2, 2 * t1 * t2, -2 * t1 * t2, -2 * t2 ** 2]),
        "G": np.array(
            [
                2 * t1 ** 2 - 2 * t2 + 2 * t1 * t2 * d2,
                2 * t1 * t2 + 2 * t2 ** 2 * d2,
                -2 * t1 * t2 * (t2 + 1),
                -2 * t2 ** 2 * (t2 + 1),
            ]
        ),
        "H": np.array([0.0, 0.0, -2 * t1 ** 2 + 2 * t2, -2 * t1 * t2]),
        "R": np.zeros(4),
        "Q": np.array([0.0, 0.0, -2 * t1 * t2, -2 * t2 ** 2]),
    }
    return sum(c * fields[n] for n, c in zip(BASIS, L.coefficients()))


@dataclass(frozen=True)
class SpectralCurve:
    params: np.ndarray       # (n,)
    states: np.ndarray       # (n, 4)
    velocities: np.ndarray   # (n, 4), field value at each state
    generator: JacobiElement
    step: float

    def __len__(self) -> int:
        return self.params.size

    def state(self, k: int) -> TangentState:
        return TangentState.from_array(self.states[k])

    def observable_values(self) -> np.ndarray:
        f = psi(self.generator)
        return np.array([f.value(x) for x in self.states])


def _rk4(F, x0: np.ndarray, step: float, n: int) -> np.ndarray:
    xs = np.empty((n + 1, x0.size))
    xs[0] = x = x0
    for k in range(n):
        try:
            # overflow near a blow-up shows up as a non-finite state, checked below
            with np.errstate(over="ignore", invalid="ignore"):
                k1 = F(x)
                k2 = F(x + 0.5 * step * k1)
                k3 = F(x + 0.5 * step * k2)
                k4 = F(x + step * k3)
                x = x + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        except DomainError:
            x = np.full_like(x, np.nan)
        if not (np.all(np.isfinite(x)) and x[1] < THETA2_GUARD):
            raise DomainExitError(
                f"trajectory left the manifold after s = {k * step:.6g}", k * step
            )
        xs[k + 1] = x
    return xs


def _n_steps(s_end: float, step: float) -> int:
    if not step > 0:
        raise ValueError("step must be positive")
    if s_end < 0:
        raise ValueError("s_end must be non-negative")
    n = int(round(s_end / step))
    if not math.isclose(n * step, s_end, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"s_end = {s_end} is not a multiple of step = {step}")
    return n


def integrate_flow(gen: JacobiElement, start, s_end: float, step: float = 1e-3) -> SpectralCurve:
    """Classical RK4 integral curve of the Hamiltonian field of ``psi(gen)``."""
    x0 = as_state(start).as_array()
    n = _n_steps(s_end, step)
    f = psi(gen)

    def F(x):
        if not x[1] < THETA2_GUARD:
            raise DomainError("stage evaluation outside the manifold")
        return _field_at(f, x)

    states = _rk4(F, x0, step, n)
    params = step * np.arange(n + 1)
    velocities = np.array([_field_at(f, x) for x in states])
    return SpectralCurve(params, states, velocities, gen, step)


def conservation_report(c: SpectralCurve) -> float:
    """max_k |psi(gen)(state_k) - psi(gen)(state_0)|."""
    if len(c) == 0:
        raise ValueError("empty curve")
    v = c.observable_values()
    return float(np.abs(v - v[0]).max())


def flow_map(gen: JacobiElement, x0, s_end: float, step: float) -> np.ndarray:
    return integrate_flow(gen, x0, s_end, step).states[-1]


def symplecticity_residual(c: SpectralCurve, step: float = 1e-5) -> float:
    """|Phi^T omega(end) Phi - omega(start)|_max with Phi the finite-difference flow Jacobian.

    The flow is re-integrated from perturbed starts over the curve's full
    parameter range with the curve's own integration step.
    """
    if len(c) == 0:
        raise ValueError("empty curve")
    x0 = c.states[0]
    s_end = float(c.params[-1] - c.params[0])
    if s_end == 0.0:
        return 0.0
    Phi = fd.jacobian(lambda x: flow_map(c.generator, x, s_end, c.step), x0, step, order=4)
    om0 = kahler_natural(TangentState.from_array(x0)).omega
    om1 = kahler_natural(TangentState.from_array(c.states[-1])).omega
    return float(np.abs(Phi.T @ om1 @ Phi - om0).max())


CURVE_COLUMNS = (
    "s", "theta1", "theta2", "thetadot1", "thetadot2", "v1", "v2", "v3", "v4", "observable_value",
)


def write_curve_csv(c: SpectralCurve, path: str | Path) -> Path:
    path = Path(path)
    values = c.observable_values()
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for s, x, v, val in zip(c.params, c.states, c.velocities, values):
            w.writerow([repr(float(s)), *map(lambda a: repr(float(a)), x), *map(lambda a: repr(float(a)), v), repr(float(val))])
    return path


def read_curve_csv(path: str | Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise DomainError(f"{path} holds no samples")
    return {col: np.array([float(r[col]) for r in rows]) for col in CURVE_COLUMNS}
