"""Kähler-function PDE residuals, the quadratic solution family, and checks on bundle maps.

Functions on the tangent bundle take a length-4 array
``(theta1, theta2, thetadot1, thetadot2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import finite_diff as fd
from .dombrowski import (
    J_NATURAL,
    Coordinates,
    TangentState,
    as_state,
    fit_stencil_step,
    kahler_natural,
)
from .errors import DomainError

# coordinate indices
T1, T2, D1, D2 = 0, 1, 2, 3


@dataclass(frozen=True)
class KahlerCandidate:
    """Member of the quadratic family of Kähler functions.

    ``alpha9`` multiplies a lone ``theta2^2 / 2`` term with no fiber partner;
    it is kept only to demonstrate that such a term breaks the PDE system.
    """

    alpha: tuple[float, float, float, float, float, float]
    alpha9: float = 0.0

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        if len(a) != 6:
            raise ValueError(f"expected 6 coefficients, got {len(a)}")
        object.__setattr__(self, "alpha", a)

    def __call__(self, x) -> float:
        a1, a2, a3, a4, a5, a6 = self.alpha
        t1, t2, d1, d2 = x
        return (
            0.5 * a1 * t1 * t1
            + 0.5 * (2 * a2 * t2 - 2 * a4 * d2 + 2 * a5) * t1
            + 0.5 * self.alpha9 * t2 * t2
            + 0.5 * (2 * d1 * a4 + 2 * a6) * t2
            + 0.5 * a1 * d1 * d1
            + 0.5 * (2 * a3 + 2 * a2 * d2) * d1
        )


def family_member(alpha: Sequence[float]) -> KahlerCandidate:
    return KahlerCandidate(tuple(alpha), alpha9=0.0)


def _hessian(f, x, step: float) -> np.ndarray:
    H = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            H[i, j] = H[j, i] = fd.second_partial(f, x, i, j, step)
    return H


def _checked_point(s, step: float) -> tuple[np.ndarray, float]:
    x = as_state(s).as_array()
    # second_partial uses absolute steps; scaled_steps >= step, so this is conservative
    step = fit_stencil_step(x, Coordinates.NATURAL, step, reach=1)
    return x, step


def kahler_pde_residual(f: Callable, s: TangentState, step: float = 1e-3) -> np.ndarray:
    """The eight left-hand sides of the flat (Christoffel-free) Kähler system.

    Order: f_11 - f_d1d1, f_12 - f_d1d2, f_21 - f_d2d1, f_22 - f_d2d2,
    2 f_1d1, f_1d2 + f_2d1, f_2d1 + f_1d2, 2 f_2d2.
    """
    x, step = _checked_point(s, step)
    H = _hessian(f, x, step)
    return np.array(
        [
            H[T1, T1] - H[D1, D1],
            H[T1, T2] - H[D1, D2],
            H[T2, T1] - H[D2, D1],
            H[T2, T2] - H[D2, D2],
            H[T1, D1] + H[T1, D1],
            H[T1, D2] + H[T2, D1],
            H[T2, D1] + H[T1, D2],
            H[T2, D2] + H[T2, D2],
        ]
    )


def antisymmetric_mixed_residual(f: Callable, s: TangentState, step: float = 1e-3) -> np.ndarray:
    """``f_{theta_i thetadot_j} - f_{theta_j thetadot_i}`` for (i, j) in 11, 12, 21, 22.

    The diagonal entries vanish for any smooth f; the off-diagonal ones do not
    (for family members they equal -2 alpha4 and +2 alpha4).
    """
    x, step = _checked_point(s, step)
    H = _hessian(f, x, step)
    base, fiber = (T1, T2), (D1, D2)
    return np.array(
        [H[base[i], fiber[j]] - H[base[j], fiber[i]] for i in range(2) for j in range(2)]
    )


# --- bundle maps -------------------------------------------------------------


@dataclass(frozen=True)
class BundleMap:
    func: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "map"

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x, step: float = 1e-5) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        return fd.jacobian(self, x, step, order=4)


def translation(k: Sequence[float]) -> BundleMap:
    k = np.asarray(k, dtype=float)
    return BundleMap(lambda x: x + k, lambda x: np.eye(4), name=f"translation{tuple(k.tolist())}")


def identity_map() -> BundleMap:
    return BundleMap(lambda x: x.copy(), lambda x: np.eye(4), name="identity")


def swap_map() -> BundleMap:
    """(theta1, theta2, thetadot1, thetadot2) -> (thetadot1, theta2, theta1, thetadot2)."""
    return BundleMap(lambda x: x[[2, 1, 0, 3]], name="swap")


def holomorphy_residual(m: BundleMap, s: TangentState, step: float = 1e-5) -> float:
    """Largest modulus of d/d(conj z_k) applied to phi1 + i phi3 and phi2 + i phi4.

    Uses the Wirtinger operator ``(d/dtheta_k + i d/dthetadot_k) / 2``.
    """
    x = as_state(s).as_array()
    if m.jacobian is None:
        step = fit_stencil_step(x, Coordinates.NATURAL, step, reach=2)
    D = m.derivative(x, step)
    w1 = D[0] + 1j * D[2]
    w2 = D[1] + 1j * D[3]
    worst = 0.0
    for w in (w1, w2):
        for k in range(2):
            worst = max(worst, abs(0.5 * (w[k] + 1j * w[k + 2])))
    return float(worst)


def isometry_residual(m: BundleMap, s: TangentState, step: float = 1e-5) -> float:
    """max(|D^T g(phi(s)) D - g(s)|, |D J - J D|) with g, J the natural-coordinate triple."""
    s = as_state(s)
    x = s.as_array()
    y = m(x)
    if not y[1] < 0:
        raise DomainError(f"image point has theta2 = {y[1]} >= 0")
    if m.jacobian is None:
        step = fit_stencil_step(x, Coordinates.NATURAL, step, reach=2)
    D = m.derivative(x, step)
    g_src = kahler_natural(s).g
    g_img = kahler_natural(TangentState.from_array(y)).g
    metric = np.abs(D.T @ g_img @ D - g_src).max()
    complex_ = np.abs(D @ J_NATURAL - J_NATURAL @ D).max()
    return float(max(metric, complex_))


@dataclass
class TranslationRow:
    k: tuple[float, float, float, float]
    holomorphy: float
    isometry: float
    holomorphy_pass: bool
    isometry_pass: bool
    states_checked: int
    states_skipped: int
    note: str = ""


@dataclass
class Pro400Report:
    tol: float
    rows: list[TranslationRow] = field(default_factory=list)

    @property
    def discrepancies(self) -> list[TranslationRow]:
        return [r for r in self.rows if not (r.holomorphy_pass and r.isometry_pass)]


def reproduce_pro400(
    states: Sequence[TangentState], ks: Sequence[Sequence[float]], tol: float = 1e-8
) -> Pro400Report:
    """Tabulate holomorphy and isometry residuals of every translation in ``ks``.

    States whose translated image leaves the manifold are skipped and counted.
    """
    if not states or not ks:
        raise ValueError("state grid and k grid must be nonempty")
    report = Pro400Report(tol)
    for k in ks:
        m = translation(k)
        holo, iso, skipped = 0.0, 0.0, 0
        for s in states:
            holo = max(holo, holomorphy_residual(m, s))
            try:
                iso = max(iso, isometry_residual(m, s))
            except DomainError:
                skipped += 1
        checked = len(states) - skipped
        row = TranslationRow(
            tuple(float(v) for v in k), holo, iso, holo <= tol, iso <= tol and checked > 0,
            checked, skipped,
        )
        if not row.isometry_pass:
            if checked == 0:
                row.note = "no state has a valid image under this translation"
            else:
                row.note = (
                    "translation in the base coordinates does not preserve g: "
                    f"max |phi^* g - g| = {iso:.3e} > {tol:g} (the metric depends on theta)"
                )
        report.rows.append(row)
    return report
