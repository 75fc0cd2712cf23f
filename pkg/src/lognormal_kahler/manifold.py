"""Closed-form information geometry of the lognormal family.

A lognormal law with ``log x ~ Normal(mu, sigma^2)`` is an exponential family
in the sufficient statistics ``(log x, log^2 x)`` with natural parameters

    theta1 = mu / sigma^2,    theta2 = -1 / (2 sigma^2).

Everything here is closed form except the ``*_oracle`` helpers and
:func:`christoffel_e`, which integrate over ``u = log x`` with Gauss-Hermite
quadrature and serve as an independent check of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError

THETA2_GUARD = -1e-12
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class NaturalPoint:
    theta1: float
    theta2: float

    def __post_init__(self):
        t1, t2 = float(self.theta1), float(self.theta2)
        if not (math.isfinite(t1) and math.isfinite(t2)):
            raise DomainError(f"non-finite natural parameters ({t1}, {t2})")
        if t2 >= THETA2_GUARD:
            raise DomainError(f"theta2 must be < {THETA2_GUARD}, got {t2}")
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)

    @classmethod
    def from_mean_std(cls, mu: float, sigma: float) -> "NaturalPoint":
        if not sigma > 0:
            raise DomainError(f"sigma must be positive, got {sigma}")
        var = sigma * sigma
        return cls(mu / var, -1.0 / (2.0 * var))

    @property
    def mu(self) -> float:
        return -self.theta1 / (2.0 * self.theta2)

    @property
    def variance(self) -> float:
        return -1.0 / (2.0 * self.theta2)

    def as_array(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])


@dataclass(frozen=True)
class DualPoint:
    """Expectation coordinates ``(E[log x], E[log^2 x])``."""

    eta1: float
    eta2: float

    def __post_init__(self):
        if not self.eta2 - self.eta1 ** 2 > 0:
            raise DomainError(
                f"eta2 - eta1^2 must be positive, got {self.eta2 - self.eta1 ** 2}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.eta1, self.eta2])


@dataclass(frozen=True)
class QuadratureSpec:
    order: int = 40

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise QuadratureError(f"quadrature order must be an integer >= 2, got {self.order}")


def as_point(p) -> NaturalPoint:
    if isinstance(p, NaturalPoint):
        return p
    t1, t2 = p
    return NaturalPoint(t1, t2)


def natural_from_dual(q: DualPoint) -> NaturalPoint:
    var = q.eta2 - q.eta1 ** 2
    return NaturalPoint(q.eta1 / var, -1.0 / (2.0 * var))


def log_likelihood(x: float, p: NaturalPoint) -> float:
    """Log-density of the lognormal law at ``x > 0``."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    p = as_point(p)
    t1, t2 = p.theta1, p.theta2
    u = math.log(x)
    return (
        -u
        + t1 * u
        + t2 * u * u
        + t1 * t1 / (4.0 * t2)
        + 0.5 * math.log(-2.0 * t2)
        - 0.5 * LOG_2PI
    )


def potential(p: NaturalPoint) -> float:
    """Log-partition function; its gradient is the dual point, its Hessian the metric."""
    p = as_point(p)
    t1, t2 = p.theta1, p.theta2
    return -t1 * t1 / (4.0 * t2) - 0.5 * math.log(-2.0 * t2) + 0.5 * LOG_2PI


def dual_coordinates(p: NaturalPoint) -> DualPoint:
    p = as_point(p)
    t1, t2 = p.theta1, p.theta2
    return DualPoint(-t1 / (2.0 * t2), (t1 * t1 - 2.0 * t2) / (4.0 * t2 * t2))


def fisher_metric(p: NaturalPoint) -> np.ndarray:
    p = as_point(p)
    t1, t2 = p.theta1, p.theta2
    off = t1 / (2.0 * t2 ** 2)
    return np.array(
        [
            [-1.0 / (2.0 * t2), off],
            [off, -(t1 * t1 - t2) / (2.0 * t2 ** 3)],
        ]
    )


def inverse_metric(p: NaturalPoint) -> np.ndarray:
    p = as_point(p)
    t1, t2 = p.theta1, p.theta2
    return np.array(
        [
            [2.0 * t1 * t1 - 2.0 * t2, 2.0 * t1 * t2],
            [2.0 * t1 * t2, 2.0 * t2 * t2],
        ]
    )


# --- quadrature oracle -------------------------------------------------------
#
# The score and Hessian of the log-likelihood are written out again here by
# differentiating log_likelihood() directly; they deliberately do not reuse
# fisher_metric().


def _nodes(p: NaturalPoint, q: QuadratureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nodes in ``u = log x`` and normalised weights for E[.] under Normal(mu, sigma^2)."""
    var = p.variance
    if not (var > 0 and math.isfinite(var)) or var < np.finfo(float).tiny:
        raise QuadratureError(f"degenerate variance {var} for quadrature")
    t, w = np.polynomial.hermite.hermgauss(int(q.order))
    u = p.mu + math.sqrt(2.0 * var) * t
    return u, w / math.sqrt(math.pi)


def score(u: np.ndarray, p: NaturalPoint) -> np.ndarray:
    """d ell / d theta_k at ``u = log x``; shape ``(2,) + u.shape``."""
    t1, t2 = p.theta1, p.theta2
    u = np.asarray(u, dtype=float)
    s1 = u + t1 / (2.0 * t2)
    s2 = u * u - t1 * t1 / (4.0 * t2 * t2) + 1.0 / (2.0 * t2)
    return np.stack([s1, s2])


def loglik_hessian(p: NaturalPoint) -> np.ndarray:
    """d^2 ell / d theta_i d theta_j; independent of x for this family."""
    t1, t2 = p.theta1, p.theta2
    h11 = 1.0 / (2.0 * t2)
    h12 = -t1 / (2.0 * t2 * t2)
    h22 = t1 * t1 / (2.0 * t2 ** 3) - 1.0 / (2.0 * t2 * t2)
    return np.array([[h11, h12], [h12, h22]])


def expectation(fn, p: NaturalPoint, q: QuadratureSpec = QuadratureSpec()):
    """E[fn(u)] for ``u = log x``; ``fn`` maps a node array to ``(..., n_nodes)``."""
    p = as_point(p)
    u, w = _nodes(p, q)
    return np.asarray(fn(u)) @ w


def fisher_metric_oracle(
    p: NaturalPoint, q: QuadratureSpec = QuadratureSpec(), form: str = "hessian"
) -> np.ndarray:
    """Fisher metric by quadrature.

    ``form="hessian"`` evaluates ``-E[d^2 ell]``; ``form="score"`` evaluates the
    outer-product form ``E[score score^T]``, which involves genuine polynomial
    integrands in ``u``.
    """
    p = as_point(p)
    if form == "hessian":
        hess = loglik_hessian(p)
        return -expectation(lambda u: hess[:, :, None] * np.ones_like(u), p, q)
    if form == "score":
        return expectation(
            lambda u: score(u, p)[:, None, :] * score(u, p)[None, :, :], p, q
        )
    raise ValueError(f"unknown oracle form {form!r}")


def score_mean(p: NaturalPoint, q: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    p = as_point(p)
    return expectation(lambda u: score(u, p), p, q)


def christoffel_e(p: NaturalPoint, q: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """Exponential-connection coefficients ``E[(d_i d_j ell)(d_k ell)]``, shape (2, 2, 2).

    These vanish in natural coordinates. The Levi-Civita symbols of the
    Fisher metric do not.
    """
    p = as_point(p)
    hess = loglik_hessian(p)
    return expectation(
        lambda u: hess[:, :, None, None] * score(u, p)[None, None, :, :], p, q
    )
