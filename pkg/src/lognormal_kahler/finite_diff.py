"""Central finite-difference stencils used throughout the verification code.

Steps are relative: the step actually taken along coordinate ``i`` is
``step * max(1, |x_i|)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np


@lru_cache(maxsize=None)
def stencil_weights(offsets: tuple[int, ...], deriv: int) -> np.ndarray:
    """Finite-difference weights for the ``deriv``-th derivative on integer ``offsets``.

    Solves the Vandermonde moment system, so the resulting rule is exact for
    polynomials of degree ``len(offsets) - 1`` (unit spacing).
    """
    offs = np.asarray(offsets, dtype=float)
    n = len(offs)
    if deriv >= n:
        raise ValueError("need more stencil points than the derivative order")
    vander = np.vander(offs, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[deriv] = float(np.prod(np.arange(1, deriv + 1)))
    w = np.linalg.solve(vander, rhs)
    w.setflags(write=False)
    return w


def central_offsets(order: int) -> tuple[int, ...]:
    if order < 2 or order % 2:
        raise ValueError(f"central difference order must be even and >= 2, got {order}")
    m = order // 2
    return tuple(range(-m, m + 1))


def scaled_steps(x: np.ndarray, step: float) -> np.ndarray:
    return step * np.maximum(1.0, np.abs(x))


def partial(
    f: Callable[[np.ndarray], np.ndarray | float],
    x: np.ndarray,
    i: int,
    step: float = 1e-5,
    order: int = 4,
):
    """Central-difference first partial derivative of ``f`` along coordinate ``i``."""
    x = np.asarray(x, dtype=float)
    h = scaled_steps(x, step)[i]
    offsets = central_offsets(order)
    weights = stencil_weights(offsets, 1)
    acc = None
    for o, w in zip(offsets, weights):
        if w == 0.0:
            continue
        xp = x.copy()
        xp[i] += o * h
        term = w * np.asarray(f(xp))
        acc = term if acc is None else acc + term
    return acc / h


def gradient(f, x, step: float = 1e-5, order: int = 4) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([partial(f, x, i, step, order) for i in range(x.size)])


def jacobian(f, x, step: float = 1e-5, order: int = 4) -> np.ndarray:
    """Jacobian ``J[a, i] = d f_a / d x_i`` of a vector-valued ``f``."""
    x = np.asarray(x, dtype=float)
    cols = [np.atleast_1d(partial(f, x, i, step, order)) for i in range(x.size)]
    return np.stack(cols, axis=-1)


def second_partial(f, x, i: int, j: int, step: float = 1e-3) -> float:
    """Second-order central estimate of d^2 f / dx_i dx_j (exact on quadratics).

    The step is absolute here; second differences are only used on smooth
    candidates near moderate coordinates.
    """
    x = np.asarray(x, dtype=float)
    h = step
    if i == j:
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        return (f(xp) - 2.0 * f(x) + f(xm)) / (h * h)
    out = 0.0
    for si, sj, sign in ((1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)):
        xq = x.copy()
        xq[i] += si * h
        xq[j] += sj * h
        out += sign * f(xq)
    return out / (4.0 * h * h)


def derivative_along(values: np.ndarray, spacing: float, order: int = 6):
    """Derivative of uniformly sampled ``values`` along axis 0.

    Uses the widest centred stencil of at most ``order`` that fits the sample
    count. Returns ``(derivative, first_index)``: the derivative is defined on
    samples ``first_index .. n - 1 - first_index`` only.
    """
    values = np.asarray(values)
    n = values.shape[0]
    if n < 3:
        raise ValueError("need at least 3 samples for a centred derivative")
    m = min(order // 2, (n - 1) // 2)
    offsets = tuple(range(-m, m + 1))
    weights = stencil_weights(offsets, 1)
    out = np.zeros((n - 2 * m,) + values.shape[1:], dtype=np.result_type(values, float))
    for o, w in zip(offsets, weights):
        if w == 0.0:
            continue
        out = out + w * values[m + o : n - m + o]
    return out / spacing, m
