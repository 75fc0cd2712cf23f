from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings

from lognormal_kahler import finite_diff as fd
from lognormal_kahler.errors import DomainError, QuadratureError
from lognormal_kahler.manifold import (
    DualPoint,
    NaturalPoint,
    QuadratureSpec,
    christoffel_e,
    dual_coordinates,
    expectation,
    fisher_metric,
    fisher_metric_oracle,
    inverse_metric,
    log_likelihood,
    natural_from_dual,
    potential,
    score_mean,
)

from .strategies import natural_points

GRID = [NaturalPoint(a, b) for a in (-2, -1, 0, 1, 2) for b in (-3, -1, -0.5, -0.1)]


def test_natural_point_from_mean_std():
    p = NaturalPoint.from_mean_std(1.0, 2.0)
    assert p.theta1 == pytest.approx(0.25)
    assert p.theta2 == pytest.approx(-0.125)
    assert p.mu == pytest.approx(1.0)
    assert p.variance == pytest.approx(4.0)


@pytest.mark.parametrize("t2", [0.0, 1.0, -1e-13, math.nan])
def test_natural_point_rejects_invalid_theta2(t2):
    with pytest.raises(DomainError):
        NaturalPoint(0.0, t2)


def test_dual_point_requires_positive_variance():
    with pytest.raises(DomainError):
        DualPoint(1.0, 1.0)


def test_quadrature_order_validated():
    with pytest.raises(QuadratureError):
        QuadratureSpec(1)


def test_frozen_values_standard_point():
    p = NaturalPoint(0.0, -0.5)
    np.testing.assert_allclose(fisher_metric(p), [[1.0, 0.0], [0.0, 2.0]], atol=1e-15)
    np.testing.assert_allclose(inverse_metric(p), [[1.0, 0.0], [0.0, 0.5]], atol=1e-15)
    assert potential(p) == pytest.approx(0.5 * math.log(2 * math.pi))
    np.testing.assert_allclose(dual_coordinates(p).as_array(), [0.0, 1.0])


def test_frozen_values_unit_point():
    p = NaturalPoint(1.0, -1.0)
    np.testing.assert_allclose(fisher_metric(p), [[0.5, 0.5], [0.5, 1.0]], atol=1e-15)
    np.testing.assert_allclose(dual_coordinates(p).as_array(), [0.5, 0.75])


def test_log_likelihood_matches_lognormal_density():
    p = NaturalPoint.from_mean_std(0.3, 0.7)
    x = 1.7
    u = math.log(x)
    expected = -math.log(x * 0.7 * math.sqrt(2 * math.pi)) - (u - 0.3) ** 2 / (2 * 0.49)
    assert log_likelihood(x, p) == pytest.approx(expected, rel=1e-13)


def test_log_likelihood_rejects_nonpositive_x():
    with pytest.raises(DomainError):
        log_likelihood(0.0, NaturalPoint(0.0, -1.0))


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"{p.theta1:g},{p.theta2:g}")
@pytest.mark.parametrize("form", ["hessian", "score"])
def test_fisher_metric_matches_quadrature(p, form):
    np.testing.assert_allclose(fisher_metric(p), fisher_metric_oracle(p, form=form), rtol=0, atol=1e-8)


@pytest.mark.parametrize("p", GRID, ids=lambda p: f"{p.theta1:g},{p.theta2:g}")
def test_fisher_metric_positive_definite(p):
    h = fisher_metric(p)
    np.testing.assert_array_equal(h, h.T)
    assert np.linalg.eigvalsh(h).min() > 0


def test_quadrature_moments():
    p = NaturalPoint.from_mean_std(0.4, 1.3)
    m1, m2 = expectation(lambda u: np.stack([u, u * u]), p)
    assert m1 == pytest.approx(0.4, abs=1e-12)
    assert m2 == pytest.approx(0.4 ** 2 + 1.3 ** 2, abs=1e-12)


def test_score_has_zero_mean():
    np.testing.assert_allclose(score_mean(NaturalPoint(1.5, -0.7)), 0.0, atol=1e-10)


def test_unknown_oracle_form():
    with pytest.raises(ValueError):
        fisher_metric_oracle(NaturalPoint(0.0, -1.0), form="other")


@pytest.mark.parametrize("p", GRID[::3])
def test_christoffel_e_vanishes(p):
    assert np.abs(christoffel_e(p)).max() <= 1e-8


@given(natural_points())
def test_metric_times_inverse_is_identity(p):
    np.testing.assert_allclose(fisher_metric(p) @ inverse_metric(p), np.eye(2), atol=1e-9 * max(1, p.theta1 ** 2 / p.theta2 ** 2))


@given(natural_points())
def test_dual_roundtrip(p):
    q = natural_from_dual(dual_coordinates(p))
    assert q.theta1 == pytest.approx(p.theta1, rel=1e-9, abs=1e-9)
    assert q.theta2 == pytest.approx(p.theta2, rel=1e-9)


@settings(max_examples=30)
@given(natural_points())
def test_dual_is_gradient_of_potential(p):
    x = p.as_array()
    g = fd.gradient(lambda t: potential(NaturalPoint(*t)), x, step=1e-5 * min(1.0, abs(p.theta2)))
    np.testing.assert_allclose(g, dual_coordinates(p).as_array(), rtol=1e-6, atol=1e-6)
