from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings

from lognormal_kahler.dombrowski import kahler_natural
from lognormal_kahler.errors import DomainExitError
from lognormal_kahler.jacobi import (
    BASIS,
    CURVE_COLUMNS,
    JacobiElement,
    closed_form_field,
    conservation_report,
    hamiltonian_field,
    integrate_flow,
    psi,
    read_curve_csv,
    symplecticity_residual,
    write_curve_csv,
)

from .strategies import tangent_states


def test_parse_and_label():
    L = JacobiElement.parse("P=1, Q=-0.5")
    assert L.lambda_P == 1.0 and L.lambda_Q == -0.5
    assert L.label() == "P=1,Q=-0.5"
    assert JacobiElement.parse("q") == JacobiElement.basis("Q")


@pytest.mark.parametrize("text", ["", "X=1", "P=abc"])
def test_parse_rejects_bad_input(text):
    with pytest.raises(ValueError):
        JacobiElement.parse(text)


def test_algebra_operations():
    L = 2 * JacobiElement.basis("G") + JacobiElement.basis("H")
    np.testing.assert_array_equal(L.coefficients(), [0, 2, 1, 0, 0, 0])


@pytest.mark.parametrize(
    "name, value",
    [("F", 0.0), ("P", -1.0 + 0.5), ("G", 0.5 - 1.0 + 0.5 + 0.125), ("Q", -1.0), ("H", 1.0), ("R", -0.25)],
)
def test_observable_values(name, value):
    assert psi(JacobiElement.basis(name))([1.0, -1.0, 0.5, 0.5]) == pytest.approx(value)


@pytest.mark.parametrize("name", BASIS)
@settings(max_examples=40)
@given(s=tangent_states())
def test_field_matches_closed_form(name, s):
    L = JacobiElement.basis(name)
    np.testing.assert_allclose(hamiltonian_field(psi(L), s), closed_form_field(L, s), atol=1e-10 * (1 + np.abs(s.as_array()).max() ** 3))


@settings(max_examples=40)
@given(s=tangent_states())
def test_contraction_gives_differential(s):
    om = kahler_natural(s).omega
    f = psi(JacobiElement(1.0, 0.3, -0.7, 2.0, 0.4, 1.0))
    np.testing.assert_allclose(hamiltonian_field(f, s) @ om, f.gradient(s.as_array()), atol=1e-9)


@pytest.mark.parametrize(
    "name, end",
    [("Q", (1.0, -1.0, 2.0, -2.0)), ("H", (1.0, -1.0, -4.0, 2.0)), ("F", (1.0, -1.0, 0.0, 0.0))],
)
def test_affine_flows_reach_exact_endpoints(name, end):
    c = integrate_flow(JacobiElement.basis(name), (1, -1, 0, 0), 1.0, 1e-3)
    np.testing.assert_allclose(c.states[-1], end, atol=1e-10)


@pytest.mark.parametrize("name", BASIS)
def test_flows_conserve_their_observable(name):
    c = integrate_flow(JacobiElement.basis(name), (0.5, -2.0, 0.3, -0.2), 0.1, 1e-3)
    assert conservation_report(c) <= 1e-8
    assert len(c) == 101


def test_rk4_order_on_g_flow():
    G = JacobiElement.basis("G")
    d1 = conservation_report(integrate_flow(G, (1, -1, 0, 1), 0.1, 0.01))
    d2 = conservation_report(integrate_flow(G, (1, -1, 0, 1), 0.1, 0.005))
    assert 12 <= d1 / d2 <= 20


def test_symplecticity():
    c = integrate_flow(JacobiElement.basis("G"), (1, -1, 0, 1), 0.1, 1e-3)
    assert symplecticity_residual(c) <= 1e-5


def test_p_flow_leaves_the_manifold():
    with pytest.raises(DomainExitError) as info:
        integrate_flow(JacobiElement.basis("P"), (1, -1, 0, 0), 0.5, 1e-3)
    assert info.value.parameter == pytest.approx((math.sqrt(3) - 1) / 2, abs=2e-3)


def test_step_must_divide_interval():
    with pytest.raises(ValueError):
        integrate_flow(JacobiElement.basis("Q"), (1, -1, 0, 0), 0.1005, 1e-3)


def test_curve_csv_roundtrip(tmp_path):
    c = integrate_flow(JacobiElement.basis("H"), (1, -1, 0, 0), 0.01, 1e-3)
    path = write_curve_csv(c, tmp_path / "curve.csv")
    assert path.read_text().splitlines()[0] == ",".join(CURVE_COLUMNS)
    data = read_curve_csv(path)
    np.testing.assert_array_equal(data["thetadot1"], c.states[:, 2])
    np.testing.assert_array_equal(data["v4"], c.velocities[:, 3])
