from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lognormal_kahler import finite_diff as fd
from lognormal_kahler.dombrowski import TangentState
from lognormal_kahler.errors import GridError, PoleError, WavefunctionOverflowError
from lognormal_kahler.jacobi import BASIS, JacobiElement, integrate_flow
from lognormal_kahler.manifold import NaturalPoint
from lognormal_kahler.schrodinger import (
    CALIBRATED,
    LITERAL,
    RESIDUAL_COLUMNS,
    ConventionFlags,
    LogGrid,
    SchrodingerParams,
    WaveSamples,
    apply_quantization,
    calibrate_flags,
    chain_rule_derivative,
    closed_form_action,
    energy_spread,
    hamiltonian_density,
    operator_discrepancy,
    schrodinger_residual,
    wavefunction,
    write_residual_csv,
    write_residual_summary,
    xi_coefficient,
)

from .strategies import tangent_states

STD = TangentState(NaturalPoint(0.0, -0.5))
GRID = LogGrid.uniform()
SMALL = LogGrid.uniform(-1.0, 1.0, 9)


@pytest.fixture(scope="module")
def still_curve():
    return integrate_flow(JacobiElement(), (1.0, -1.0, 0.0, 0.0), 0.01, 1e-3)


def test_grid_validation():
    with pytest.raises(GridError):
        LogGrid.uniform(0, 1, 7)
    with pytest.raises(GridError):
        LogGrid(np.array([0, 1, 2, 3, 4, 5, 6, 8.0]))
    assert GRID.spacing == pytest.approx(8 / 256)


def test_wavefunction_values():
    w = wavefunction(STD, SMALL)
    assert w.values[4] == pytest.approx((2 * math.pi) ** -0.25, rel=1e-12)
    psi1 = w.values[-1]
    assert abs(psi1) == pytest.approx(math.exp(-0.5 - 0.25 * math.log(2 * math.pi)), rel=1e-12)


def test_wavefunction_overflow_guard():
    s = TangentState(NaturalPoint(0.0, -1.0), (-100.0, 0.0))
    with pytest.raises(WavefunctionOverflowError):
        wavefunction(s, GRID)


def test_wave_samples_shape_checked():
    with pytest.raises(GridError):
        WaveSamples(SMALL, np.ones(3))


def test_derivative_operator_on_minimal_grid():
    g = LogGrid.uniform(0, 1, 8)
    w = WaveSamples(g, np.ones(8))
    assert np.allclose(apply_quantization(JacobiElement.basis("P"), w).values, 0.0)


def test_monomial_actions():
    w = WaveSamples(SMALL, SMALL.points.astype(complex))
    np.testing.assert_allclose(apply_quantization(JacobiElement.basis("H"), w).values, 3j * SMALL.points, atol=1e-12)
    np.testing.assert_allclose(apply_quantization(JacobiElement.basis("R"), w).values, -0.25 * SMALL.points)
    np.testing.assert_allclose(apply_quantization(JacobiElement.basis("Q"), w).values, SMALL.points ** 2)
    q = WaveSamples(SMALL, SMALL.points.astype(complex) ** 2)
    np.testing.assert_allclose(apply_quantization(JacobiElement.basis("G"), q).values, -2.0, atol=1e-10)


def test_momentum_plane_wave_fourth_order():
    errs = []
    hs = (0.02, 0.01, 0.005)
    for h in hs:
        g = LogGrid.uniform(-4, 4, int(round(8 / h)) + 1)
        w = WaveSamples(g, np.exp(2j * g.points))
        errs.append(np.abs(apply_quantization(JacobiElement.basis("P"), w).values - 2 * w.values).max())
    orders = np.diff(np.log(errs)) / np.diff(np.log(hs))
    assert np.all((3.5 <= orders) & (orders <= 4.5))


def test_closed_form_action_examples():
    f = closed_form_action(JacobiElement.basis("F"), STD, SMALL)
    w = wavefunction(STD, SMALL).values
    np.testing.assert_allclose(f.values, -(SMALL.points ** 2) * w)
    p = closed_form_action(JacobiElement.basis("P"), STD, SMALL)
    assert p.values[-1] == pytest.approx(0.5 * w[-1])


@pytest.mark.parametrize("name", ["F", "Q", "R"])
@settings(max_examples=20)
@given(s=tangent_states().filter(lambda s: s.thetadot[0] > -1.5))
def test_multiplication_operators_agree(name, s):
    assert operator_discrepancy(JacobiElement.basis(name), s, GRID) <= 1e-10


def test_momentum_discrepancy_matches_analytic_value():
    # -i dPsi/du = (i - 1 - z2 + 2 z1 u) Psi / 2, so the closed form is off by |-3/4 + i/2| |Psi| here.
    u = GRID.points[2]
    expected = abs(-0.75 + 0.5j) * math.exp(0.5 * (-u) - 0.25 * math.log(2 * math.pi))
    assert operator_discrepancy(JacobiElement.basis("P"), STD, GRID) == pytest.approx(expected, rel=1e-5)


@pytest.mark.parametrize("name", ["P", "G", "H"])
def test_derivative_operator_discrepancies_are_nonzero(name):
    assert operator_discrepancy(JacobiElement.basis(name), STD, GRID) > 0.1


def test_xi_examples(still_curve):
    assert xi_coefficient(still_curve, 3, 1.0, SchrodingerParams(lambdas=(0, 0, 0, 0, 1))) == pytest.approx(0.25)
    with pytest.raises(PoleError):
        xi_coefficient(still_curve, 3, 1.0, SchrodingerParams(betas=(0, 0, 0, 0, -1, 0)))
    with pytest.raises(IndexError):
        xi_coefficient(still_curve, 50, 1.0, SchrodingerParams())


def test_xi_vanishes_for_zero_inputs_at_rest():
    c = integrate_flow(JacobiElement(), (0.0, -1.0, 0.0, 0.0), 0.01, 1e-3)
    # every term without a lambda factor carries a fiber coordinate or its rate
    assert xi_coefficient(c, 2, 1.0, SchrodingerParams()) == pytest.approx(0.0, abs=1e-15)


def test_xi_alternate_variant_differs(still_curve):
    p = SchrodingerParams(lambdas=(0, 0, 0, 0, 1), xi_variant="alternate")
    assert xi_coefficient(still_curve, 3, 1.0, p) != pytest.approx(0.25)


@pytest.mark.parametrize(
    "lambdas, u, xi, value",
    [((0, 0, 0, 0, 0), 1.0, 0.0, 0.0), ((0, 0, 0, 0, 1), 1.0, 0.0, -0.25), ((1, 0, 0, 0, 0), 2.0, 0.0, -4.0),
     ((0, 0, 0, 0, 0), 2.0, 1.5j, 3j)],
)
def test_hamiltonian_density_examples(lambdas, u, xi, value):
    assert hamiltonian_density(STD, u, SchrodingerParams(lambdas=lambdas), xi) == pytest.approx(value)


@settings(max_examples=30)
@given(
    s=tangent_states(),
    a=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
    b=st.lists(st.floats(-2, 2), min_size=5, max_size=5),
)
def test_hamiltonian_density_is_linear(s, a, b):
    u = SMALL.points
    h = lambda lam: hamiltonian_density(s, u, SchrodingerParams(lambdas=tuple(lam)), 0.0)
    total = h(np.add(a, b))
    scale = 1 + np.abs(h(a)).max() + np.abs(h(b)).max()
    np.testing.assert_allclose(total, h(a) + h(b), atol=1e-12 * scale)


def test_params_from_generator():
    p = SchrodingerParams.for_generator(JacobiElement.parse("F=1,G=2,H=3,P=4,Q=5,R=6"))
    assert p.lambdas == (1, 2, 3, 4, 6)
    assert p.gamma == 5


@pytest.mark.parametrize("name", ["F", "Q", "H"])
def test_chain_rule_oracle_on_theta_constant_flows(name):
    c = integrate_flow(JacobiElement.basis(name), (1, -1, 0, 0), 0.1, 1e-3)
    psis = np.array([wavefunction(c.state(k), GRID).values for k in range(len(c))])
    d, m = fd.derivative_along(psis, c.step, 6)
    exact = np.array([chain_rule_derivative(c, k, GRID.points) for k in range(m, len(c) - m)])
    assert np.abs(d - exact).max() <= 1e-6


@pytest.mark.parametrize("name", ["F", "Q", "H"])
def test_calibrated_residual_is_small(name):
    c = integrate_flow(JacobiElement.basis(name), (1, -1, 0, 0), 0.1, 1e-3)
    r = schrodinger_residual(c, GRID, SchrodingerParams.for_generator(c.generator))
    assert r.eq23.max() <= 1e-6


def test_literal_flags_leave_a_residual():
    c = integrate_flow(JacobiElement.basis("Q"), (1, -1, 0, 0), 0.1, 1e-3)
    r = schrodinger_residual(c, GRID, SchrodingerParams.for_generator(c.generator, flags=LITERAL))
    assert r.eq23.max() > 1.0


def test_calibration_recovers_default_flags():
    curves = [integrate_flow(JacobiElement.basis(n), (1, -1, 0, 0), 0.02, 1e-3) for n in "QH"]
    assert calibrate_flags(curves, SMALL) == CALIBRATED


def test_flag_validation():
    with pytest.raises(ValueError):
        ConventionFlags(sign_z2_term=0)


def test_residual_needs_three_samples():
    c = integrate_flow(JacobiElement(), (1, -1, 0, 0), 1e-3, 1e-3)
    with pytest.raises(ValueError):
        schrodinger_residual(c, GRID, SchrodingerParams())


def test_formula_xi_source_raises_at_pole():
    c = integrate_flow(JacobiElement.basis("Q"), (1, -1, 0, 0), 0.01, 1e-3)
    with pytest.raises(PoleError):
        schrodinger_residual(c, GRID, SchrodingerParams(xi_source="formula"))


def test_energy_varies_along_p_flow():
    c = integrate_flow(JacobiElement.basis("P"), (1, -1, 0, 0), 0.3, 1e-3)
    assert energy_spread(c) > 0.1


def test_exports(tmp_path):
    c = integrate_flow(JacobiElement.basis("Q"), (1, -1, 0, 0), 0.01, 1e-3)
    r = schrodinger_residual(c, SMALL, SchrodingerParams.for_generator(c.generator))
    path = write_residual_csv(r, tmp_path / "r.csv")
    rows = list(csv.reader(path.open()))
    assert tuple(rows[0]) == RESIDUAL_COLUMNS
    assert len(rows) == 1 + r.s.size * SMALL.points.size
    summary = json.loads(write_residual_summary(r, tmp_path / "r.json").read_text())
    assert summary["params"]["flags"] == CALIBRATED.as_dict()
    assert summary["max_abs_residual_eq23"] == pytest.approx(float(r.eq23.max()))


def test_basis_order_is_fixed():
    assert BASIS == ("F", "G", "H", "P", "Q", "R")
