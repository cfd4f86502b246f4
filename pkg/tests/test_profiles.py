import math
import warnings

import numpy as np
import pytest

from spikelab.discretization import assemble, build_grid
from spikelab.errors import OutsideDomain, ResolutionWarning
from spikelab.ground_state import profile_moments, solve_ground_state
from spikelab.problem import Box, Constant, ProblemData, QuadraticWell
from spikelab.profiles import (check_resolution, evaluate_ansatz, scaled_profile,
                               tangent_basis)
from spikelab.solver import gradient, residual_norm


@pytest.fixture(scope="module")
def base1():
    return solve_ground_state(1, 3.0)


def line(V=4.0, J=1.0, half=8.0):
    return ProblemData(1, 3.0, Constant(J), Constant(V), Box((-half,), (half,)))


def test_amplitude_and_length(base2):
    d = ProblemData(2, 3.0, Constant(1.0), Constant(4.0), Box((0, 0), (1, 1)))
    prof = scaled_profile([0.5, 0.5], d, base2)
    assert prof.amplitude == pytest.approx(2.0)
    assert prof.inv_length == pytest.approx(2.0)
    r = np.linspace(0, 3, 7)
    x = np.stack([0.5 + r, np.full_like(r, 0.5)], axis=1)
    assert np.allclose(prof(x), 2 * base2(2 * r))


def test_identity_scaling(base2, flat):
    prof = scaled_profile([0.3, 0.6], flat, base2)
    r = np.linspace(0, 0.4, 9)
    x = np.stack([0.3 + r, np.full_like(r, 0.6)], axis=1)
    assert np.allclose(prof(x), base2(r))


def test_peak_value_1d(base1):
    prof = scaled_profile([0.0], line(), base1)
    assert prof([0.0]) == pytest.approx(2 * math.sqrt(2), abs=1e-9)
    assert prof.height == pytest.approx(2 * math.sqrt(2), abs=1e-9)


def test_outside_domain(base2, flat):
    with pytest.raises(OutsideDomain):
        scaled_profile([1.2, 0.5], flat, base2)


def test_homogeneity(base2):
    Q = [0.4, 0.5]
    d1 = ProblemData(2, 3.0, Constant(1.5), QuadraticWell((0.5, 0.5)), Box((0, 0), (1, 1)))
    a = scaled_profile(Q, d1, base2)
    for t in (0.5, 3.0):
        Vt = QuadraticWell((0.5, 0.5), base=t, curvature=t)
        dt = ProblemData(2, 3.0, Constant(1.5 * t), Vt, Box((0, 0), (1, 1)))
        b = scaled_profile(Q, dt, base2)
        assert b.amplitude == pytest.approx(t ** 0.5 * a.amplitude)
        assert b.inv_length == pytest.approx(a.inv_length)


def test_ansatz_values_on_grid(base2, flat, grid129):
    prof = scaled_profile([0.5, 0.5], flat, base2, eps=0.05)
    U = evaluate_ansatz(prof, grid129)
    k = int(np.argmin(np.linalg.norm(grid129.points - [0.5, 0.5], axis=1)))
    assert U[k] == pytest.approx(prof.height)
    assert U.max() == U[k]
    far = prof(np.array([[0.5 + 40 * 0.05, 0.5]]))
    assert far[0] < 1e-10 * prof.amplitude


def test_l2_norm_scaling(base2, flat, grid129):
    eps = 0.1
    m = profile_moments(base2)
    U = evaluate_ansatz(scaled_profile([0.5, 0.5], flat, base2, eps), grid129)
    l2 = math.sqrt(grid129.weights @ U**2)
    assert l2 == pytest.approx(eps * math.sqrt(m.m_sq), rel=0.01)


def test_translation_covariance(base2, flat, grid129):
    h = grid129.spacing[0]
    prof = scaled_profile([0.5, 0.5], flat, base2, 0.1)
    U = grid129.to_lattice(evaluate_ansatz(prof, grid129))
    Us = grid129.to_lattice(evaluate_ansatz(prof.moved([0.5 + h, 0.5]), grid129))
    assert np.abs(Us[1:] - U[:-1]).max() < 1e-12


def test_resolution_warning(base2, flat, grid65):
    prof = scaled_profile([0.5, 0.5], flat, base2, 0.02)
    with pytest.warns(ResolutionWarning):
        evaluate_ansatz(prof, grid65)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_resolution(prof.with_epsilon(0.1), grid65)


def test_ansatz_solves_limiting_problem(base1):
    # -u'' + 4u = u^3 holds exactly for 2·Ū(2x); the discrete residual
    # must vanish at second order under refinement
    d = line()
    res = []
    for n in (161, 321, 641):
        g = build_grid(d.domain, n)
        op = assemble(g, d, 1.0)
        U = evaluate_ansatz(scaled_profile([0.0], d, base1), g)
        res.append(residual_norm(gradient(U, op), op))
    assert np.all(np.log2(np.array(res[:-1]) / res[1:]) >= 1.8)


def test_gram_diagonal_at_centre(base2, flat, grid129):
    prof = scaled_profile([0.5, 0.5], flat, base2, 0.1)
    tb = tangent_basis(prof, grid129)
    G = tb.gram
    assert np.allclose(G, G.T)
    assert abs(G[0, 1]) < 1e-6 * min(G[0, 0], G[1, 1])
    assert np.all(np.linalg.eigvalsh(G) > 0)
    # brute-force quadrature of the same Gram in the mass part alone
    Z = tb.fields
    mass = Z @ (grid129.weights[:, None] * Z.T)
    assert abs(mass[0, 1]) < 1e-6 * mass[0, 0]


def test_tangent_parity(base2, flat, grid129):
    prof = scaled_profile([0.5, 0.5], flat, base2, 0.1)
    U = evaluate_ansatz(prof, grid129)
    tb = tangent_basis(prof, grid129)
    scale = np.sqrt(grid129.weights @ U**2) * np.sqrt(grid129.weights @ tb.fields[0] ** 2)
    assert np.all(np.abs(tb.fields @ (grid129.weights * U)) < 1e-10 * scale)
    assert np.all(np.abs(tb.fields @ grid129.weights) < 1e-10 * np.abs(tb.fields).max())
    assert np.abs(tb.project_out(tb.fields[0]) @ (tb.inner @ tb.fields.T)).max() < 1e-10


def test_tangent_h_refinement(base2, flat, grid129):
    prof = scaled_profile([0.5, 0.5], flat, base2, 0.1)
    Z = [tangent_basis(prof, grid129, h=f * prof.length).fields for f in (0.2, 0.1, 0.05, 0.025)]
    d = np.array([np.abs(a - b).max() for a, b in zip(Z, Z[1:])])
    assert np.all(np.log2(d[:-1] / d[1:]) >= 1.8)


def test_tangent_matches_analytic_derivative(base2, flat, grid129):
    # ε ∂_{Q_1} Ū(|x-Q|/ε) = Ū'(r) (x_1 - Q_1)/|x-Q|
    eps = 0.1
    prof = scaled_profile([0.5, 0.5], flat, base2, eps)
    tb = tangent_basis(prof, grid129, h=0.01 * prof.length)
    d = grid129.points - [0.5, 0.5]
    r = np.linalg.norm(d, axis=1)
    safe = np.where(r > 0, r, 1.0)
    exact = -base2.derivative(r / eps) * d[:, 0] / safe
    assert np.abs(tb.fields[0] - exact).max() < 1e-3 * np.abs(exact).max()


def test_bad_h(base2, flat, grid65):
    with pytest.raises(ValueError):
        tangent_basis(scaled_profile([0.5, 0.5], flat, base2, 0.1), grid65, h=0.0)
