import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spikelab.errors import NonpositiveCoefficient, OutsideDomain, UnsupportedShape
from spikelab.gamma import (find_critical_points, gamma, gamma_on_lattice, grad_gamma,
                            hess_gamma, lattice_extrema)
from spikelab.problem import (Ball, Box, CallableField, Constant, GaussianBumps, Polynomial,
                              ProblemData, QuadraticWell, make_domain, make_field)


@pytest.fixture(scope="module")
def bowl3():
    """N=3, p=3, J=1, V=1+|Q|^2 on the unit ball: Γ = sqrt(1+|Q|^2)."""
    return ProblemData(3, 3.0, Constant(1), QuadraticWell((0, 0, 0)), Ball((0, 0, 0), 1.0))


def test_theta():
    assert ProblemData(3, 3.0, Constant(1), Constant(1), Box((0,) * 3, (1,) * 3)).theta == 0.5
    assert ProblemData(2, 3.0, Constant(1), Constant(1), Box((0, 0), (1, 1))).theta == 1.0


def test_gamma_identity_and_arithmetic():
    d = ProblemData(2, 3.0, Constant(1), Constant(1), Box((0, 0), (1, 1)))
    assert gamma([0.3, 0.4], d) == 1.0
    d = ProblemData(2, 3.0, Constant(3), Constant(2), Box((0, 0), (1, 1)))
    assert gamma([0.3, 0.4], d) == pytest.approx(6.0)


def test_gamma_bowl(bowl3, rng):
    Q = rng.uniform(-0.5, 0.5, size=(20, 3))
    assert np.allclose(gamma(Q, bowl3), np.sqrt(1 + np.sum(Q**2, axis=1)))
    assert gamma(np.zeros(3), bowl3) == 1.0
    assert np.allclose(grad_gamma(np.zeros(3), bowl3), 0)
    assert np.allclose(hess_gamma(np.zeros(3), bowl3), np.eye(3))


def test_grad_and_hessian_match_hand_derivatives(bowl3, rng):
    for Q in rng.uniform(-0.5, 0.5, size=(5, 3)):
        G = np.sqrt(1 + Q @ Q)
        assert np.allclose(grad_gamma(Q, bowl3), Q / G)
        assert np.allclose(hess_gamma(Q, bowl3), np.eye(3) / G - np.outer(Q, Q) / G**3)


def test_fd_path_second_order(bowl3):
    Q = np.array([0.3, -0.2, 0.1])
    exact = hess_gamma(Q, bowl3)
    errs = [np.abs(hess_gamma(Q, bowl3, method="fd", h_c=h) - exact).max() for h in (4e-2, 2e-2, 1e-2)]
    slopes = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(slopes >= 1.8)
    gerrs = [np.abs(grad_gamma(Q, bowl3, method="fd", h_c=h) - grad_gamma(Q, bowl3)).max()
             for h in (4e-2, 2e-2, 1e-2)]
    assert np.all(np.log2(np.array(gerrs[:-1]) / gerrs[1:]) >= 1.8)


def test_constant_gamma_derivatives_vanish():
    d = ProblemData(2, 3.0, Constant(1), Constant(1), Box((0, 0), (1, 1)))
    assert np.all(grad_gamma([0.5, 0.5], d) == 0)
    assert np.all(hess_gamma([0.5, 0.5], d) == 0)


def test_errors():
    d = ProblemData(2, 3.0, Constant(1), Constant(1), Box((0, 0), (1, 1)))
    with pytest.raises(OutsideDomain):
        gamma([1.5, 0.5], d)
    bad = ProblemData(2, 3.0, Constant(1), Polynomial({(1, 0): 1.0, (0, 0): -0.5}),
                      Box((0, 0), (1, 1)))
    with pytest.raises(NonpositiveCoefficient):
        gamma([0.1, 0.5], bad)
    with pytest.raises(NonpositiveCoefficient):
        bad.validate()
    with pytest.raises(ValueError):
        ProblemData(3, 5.0, Constant(1), Constant(1), Box((0,) * 3, (1,) * 3))
    with pytest.raises(UnsupportedShape):
        make_domain({"shape": "torus"})


def test_single_minimum_on_ball(bowl3):
    ax = np.linspace(-0.8, 0.8, 5)
    seeds = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    seeds = seeds[bowl3.domain.contains(seeds)]
    crit = find_critical_points(bowl3, seeds)
    assert len(crit) == 1
    c = crit[0]
    assert np.linalg.norm(c.location) < 1e-9
    assert c.kind == "min" and c.isolated_strict
    axes, vals = gamma_on_lattice(bowl3, 21)
    brute = lattice_extrema(axes, vals, "min")
    assert len(brute) == 1 and np.allclose(brute[0], 0)


def test_two_well_critical_points(two_well):
    ax0, ax1 = np.linspace(0.1, 1.9, 9), np.linspace(0.1, 0.9, 5)
    seeds = np.stack(np.meshgrid(ax0, ax1, indexing="ij"), -1).reshape(-1, 2)
    failures = []
    crit = find_critical_points(two_well, seeds, failures=failures)
    kinds = sorted(c.kind for c in crit)
    assert kinds == ["min", "min", "saddle"]
    axes, vals = gamma_on_lattice(two_well, 201)
    brute = lattice_extrema(axes, vals, "min")
    mins = sorted((c.location for c in crit if c.kind == "min"), key=lambda q: q[0])
    assert len(brute) == 2
    for m, b in zip(mins, sorted(brute, key=lambda q: q[0])):
        assert np.linalg.norm(m - b) < 0.01
    assert all(len(f) == 2 for f in failures)


def test_constant_gamma_is_degenerate():
    d = ProblemData(2, 3.0, Constant(1), Constant(1), Box((0, 0), (1, 1)))
    crit = find_critical_points(d, [[0.3, 0.3], [0.7, 0.6]])
    assert len(crit) == 2
    assert all(c.kind == "degenerate" and not c.isolated_strict for c in crit)


def test_field_derivatives_against_fd(rng):
    fields = [
        QuadraticWell((0.2, 0.1), base=2.0, curvature=0.7),
        GaussianBumps(1.0, [0.5, -0.3], [[0.1, 0.2], [0.6, 0.4]], [0.3, 0.2]),
        Polynomial({(2, 0): 1.0, (1, 1): -0.5, (0, 3): 0.25, (0, 0): 2.0}),
    ]
    x = rng.uniform(0, 1, size=(6, 2))
    for f in fields:
        wrapped = CallableField(f.value, h_c=1e-4)
        assert np.allclose(f.gradient(x), wrapped.gradient(x), atol=1e-7)
        assert np.allclose(f.hessian(x), wrapped.hessian(x), atol=1e-4)
        assert np.allclose(make_field(f.params()).value(x), f.value(x))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_scaling_covariance(t, x, y):
    base = GaussianBumps(1.5, [-0.8], [[0.4, 0.6]], [0.3])
    scaled = CallableField(lambda q: t * base.value(q))
    d1 = ProblemData(2, 3.0, Constant(1), base, Box((0, 0), (1, 1)))
    d2 = ProblemData(2, 3.0, Constant(1), scaled, Box((0, 0), (1, 1)))
    Q = np.array([x, y])
    assert gamma(Q, d2) == pytest.approx(t**d1.theta * gamma(Q, d1), rel=1e-12)


def test_argmin_invariant_under_scaling():
    base = GaussianBumps(1.5, [-0.8], [[0.4, 0.6]], [0.3])
    d1 = ProblemData(2, 3.0, Constant(1), base, Box((0, 0), (1, 1)))
    d2 = ProblemData(2, 3.0, Constant(1), CallableField(lambda q: 3.7 * base.value(q)),
                     Box((0, 0), (1, 1)))
    a1, v1 = gamma_on_lattice(d1, 41)
    a2, v2 = gamma_on_lattice(d2, 41)
    assert np.array_equal(lattice_extrema(a1, v1), lattice_extrema(a2, v2))


def test_validate_records_bounds(well):
    info = well.validate()
    assert info["min_V"] == pytest.approx(1.0)
    assert info["max_V"] == pytest.approx(1.5)
    assert well.coercivity["min_J"] == 1.0
