import math

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from spikelab.errors import Supercritical
from spikelab.ground_state import (critical_exponent, profile_moments, radial_symmetry_moment,
                                   solve_ground_state, sphere_area)


def soliton(p, r):
    """Closed-form 1D ground state of -u'' + u = u^p."""
    return ((p + 1) / 2) ** (1 / (p - 1)) / np.cosh((p - 1) * r / 2) ** (2 / (p - 1))


@pytest.fixture(scope="module")
def gs13():
    return solve_ground_state(1, 3.0)


@pytest.fixture(scope="module")
def gs33():
    return solve_ground_state(3, 3.0, tol=1e-10)


@pytest.mark.parametrize("p, u0", [(3.0, math.sqrt(2)), (2.0, 1.5)])
def test_1d_soliton(p, u0):
    prof = solve_ground_state(1, p, tol=1e-12)
    assert abs(prof.u0 - u0) < 1e-10
    r = np.linspace(0, 20, 2001)
    assert np.max(np.abs(prof(r) - soliton(p, r))) < 1e-8


def test_soliton_formula_solves_ode():
    # the oracle itself: -u'' + u - u^p = 0 by centred differences
    r = np.linspace(0.5, 10, 200)
    h = 1e-4
    for p in (2.0, 3.0, 4.5):
        u = soliton(p, r)
        upp = (soliton(p, r + h) - 2 * u + soliton(p, r - h)) / h**2
        assert np.max(np.abs(-upp + u - u**p)) < 1e-6


def test_profile_invariants(gs33):
    u = gs33.u_values
    assert u[0] == u.max()
    assert np.all(np.diff(u) < 0)
    assert np.all(u > 0)
    assert gs33.du_values[0] == 0
    assert gs33(gs33.r_max) < 1e-10 * gs33.u0
    assert abs(gs33.decay_rate - 1) < 0.05


@pytest.mark.parametrize("N, p", [(1, 3.0), (2, 3.0), (3, 3.0), (3, 2.0)])
def test_ode_residual_below_tolerance(N, p):
    tol = 1e-12
    prof = solve_ground_state(N, p, tol=tol)
    # measured against the size of the equation's terms, u0^p
    assert np.max(np.abs(prof.ode_residual())) < 10 * tol * prof.u0**p


def shoot_u0(N, p, r_end, iters=45):
    """Plain bisection shooting, independent of the library: a trajectory
    that crosses zero overshoots, one that turns upward undershoots."""
    from scipy.integrate import solve_ivp

    def f(r, y):
        return [y[1], -(N - 1) / r * y[1] + y[0] - abs(y[0]) ** p]

    def cross(r, y):
        return y[0]
    cross.terminal = True

    def turn(r, y):
        return y[1]
    turn.terminal = True
    turn.direction = 1

    lo, hi = 1.0 + 1e-9, 20.0
    for _ in range(iters):
        a = 0.5 * (lo + hi)
        r0 = 1e-6
        y0 = [a + (a - a**p) * r0**2 / (2 * N), (a - a**p) * r0 / N]
        sol = solve_ivp(f, (r0, r_end), y0, method="DOP853", rtol=1e-13, atol=1e-15,
                        events=(cross, turn))
        if sol.t_events[0].size:
            hi = a
        else:
            lo = a
    return 0.5 * (lo + hi)


def test_3d_against_independent_shooting(gs33):
    assert abs(shoot_u0(3, 3.0, 2 * gs33.r_max) - gs33.u0) < 1e-6 * gs33.u0


def test_3d_richardson_self_consistency(gs33):
    fine = solve_ground_state(3, 3.0, tol=1e-12, dr=0.005 / 4)
    assert abs(fine.u0 - gs33.u0) < 1e-6 * fine.u0
    assert fine.r_max >= gs33.r_max


def test_supercritical_rejected():
    with pytest.raises(Supercritical):
        solve_ground_state(3, 5.0)
    with pytest.raises(Supercritical):
        solve_ground_state(4, 3.5)
    assert critical_exponent(3) == 5.0
    assert math.isinf(critical_exponent(2))


def test_moments_closed_form(gs13):
    m = profile_moments(gs13)
    assert abs(m.m_pp1 - 16 / 3) < 1e-8
    assert abs(m.c0_bar - 4 / 3) < 1e-8
    assert abs(m.m_sq - 4.0) < 1e-8       # ∫ 2 sech^2
    assert abs(m.m_grad2 - 4 / 3) < 1e-8  # ∫ 2 sech^2 tanh^2


@pytest.mark.parametrize("N, p", [(1, 3.0), (2, 3.0), (3, 3.0), (3, 2.0), (2, 5.0)])
def test_pohozaev_identity(N, p):
    m = profile_moments(solve_ground_state(N, p))
    assert abs(m.pohozaev_defect) < 1e-6 * m.m_pp1
    assert min(m.m_pp1, m.m_grad2, m.m_sq) > 0


def test_moments_converge_under_refinement(gs33):
    a = profile_moments(gs33)
    b = profile_moments(solve_ground_state(3, 3.0, tol=1e-10, dr=0.0025))
    for f in ("m_pp1", "m_grad2", "m_sq"):
        assert abs(getattr(a, f) - getattr(b, f)) < 1e-4 * getattr(b, f)


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)


@pytest.mark.parametrize("N", [1, 2])
def test_radial_symmetry_moment_vanishes(N):
    prof = solve_ground_state(N, 3.0)
    for i in range(N):
        for kind in ("grad2", "sq"):
            assert abs(radial_symmetry_moment(prof, i, kind)) < 1e-10


def test_radial_symmetry_moment_bad_axis(gs13):
    with pytest.raises(ValueError):
        radial_symmetry_moment(gs13, 1)


def test_tail_continuity(gs13):
    r = gs13.r_max
    assert gs13(r - 1e-9) == pytest.approx(gs13(r + 1e-9), rel=1e-6)
    assert gs13(r + 5) < gs13(r)


@settings(max_examples=6, deadline=None)
@given(st.floats(min_value=1.3, max_value=6.0))
@example(1.5)
def test_1d_matches_soliton_for_any_p(p):
    prof = solve_ground_state(1, p, tol=1e-10)
    r = np.linspace(0, 10, 101)
    assert np.max(np.abs(prof(r) - soliton(p, r))) < 1e-6 * soliton(p, 0.0)
