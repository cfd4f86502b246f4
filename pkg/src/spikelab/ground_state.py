"""Radial ground state of  -Δu + u = u^p  on R^N, by shooting.

The profile is found by bisection on the central value u(0): trajectories
that cross zero overshoot, trajectories that turn back up (u' > 0)
undershoot.  Outward integration of the decaying separatrix is unstable,
so the integrated branch is cut at a matching radius where the two
bracketing trajectories start to separate.  Beyond it the profile is
integrated inward from far out, starting on the decaying solution of the
linearised equation  u'' + (N-1)/r u' = u,  namely r^{-ν} K_ν(r) with
ν = (N-2)/2.  A final two-parameter Newton step on (u(0), tail amplitude)
makes value and slope continuous at the junction.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicHermiteSpline

from .errors import NoBracket, Supercritical

__all__ = [
    "RadialProfile",
    "Moments",
    "solve_ground_state",
    "profile_moments",
    "radial_symmetry_moment",
    "sphere_area",
    "critical_exponent",
]

# relative tolerance floor that DOP853 still honours
_RTOL_FLOOR = 2.5e-14


def critical_exponent(N):
    """Sobolev exponent (N+2)/(N-2); infinite for N <= 2."""
    return math.inf if N <= 2 else (N + 2) / (N - 2)


def sphere_area(N):
    """Area of the unit sphere in R^N (2 for N = 1)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def _tail_shape(N, r):
    """Decaying linearised solution r^{-nu} K_nu(r) and its derivative."""
    nu = (N - 2) / 2
    r = np.asarray(r, dtype=float)
    scale = np.exp(-r) * r ** (-nu)
    k = scale * special.kve(nu, r)
    dk = -scale * special.kve(nu + 1, r)
    return k, dk


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Tabulated ground state Ū(r) on [0, r_max], analytic decay beyond.

    Call the profile to evaluate Ū at arbitrary radii; ``derivative`` gives
    Ū'.  Inside the table a cubic Hermite interpolant is used.
    """

    dimension: int
    exponent: float
    r_nodes: np.ndarray
    u_values: np.ndarray
    du_values: np.ndarray
    u0: float
    r_max: float
    decay_rate: float
    r_match: float
    tail_amplitude: float
    bracket: tuple = (math.nan, math.nan)
    _head: object = field(default=None, repr=False)
    _tail: object = field(default=None, repr=False)
    _spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        for arr in (self.r_nodes, self.u_values, self.du_values):
            arr.setflags(write=False)
        spline = CubicHermiteSpline(self.r_nodes, self.u_values, self.du_values)
        object.__setattr__(self, "_spline", spline)

    def __call__(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        inside = r <= self.r_max
        out = np.empty_like(r)
        out[inside] = self._spline(r[inside])
        if not inside.all():
            k, _ = _tail_shape(self.dimension, r[~inside])
            out[~inside] = self.tail_amplitude * k
        return out

    def derivative(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        inside = r <= self.r_max
        out = np.empty_like(r)
        out[inside] = self._spline(r[inside], 1)
        if not inside.all():
            _, dk = _tail_shape(self.dimension, r[~inside])
            out[~inside] = self.tail_amplitude * dk
        return out

    def ode_residual(self, width=None):
        """Residual of  (r^{N-1} u')' = r^{N-1} (u - u^p)  at interior nodes.

        Evaluated in flux form from the integrator's dense output over cells
        of the given width, then divided by the cell measure so it compares
        with the pointwise residual.
        """
        if self._head is None:
            raise ValueError("profile carries no dense solution")
        N, p = self.dimension, self.exponent
        dr = self.r_nodes[1] - self.r_nodes[0]
        width = 20 * dr if width is None else width

        def y(rr):
            rr = np.asarray(rr, dtype=float)
            out = np.empty((2,) + rr.shape)
            h = rr <= self.r_match
            out[:, h] = self._head(np.maximum(rr[h], 1e-4))
            out[:, ~h] = self._tail(rr[~h])
            return out

        stride = max(1, int(round(width / dr)))
        centres = self.r_nodes[stride:-stride:stride]
        a, b = centres - width / 2, centres + width / 2
        xg, wg = np.polynomial.legendre.leggauss(12)
        rq = 0.5 * (b - a)[:, None] * xg[None, :] + 0.5 * (a + b)[:, None]
        uq = y(rq)[0]
        src = np.sum(wg * rq ** (N - 1) * (uq - uq ** p), axis=1) * 0.5 * (b - a)
        flux = b ** (N - 1) * y(b)[1] - a ** (N - 1) * y(a)[1]
        measure = np.sum(wg * rq ** (N - 1), axis=1) * 0.5 * (b - a)
        return (flux - src) / measure


@dataclass(frozen=True)
class Moments:
    m_pp1: float
    m_grad2: float
    m_sq: float
    c0_bar: float

    @property
    def pohozaev_defect(self):
        """Relative failure of  m_grad2 + m_sq = m_pp1."""
        return abs(self.m_grad2 + self.m_sq - self.m_pp1) / self.m_pp1


def _series_start(u0, N, p, r0):
    f = u0 - u0**p
    c1 = f / (2 * N)
    c2 = (1 - p * u0 ** (p - 1)) * c1 / (4 * (N + 2))
    return np.array([u0 + c1 * r0**2 + c2 * r0**4, 2 * c1 * r0 + 4 * c2 * r0**3])


def _rhs(N, p):
    def rhs(r, y):
        u, du = y
        return [du, -(N - 1) / r * du + u - u * abs(u) ** (p - 1)]

    return rhs


def _shoot(u0, N, p, rtol, r_end, dense=False):
    """Integrate from the origin; return (kind, solution).

    kind is +1 for overshoot (u crosses zero), -1 for undershoot (u' turns
    positive), 0 if neither happened before ``r_end``.
    """
    def crossed_zero(r, y):
        return y[0]

    crossed_zero.terminal = True
    crossed_zero.direction = -1

    def turned_up(r, y):
        return y[1]

    turned_up.terminal = True
    turned_up.direction = 1

    r0 = 1e-4
    sol = integrate.solve_ivp(
        _rhs(N, p), (r0, r_end), _series_start(u0, N, p, r0),
        method="DOP853", rtol=rtol, atol=1e-300,
        events=(crossed_zero, turned_up), dense_output=dense,
    )
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


def _find_bracket(N, p, r_end):
    lo = 1.0 + 1e-6
    if _shoot(lo, N, p, 1e-6, r_end)[0] != -1:
        raise NoBracket(f"u0={lo} does not undershoot for N={N}, p={p}")
    hi = 2.0
    while _shoot(hi, N, p, 1e-6, r_end)[0] != 1:
        lo = hi
        hi *= 2.0
        if hi > 1e6:
            raise NoBracket(f"no overshooting u0 below 1e6 for N={N}, p={p}")
    return lo, hi


def solve_ground_state(N, p, tol=1e-12, dr=0.005, sep_tol=1e-6):
    """Ground state Ū of  -ΔŪ + Ū = Ū^p  in R^N by shooting on Ū(0).

    Parameters
    ----------
    N : int
        Space dimension (1 and 2 are allowed).
    p : float
        Exponent, 1 < p < (N+2)/(N-2) for N >= 3.
    tol : float
        Bisection stops once the bracket on Ū(0) is narrower than ``tol``.
    dr : float
        Spacing of the returned radial table.
    sep_tol : float
        Relative separation of the bracketing trajectories that fixes the
        matching radius between outward and inward integration.
    """
    if N < 1 or int(N) != N:
        raise ValueError(f"dimension must be a positive integer, got {N}")
    N = int(N)
    if p <= 1:
        raise ValueError(f"exponent must exceed 1, got {p}")
    if p >= critical_exponent(N):
        raise Supercritical(f"p={p} >= (N+2)/(N-2)={critical_exponent(N)}")
    if tol <= 0:
        raise ValueError("tol must be positive")

    r_end = 80.0
    lo, hi = _find_bracket(N, p, r_end)
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        rtol = max(min(1e-6, 1e-2 * (hi - lo)), _RTOL_FLOOR)
        kind, _ = _shoot(mid, N, p, rtol, r_end)
        if kind == 1:
            hi = mid
        else:
            lo = mid

    rtol = max(tol / 10, _RTOL_FLOOR)
    _, sol_lo = _shoot(lo, N, p, rtol, r_end, dense=True)
    _, sol_hi = _shoot(hi, N, p, rtol, r_end, dense=True)
    r_stop = min(sol_lo.t[-1], sol_hi.t[-1])

    # matching radius: the two bracketing branches agree up to sep_tol
    probe = np.arange(dr, r_stop, dr)
    ya, yb = sol_lo.sol(probe), sol_hi.sol(probe)
    um = 0.5 * (ya[0] + yb[0])
    u0 = 0.5 * (lo + hi)
    bad = (np.abs(ya[0] - yb[0]) > sep_tol * np.abs(um)) | (um < 1e-9 * u0)
    i_match = int(np.argmax(bad)) - 1 if bad.any() else probe.size - 1
    if i_match < 1:
        raise NoBracket("bracketing trajectories separate before the tail regime")
    r_match = probe[i_match]
    u_match = um[i_match]

    # resolve the core, whose width scales like u0^{-(p-1)/2}
    dr = min(dr, 0.05 * u0 ** (-(p - 1) / 2))
    k_match, _ = _tail_shape(N, r_match)
    amp = u_match / k_match
    # linearised decay: u < 1e-12 u0 beyond r_max
    r_max = r_match
    while amp * _tail_shape(N, r_max)[0] >= 1e-12 * u0:
        r_max += 1.0
    n = int(math.ceil(r_max / dr))
    r_max = n * dr

    # Polish (u0, tail amplitude) so that the outward head and the inward
    # tail (the stable direction for the decaying mode) meet with matching
    # value and slope at r_match.
    def mismatch(x):
        head = _head_to(x[0], N, p, r_match, rtol)
        tail = _inward_tail(x[1], N, p, r_max, r_match, rtol)
        return (head(r_match) - tail(r_match)) / u_match, head, tail

    x = np.array([u0, amp])
    F, head_sol, tail_sol = mismatch(x)
    for _ in range(8):
        if np.max(np.abs(F)) < 1e-13:
            break
        # both columns by differences: for p near 1 the tail is still far
        # from linear in its amplitude at r_match
        step = 1e-7 * x[0]
        dhead = (_head_to(x[0] + step, N, p, r_match, rtol)(r_match)
                 - head_sol(r_match)) / step
        astep = 1e-7 * x[1]
        dtail = (_inward_tail(x[1] + astep, N, p, r_max, r_match, rtol)(r_match)
                 - tail_sol(r_match)) / astep
        jac = np.column_stack([dhead, -dtail]) / u_match
        x_new = x - np.linalg.solve(jac, F)
        # bisection already pins u0; keep the polish inside its bracket
        x_new[0] = min(max(x_new[0], lo), hi)
        F_new, h_new, t_new = mismatch(x_new)
        if np.max(np.abs(F_new)) >= np.max(np.abs(F)):
            break
        x, F, head_sol, tail_sol = x_new, F_new, h_new, t_new
    u0, amp = float(x[0]), float(x[1])

    r = np.linspace(0.0, r_max, n + 1)
    u = np.empty_like(r)
    du = np.empty_like(r)
    head = r <= r_match
    rh = np.maximum(r[head], 1e-4)
    u[head], du[head] = head_sol(rh)
    # the integrator starts at r0 = 1e-4; the series covers the origin
    u[0], du[0] = u0, 0.0
    u[~head], du[~head] = tail_sol(r[~head])

    window = r >= r_max / 2
    slope = np.polyfit(r[window], np.log(u[window] * r[window] ** ((N - 1) / 2)), 1)[0]

    return RadialProfile(
        dimension=N, exponent=float(p), r_nodes=r, u_values=u, du_values=du,
        u0=u0, r_max=r_max, decay_rate=-slope, r_match=float(r_match),
        tail_amplitude=float(amp), bracket=(lo, hi),
        _head=head_sol, _tail=tail_sol,
    )


def _head_to(u0, N, p, r_match, rtol):
    r0 = 1e-4
    sol = integrate.solve_ivp(
        _rhs(N, p), (r0, r_match), _series_start(u0, N, p, r0),
        method="DOP853", rtol=rtol, atol=1e-300, dense_output=True,
    )
    return sol.sol


def _inward_tail(amp, N, p, r_max, r_match, rtol):
    k, dk = _tail_shape(N, r_max)
    sol = integrate.solve_ivp(
        _rhs(N, p), (r_max, r_match), [amp * k, amp * dk],
        method="DOP853", rtol=rtol, atol=1e-300, dense_output=True,
    )
    return sol.sol


def _simpson(y, x):
    return integrate.simpson(y, x=x)


def profile_moments(prof):
    """Whole-space moments of Ū with weight |S^{N-1}| r^{N-1} dr."""
    N, p = prof.dimension, prof.exponent
    r, u, du = prof.r_nodes, prof.u_values, prof.du_values
    w = sphere_area(N) * r ** (N - 1)
    m_pp1 = _simpson(w * u ** (p + 1), r)
    m_grad2 = _simpson(w * du**2, r)
    m_sq = _simpson(w * u**2, r)
    return Moments(m_pp1=m_pp1, m_grad2=m_grad2, m_sq=m_sq,
                   c0_bar=(0.5 - 1.0 / (p + 1)) * m_pp1)


def radial_symmetry_moment(prof, i, kind="grad2", n=None):
    """First moment ∫ x_i |∇Ū|^2 (kind="grad2") or ∫ x_i Ū^2 (kind="sq").

    Computed by brute-force tensor quadrature on a box symmetric about the
    origin, so the result is zero up to rounding.
    """
    N = prof.dimension
    if not 0 <= i < N:
        raise ValueError(f"axis {i} out of range for N={N}")
    if n is None:
        n = {1: 4001, 2: 401}.get(N, 61)
    R = prof.r_max
    x = np.linspace(-R, R, n)
    w1 = np.full(n, x[1] - x[0])
    w1[[0, -1]] *= 0.5
    grids = np.meshgrid(*([x] * N), indexing="ij")
    rad = np.sqrt(sum(g**2 for g in grids))
    weight = np.ones_like(rad)
    for ax in range(N):
        shape = [1] * N
        shape[ax] = n
        weight = weight * w1.reshape(shape)
    if kind == "grad2":
        f = prof.derivative(rad) ** 2
    elif kind == "sq":
        f = prof(rad) ** 2
    else:
        raise ValueError(f"unknown moment kind {kind!r}")
    # pair +x_i with -x_i before summing so the odd part cancels exactly
    g = grids[i] * f * weight
    return float(np.sum(g + np.flip(g, axis=i)) / 2)
