"""The concentration function Γ(Q) = V(Q)^θ J(Q)^{N/2},  θ = (p+1)/(p-1) - N/2,
its derivatives, and a Newton search for its critical points."""
from dataclasses import dataclass
import logging

import numpy as np

from .errors import BoundaryEscape, NoConvergence, NonpositiveCoefficient
from .problem import fd_gradient, fd_hessian

__all__ = ["CriticalPoint", "gamma", "grad_gamma", "hess_gamma",
           "find_critical_points", "gamma_on_lattice", "lattice_extrema"]

log = logging.getLogger(__name__)

# relative eigenvalue threshold below which a critical point is degenerate
DEGENERACY_RTOL = 1e-8


def _coeffs(Q, data, check=True):
    if check:
        Q = data.check_point(Q)
    else:
        Q = np.asarray(Q, dtype=float)
    Jv, Vv = data.J.value(Q), data.V.value(Q)
    if np.any(Jv <= 0) or np.any(Vv <= 0):
        raise NonpositiveCoefficient(f"J or V not positive at {np.asarray(Q).tolist()}")
    return Q, Jv, Vv


def gamma(Q, data, check=True):
    """Γ at one point or an array of points of shape (..., N)."""
    _, Jv, Vv = _coeffs(Q, data, check)
    return Vv**data.theta * Jv ** (data.N / 2)


def grad_gamma(Q, data, method="analytic", h_c=1e-4, check=True):
    """∇Γ by the chain rule, or by centred differences (method="fd")."""
    if method == "fd":
        if check:
            data.check_point(Q)
        return fd_gradient(lambda x: gamma(x, data, check=False), Q, h_c)
    Q, Jv, Vv = _coeffs(Q, data, check)
    G = Vv**data.theta * Jv ** (data.N / 2)
    g = data.theta * data.V.gradient(Q) / Vv[..., None] + 0.5 * data.N * data.J.gradient(Q) / Jv[..., None]
    return G[..., None] * g


def hess_gamma(Q, data, method="analytic", h_c=1e-4, check=True):
    """Hessian of Γ; analytic chain rule or second centred differences."""
    if method == "fd":
        if check:
            data.check_point(Q)
        return fd_hessian(lambda x: gamma(x, data, check=False), Q, h_c)
    Q, Jv, Vv = _coeffs(Q, data, check)
    th, half_n = data.theta, 0.5 * data.N
    G = Vv**th * Jv**half_n
    dV, dJ = data.V.gradient(Q), data.J.gradient(Q)
    HV, HJ = data.V.hessian(Q), data.J.hessian(Q)
    Vb, Jb = Vv[..., None], Jv[..., None]
    g = th * dV / Vb + half_n * dJ / Jb
    outer = lambda a, b: a[..., :, None] * b[..., None, :]
    dg = (th * (HV / Vb[..., None] - outer(dV, dV) / (Vb**2)[..., None])
          + half_n * (HJ / Jb[..., None] - outer(dJ, dJ) / (Jb**2)[..., None]))
    return G[..., None, None] * (outer(g, g) + dg)


@dataclass(frozen=True)
class CriticalPoint:
    location: np.ndarray
    value: float
    gradient_norm: float
    hessian_eigs: np.ndarray
    kind: str                 # "min" | "max" | "saddle" | "degenerate"
    isolated_strict: bool
    iterations: int = 0


def classify(eigs, scale_floor=0.0):
    """Kind of a critical point from its Hessian eigenvalues."""
    eigs = np.asarray(eigs)
    top = np.max(np.abs(eigs)) if eigs.size else 0.0
    if top <= scale_floor or np.min(np.abs(eigs)) < max(DEGENERACY_RTOL * top, scale_floor):
        return "degenerate"
    if np.all(eigs > 0):
        return "min"
    if np.all(eigs < 0):
        return "max"
    return "saddle"


def _sphere_directions(N):
    dirs = list(np.eye(N)) + list(-np.eye(N))
    # add the cube diagonals so saddles along off-axis directions show up
    for signs in np.ndindex(*([2] * N)):
        d = np.where(np.array(signs) == 0, -1.0, 1.0)
        dirs.append(d / np.sqrt(N))
    return np.array(dirs)


def _is_isolated_strict(Q, kind, data, radius):
    if kind not in ("min", "max"):
        return False
    pts = Q + radius * _sphere_directions(data.N)
    pts = pts[data.domain.contains(pts)]
    g0 = gamma(Q, data, check=False)
    vals = gamma(pts, data, check=False)
    return bool(np.all(vals > g0)) if kind == "min" else bool(np.all(vals < g0))


def _newton(seed, data, tol, max_iter):
    Q = np.array(seed, dtype=float)
    g = grad_gamma(Q, data, check=False)
    gn = np.linalg.norm(g)
    history = [gn]
    for it in range(max_iter):
        if gn < tol:
            return Q, gn, it
        H = hess_gamma(Q, data, check=False)
        step = np.linalg.lstsq(H, -g, rcond=None)[0]
        t = 1.0
        for _ in range(40):
            trial = Q + t * step
            g_trial = grad_gamma(trial, data, check=False)
            if np.linalg.norm(g_trial) < gn:
                break
            t *= 0.5
        else:
            raise NoConvergence(f"line search stalled from seed {list(seed)}", history, Q)
        Q, g, gn = trial, g_trial, np.linalg.norm(g_trial)
        history.append(gn)
        if not data.domain.contains(Q):
            raise BoundaryEscape(f"Newton iterate {Q.tolist()} left the domain (seed {list(seed)})")
    if gn < tol:
        return Q, gn, max_iter
    raise NoConvergence(f"no convergence from seed {list(seed)}", history, Q)


def find_critical_points(data, seeds, tol=1e-10, max_iter=60, failures=None):
    """Critical points of Γ reached by damped Newton from each seed.

    Converged points closer than 10*tol are merged.  Seeds that fail
    (NoConvergence, BoundaryEscape) are logged and, when ``failures`` is a
    list, appended to it as ``(seed, exception)`` pairs.
    """
    found = []
    diam = data.domain.diameter
    for seed in np.atleast_2d(np.asarray(seeds, dtype=float)):
        data.check_point(seed)
        try:
            Q, gn, its = _newton(seed, data, tol, max_iter)
        except (NoConvergence, BoundaryEscape) as exc:
            log.info("critical point search: %s", exc)
            if failures is not None:
                failures.append((seed, exc))
            continue
        if any(np.linalg.norm(Q - c.location) < 10 * tol for c in found):
            continue
        eigs = np.linalg.eigvalsh(hess_gamma(Q, data, check=False))
        g0 = float(gamma(Q, data, check=False))
        # absolute floor: curvature invisible at the domain's length scale
        kind = classify(eigs, scale_floor=1e-8 * abs(g0) / diam**2)
        found.append(CriticalPoint(
            location=Q, value=g0, gradient_norm=float(gn), hessian_eigs=eigs,
            kind=kind, isolated_strict=_is_isolated_strict(Q, kind, data, 1e-3 * diam),
            iterations=its,
        ))
    return found


def gamma_on_lattice(data, k):
    """Γ on a k^N lattice over the domain's bounding box (points outside Ω
    are NaN).  Returns (axes, values)."""
    lo, hi = data.domain.bounds()
    axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = np.full(pts.shape[:-1], np.nan)
    inside = data.domain.contains(pts)
    vals[inside] = gamma(pts[inside], data, check=False)
    return axes, vals


def lattice_extrema(axes, vals, kind="min"):
    """Strict interior local minima (or maxima) of a lattice function, by
    comparison with all 3^N - 1 neighbours.  Brute force, used as an oracle."""
    sign = 1.0 if kind == "min" else -1.0
    v = sign * vals
    N = v.ndim
    core = tuple(slice(1, -1) for _ in range(N))
    mask = np.isfinite(v[core])
    for off in np.ndindex(*([3] * N)):
        if all(o == 1 for o in off):
            continue
        sl = tuple(slice(o, o + s - 2) for o, s in zip(off, v.shape))
        nb = v[sl]
        mask &= np.isfinite(nb) & (v[core] < nb)
    idx = np.argwhere(mask) + 1
    return np.array([[axes[d][i[d]] for d in range(N)] for i in idx])
