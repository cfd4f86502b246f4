"""Damped Newton for the discrete Neumann problem, with ε-continuation
and spike location.

All fields live in original variables on a fixed grid.  The functional is

    f̃(u) = ½ uᵀ A u − 1/(p+1) Σ_i w_i (u_i)_+^{p+1},

and the rescaled value reported alongside is ε^{-N} f̃, which equals the
functional on Ω/ε evaluated at u(ε·).  Residual norms are the dual norm
of the gradient in the energy inner product, times ε^{-N/2}, i.e. the
H^1(Ω/ε)-dual norm of the rescaled gradient.
"""
from dataclasses import dataclass, field
import logging
import warnings

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import MatrixRankWarning, minres, splu

from .discretization import assemble
from .errors import CollapseToZero, FlatField, NoConvergence
from .profiles import evaluate_ansatz, scaled_profile

__all__ = ["SolveParams", "SpikeSolution", "energy", "rescaled_energy", "gradient",
           "jacobian", "residual_norm", "newton_solve", "continuation", "locate_spike",
           "linear_solve"]

log = logging.getLogger(__name__)


@dataclass
class SolveParams:
    eps: float = 0.2
    newton_tol: float = 1e-8
    max_iters: int = 30
    min_step: float = 1.0 / 64
    ladder: tuple = ()
    reference_height: float = None
    collapse_fraction: float = 0.1

    def __post_init__(self):
        if self.eps <= 0 or self.newton_tol <= 0:
            raise ValueError("eps and newton_tol must be positive")
        lad = tuple(float(e) for e in self.ladder)
        if any(b >= a for a, b in zip(lad, lad[1:])):
            raise ValueError(f"eps ladder must be strictly decreasing, got {lad}")
        self.ladder = lad


@dataclass
class SpikeSolution:
    u: np.ndarray
    eps: float
    residual: float
    location: np.ndarray
    height: float
    energy: float
    energy_rescaled: float
    iterations: int
    history: list = field(default_factory=list)

    def summary(self):
        return {"eps": self.eps, "location": self.location.tolist(), "height": self.height,
                "energy": self.energy, "energy_rescaled": self.energy_rescaled,
                "residual": self.residual, "iterations": self.iterations}


def energy(u, op):
    """f̃_ε(u) in original variables."""
    p = op.data.p
    up = np.maximum(u, 0.0)
    return float(0.5 * u @ (op.A @ u) - op.mass @ up ** (p + 1) / (p + 1))


def rescaled_energy(u, op):
    return energy(u, op) * op.eps ** (-op.grid.dim)


def gradient(u, op):
    """Discrete Euler-Lagrange residual  A u − M (u_+)^p."""
    p = op.data.p
    return op.A @ u - op.mass * np.maximum(u, 0.0) ** p


def jacobian(u, op):
    p = op.data.p
    return (op.A - sparse.diags(p * op.mass * np.maximum(u, 0.0) ** (p - 1))).tocsc()


def residual_norm(g, op):
    """Rescaled dual norm of a discrete gradient."""
    return op.dual_norm(g) * op.eps ** (-op.grid.dim / 2)


def linear_solve(mat, rhs):
    """Sparse LU; MINRES when the factorisation breaks down."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", MatrixRankWarning)
            return splu(sparse.csc_matrix(mat), permc_spec="MMD_AT_PLUS_A").solve(rhs)
    except (RuntimeError, MatrixRankWarning) as exc:
        log.warning("sparse LU failed (%s); falling back to MINRES", exc)
        x, info = minres(mat, rhs, rtol=1e-12, maxiter=20 * mat.shape[0])
        if info != 0:
            raise NoConvergence(f"MINRES fallback failed (info={info})")
        return x


def _reference_height(u0, op, params):
    if params.reference_height is not None:
        return params.reference_height
    top = float(np.max(u0))
    if top > 0:
        return top
    # any positive spike is at least V^{1/(p-1)} high at its centre
    return float(np.min(op.V_nodes)) ** (1 / (op.data.p - 1))


def newton_solve(u0, op, params=None):
    """Damped Newton on the discrete gradient, from ``u0``.

    Steps are halved (down to ``params.min_step``) until the residual
    norm decreases.  Raises CollapseToZero, with the converged solution
    attached, when the result lost its spike.
    """
    params = params or SolveParams(eps=op.eps)
    u = np.array(u0, dtype=float)
    g = gradient(u, op)
    r = residual_norm(g, op)
    history = [r]
    it = 0
    while r > params.newton_tol:
        if it >= params.max_iters:
            raise NoConvergence(f"Newton did not converge in {it} iterations at eps={op.eps}",
                                history, u)
        du = linear_solve(jacobian(u, op), -g)
        t = 1.0
        while True:
            trial = u + t * du
            g_trial = gradient(trial, op)
            r_trial = residual_norm(g_trial, op)
            if r_trial < (1 - 1e-4 * t) * r or t <= params.min_step:
                break
            t *= 0.5
        u, g, r = trial, g_trial, r_trial
        history.append(r)
        it += 1
    loc = locate_spike(u, op.grid) if np.max(u) > 0 else np.full(op.grid.dim, np.nan)
    sol = SpikeSolution(u=u, eps=op.eps, residual=r, location=loc, height=float(np.max(u)),
                        energy=energy(u, op), energy_rescaled=rescaled_energy(u, op),
                        iterations=it, history=history)
    if sol.height < params.collapse_fraction * _reference_height(u0, op, params):
        raise CollapseToZero(f"solution height {sol.height:.3g} collapsed at eps={op.eps}", sol)
    if np.min(u) < -1e-8 * sol.height:
        log.warning("converged solution has negative values (min %.3g)", np.min(u))
    return sol


def continuation(data, grid, Q0, ladder, base, params=None, solutions=None):
    """Solve down a decreasing ε-ladder, warm-starting each rung.

    The first rung starts from the spike ansatz at Q0; each later rung
    starts from the ansatz re-centred at the previous rung's spike
    location.  The previous field itself is a poor guess: at large ε the
    spike is widened and lowered by the boundary.  Completed rungs are
    appended to ``solutions`` as they finish, so a failure part-way
    leaves the finished rungs available.
    """
    params = params or SolveParams()
    ladder = [float(e) for e in ladder]
    if any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("eps ladder must be strictly decreasing")
    out = [] if solutions is None else solutions
    center = np.asarray(Q0, dtype=float)
    if _gamma_degenerate(center, data):
        warnings.warn(f"degenerate Γ at Q0={center.tolist()}: no location is selected at "
                      "leading order, the spike may drift", RuntimeWarning, stacklevel=2)
    for eps in ladder:
        op = assemble(grid, data, eps)
        prof = scaled_profile(Q0, data, base, eps)
        u0 = evaluate_ansatz(prof.moved(center), grid)
        rung = SolveParams(eps=eps, newton_tol=params.newton_tol, max_iters=params.max_iters,
                           min_step=params.min_step, reference_height=prof.height,
                           collapse_fraction=params.collapse_fraction)
        try:
            sol = newton_solve(u0, op, rung)
        except (NoConvergence, CollapseToZero) as exc:
            exc.args = (f"{exc.args[0]} (continuation rung eps={eps})",)
            raise
        out.append(sol)
        center = sol.location
    return out


def _gamma_degenerate(Q, data):
    from .gamma import classify, gamma, grad_gamma, hess_gamma
    g0 = abs(float(gamma(Q, data)))
    scale = data.domain.diameter
    if np.linalg.norm(grad_gamma(Q, data)) * scale > 1e-8 * g0:
        return False
    eigs = np.linalg.eigvalsh(hess_gamma(Q, data))
    return classify(eigs, scale_floor=1e-8 * g0 / scale**2) == "degenerate"


def locate_spike(u, grid):
    """Arg-max node refined by a three-point parabola along each axis."""
    u = np.asarray(u, dtype=float)
    k = int(np.argmax(u))
    if u[k] <= 0:
        raise FlatField("field has no positive maximum")
    x = np.array(grid.points[k], dtype=float)
    lat_idx = np.argwhere(grid.index == k)[0]
    for ax in range(grid.dim):
        i = lat_idx[ax]
        if i == 0 or i == grid.counts[ax] - 1:
            continue
        lo, hi = lat_idx.copy(), lat_idx.copy()
        lo[ax] -= 1
        hi[ax] += 1
        jl, jh = grid.index[tuple(lo)], grid.index[tuple(hi)]
        if jl < 0 or jh < 0:
            continue
        fm, f0, fp = u[jl], u[k], u[jh]
        denom = fm - 2 * f0 + fp
        if denom < 0:
            x[ax] += 0.5 * grid.spacing[ax] * (fm - fp) / denom
    return x
