"""Discrete Lyapunov-Schmidt reduction about the translated spike U_P.

Working inner product: the energy's quadratic form ``op.A`` (ε²-weighted
J-gradient term plus V-mass).  The correction w solves

    ∇f̃(U + w) = Σ_i λ_i A z_i,      z_iᵀ A w = 0,

where z_i are the translation fields of :func:`tangent_basis`.  This is
the stationarity system of f̃(U + w) under N orthogonality constraints;
it is solved as a bordered (KKT) system by Newton, or by the frozen-
Jacobian contraction that mirrors the classical fixed-point argument.

Reported quantities are in rescaled units: energies times ε^{-N}, norms
and dual norms times ε^{-N/2}, derivatives with respect to the rescaled
centre P = Q/ε.
"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import IterationStall, NoConvergence
from .gamma import gamma, grad_gamma
from .profiles import evaluate_ansatz, scaled_profile, tangent_basis
from .solver import energy, gradient, jacobian

__all__ = ["CorrectionResult", "ReducedSample", "Spike", "ansatz_residual_norm",
           "solve_correction", "coercivity_estimate", "coercivity_report",
           "reduced_energy", "expansion_report", "loglog_slope"]

log = logging.getLogger(__name__)


class Spike:
    """Ansatz U_P at (Q, ε) together with its tangent fields.

    ``amplitude_scale`` multiplies the ansatz (and its tangent fields);
    anything but 1 moves U off the manifold of translated spikes, which
    is only useful as a negative control.
    """

    def __init__(self, Q, op, base, tangent_h=None, amplitude_scale=1.0):
        self.op = op
        self.Q = np.asarray(Q, dtype=float)
        self.profile = scaled_profile(self.Q, op.data, base, op.eps)
        self.U = amplitude_scale * evaluate_ansatz(self.profile, op.grid)
        self.basis = tangent_basis(self.profile, op.grid, h=tangent_h, inner=op.A)
        self.Z = amplitude_scale * self.basis.fields
        self.C = op.A @ self.Z.T                  # n x N constraint columns
        self.G = self.Z @ self.C                  # raw Gram in the A inner product

    def project(self, w):
        """A-orthogonal projection off span{z_i}."""
        return w - self.Z.T @ np.linalg.solve(self.G, self.C.T @ w)

    def multipliers(self, g):
        """λ with  g - C λ  A^{-1}-orthogonal to span{C}."""
        return np.linalg.solve(self.G, self.Z @ g)


def factorize(mat):
    """Sparse LU with a symmetric fill-reducing ordering."""
    return splu(sparse.csc_matrix(mat), permc_spec="MMD_AT_PLUS_A")


class BorderedSolver:
    """Solves  [[J, -C], [-Cᵀ, 0]] [x; μ] = [r; 0]  through the Schur
    complement S = Cᵀ J⁻¹ C, reusing a sparse factorisation of J.

    Bordering J with the dense columns C directly would wreck the
    sparsity of the LU factors.
    """

    def __init__(self, lu, C):
        self.lu = lu
        self.C = C
        self.JC = lu.solve(np.asarray(C))
        self.S = C.T @ self.JC

    def solve(self, r):
        y = self.lu.solve(r)
        mu = -np.linalg.solve(self.S, self.C.T @ y)
        return y + self.JC @ mu


def _scale(op):
    return op.eps ** (-op.grid.dim / 2)


def ansatz_residual_norm(Q, op, base):
    """‖∇f_ε(U_P)‖ in the H^1(Ω/ε)-dual norm.

    Original-variable dual norm sqrt(gᵀ A^{-1} g) times ε^{-N/2}.
    """
    U = evaluate_ansatz(scaled_profile(Q, op.data, base, op.eps), op.grid)
    return op.dual_norm(gradient(U, op)) * _scale(op)


@dataclass
class CorrectionResult:
    w: np.ndarray
    multipliers: np.ndarray
    w_norm: float
    iterations: int
    ansatz_residual: float
    projected_residual: float
    orthogonality: float
    history: list = field(default_factory=list)
    spike: object = field(default=None, repr=False)

    @property
    def u(self):
        return self.spike.U + self.w


def _projected_residual(sp, g):
    lam = sp.multipliers(g)
    return sp.op.dual_norm(g - sp.C @ lam) * _scale(sp.op), lam


def solve_correction(Q, op, base, tol=1e-9, w0=None, mode="newton", max_iter=40,
                     spike=None, damping=None, factor=None):
    """Correction w(ε, Q) orthogonal to the tangent space.

    mode="newton" refactorises the Jacobian at every step (projected
    Newton on the KKT system).  mode="chord" keeps one factorisation,
    by default of the Jacobian at the bare ansatz, which is the classical
    contraction w <- w - L⁻¹ P ∇f(U + w); a factorisation computed
    elsewhere can be passed as ``factor``.  For p < 2 the Jacobian is only
    Hölder continuous and chord steps, damped by ``damping`` (default
    0.8), are always used.
    """
    sp = spike or Spike(Q, op, base)
    p = op.data.p
    if mode == "contraction":
        mode = "chord"
    if mode not in ("newton", "chord"):
        raise ValueError(f"unknown mode {mode!r}")
    if p < 2:
        mode = "chord"
    if damping is None:
        damping = 0.8 if p < 2 else 1.0
    n = op.grid.n_nodes
    N = op.grid.dim
    w = np.zeros(n) if w0 is None else sp.project(np.asarray(w0, dtype=float))

    g_U = gradient(sp.U, op)
    ans_res = op.dual_norm(g_U) * _scale(op)
    g = gradient(sp.U + w, op) if w0 is not None else g_U
    res, lam = _projected_residual(sp, g)
    history = [res]
    kkt = None
    if mode == "chord":
        kkt = BorderedSolver(factor or factorize(jacobian(sp.U, op)), sp.C)
    it = 0
    stalls = 0
    while res > tol:
        if it >= max_iter:
            raise NoConvergence(f"correction did not converge at Q={sp.Q.tolist()}, eps={op.eps}",
                                history, w)
        rhs = -(g - sp.C @ lam)
        if mode == "newton":
            step = BorderedSolver(factorize(jacobian(sp.U + w, op)), sp.C).solve(rhs)
            t = 1.0
            while True:
                trial = sp.project(w + t * step)
                g_t = gradient(sp.U + trial, op)
                r_t, lam_t = _projected_residual(sp, g_t)
                if r_t < res or t < 1e-3:
                    break
                t *= 0.5
            stalls = stalls + 1 if not r_t < res else 0
            if stalls >= 3:
                raise NoConvergence(f"Newton stalled at Q={sp.Q.tolist()}, eps={op.eps}",
                                    history, w)
        else:
            trial = sp.project(w + damping * kkt.solve(rhs))
            g_t = gradient(sp.U + trial, op)
            r_t, lam_t = _projected_residual(sp, g_t)
            stalls = stalls + 1 if not r_t < res else 0
            if stalls >= 3:
                raise NoConvergence(f"chord iteration stalled at Q={sp.Q.tolist()}, eps={op.eps}",
                                    history, w)
        w, g, res, lam = trial, g_t, r_t, lam_t
        history.append(res)
        it += 1

    ortho = np.abs(sp.C.T @ w) / (np.sqrt(max(w @ (op.A @ w), 1e-300)) * np.sqrt(np.diag(sp.G)))
    return CorrectionResult(
        w=w, multipliers=lam * op.eps ** (-N), w_norm=op.energy_norm(w) * _scale(op),
        iterations=it, ansatz_residual=ans_res, projected_residual=res,
        orthogonality=float(np.max(ortho)) if w.any() else 0.0, history=history, spike=sp,
    )


def _block_inverse(solve, Jac, A, project, n, block, want, tol, max_iter, seed):
    """Eigenpairs of  Jac v = μ A v  of smallest |μ| by block inverse
    iteration with Rayleigh-Ritz in the A inner product.  Stops when the
    ``want`` smallest Ritz values have settled; the spare block vectors
    only speed up convergence."""
    rng = np.random.default_rng(seed)
    X = project(rng.standard_normal((n, block)))
    prev = None
    for it in range(max_iter):
        Y = project(solve(A @ X))
        B = Y.T @ (A @ Y)
        L = np.linalg.cholesky(0.5 * (B + B.T))
        Yo = Y @ np.linalg.inv(L).T
        T = Yo.T @ (Jac @ Yo)
        mu, V = np.linalg.eigh(0.5 * (T + T.T))
        order = np.argsort(np.abs(mu))
        mu, V = mu[order], V[:, order]
        X = Yo @ V
        cur = np.abs(mu[:want])
        if prev is not None and np.all(np.abs(cur - prev) <= tol * cur.max()):
            return mu, X, it + 1
        prev = cur
    raise IterationStall(f"inverse iteration did not settle in {max_iter} steps")


def coercivity_report(Q, op, base, block=4, tol=1e-8, max_iter=300, seed=0,
                      amplitude_scale=1.0):
    """Spectral picture of the linearisation at the ansatz U_P.

    ``estimate`` is the smallest |μ| of  D²f(U_P) v = μ A v  restricted to
    the A-orthogonal complement of the tangent fields: the constant of
    ‖L v‖ ≥ C ‖v‖ in the A norm.  ``free`` holds the smallest |μ| without
    the restriction (the N translation modes sit there), and
    ``tangent_rayleigh`` the Rayleigh quotients of the tangent fields.
    """
    sp = Spike(Q, op, base, amplitude_scale=amplitude_scale)
    n = op.grid.n_nodes
    N = op.grid.dim
    Jac = jacobian(sp.U, op)
    lu = factorize(Jac)
    kkt = BorderedSolver(lu, sp.C)
    solve_c = kkt.solve

    def project(X):
        return X - sp.Z.T @ np.linalg.solve(sp.G, sp.C.T @ X)

    mu, _, its = _block_inverse(solve_c, Jac, op.A, project, n, block, 1, tol, max_iter, seed)
    nu, _, _ = _block_inverse(lu.solve, Jac, op.A, lambda X: X,
                              n, N + 2, N, tol, max_iter, seed + 1)
    rq = np.array([(z @ (Jac @ z)) / (z @ (op.A @ z)) for z in sp.Z])
    return {"estimate": float(abs(mu[0])), "ritz": mu, "iterations": its,
            "free": nu, "tangent_rayleigh": rq}


def coercivity_estimate(Q, op, base, **kw):
    """Lower bound C with ‖L_{ε,Q} v‖ ≥ C ‖v‖ on the tangent complement."""
    return coercivity_report(Q, op, base, **kw)["estimate"]


@dataclass
class ReducedSample:
    Q: np.ndarray
    eps: float
    A_eps: float
    grad_A: np.ndarray
    gamma_value: float
    c0_gamma: float
    diagnostics: dict = field(default_factory=dict)
    correction: object = field(default=None, repr=False)

    @property
    def gap(self):
        return self.A_eps - self.c0_gamma

    def grad_ratio(self, data, c0):
        """‖∇_P A_ε‖ / (ε c0 ‖∇Γ(Q)‖)."""
        gg = np.linalg.norm(grad_gamma(self.Q, data))
        if gg == 0:
            return math.nan
        return float(np.linalg.norm(self.grad_A) / (self.eps * c0 * gg))


def _reduced_value(Q, op, base, tol, w0, factor):
    try:
        corr = solve_correction(Q, op, base, tol=tol, w0=w0, mode="chord", factor=factor)
    except NoConvergence as exc:
        log.info("chord iteration failed (%s); retrying with Newton", exc)
        corr = solve_correction(Q, op, base, tol=tol, w0=w0, mode="newton")
    return energy(corr.u, op) * op.eps ** (-op.grid.dim), corr


def reduced_energy(Q, op, base, c0, tol=1e-9, h_Q=None, with_gradient=True,
                   with_coercivity=False):
    """A_ε(Q) = f_ε(U_{Q/ε} + w(ε, Q)) with its gradient in the rescaled centre.

    ``grad_A`` is ε times the centred difference of A_ε in Q with step
    h_Q = max(1e-3, ε²); each shifted centre gets its own correction.
    All corrections iterate with the Jacobian factorised once at U_{Q/ε}
    and fall back to full Newton if that stalls.
    """
    Q = np.asarray(Q, dtype=float)
    data = op.data
    eps = op.eps
    sp = Spike(Q, op, base)
    factor = factorize(jacobian(sp.U, op))
    A, corr = _reduced_value(Q, op, base, tol, None, factor)
    grad = np.full(data.N, np.nan)
    if with_gradient:
        h_Q = max(1e-3, eps**2) if h_Q is None else h_Q
        for i in range(data.N):
            e = np.zeros(data.N)
            e[i] = h_Q
            Ap, _ = _reduced_value(Q + e, op, base, tol, corr.w, factor)
            Am, _ = _reduced_value(Q - e, op, base, tol, corr.w, factor)
            grad[i] = eps * (Ap - Am) / (2 * h_Q)
    gval = float(gamma(Q, data))
    diag = {"ansatz_residual": corr.ansatz_residual, "w_norm": corr.w_norm,
            "correction_iterations": corr.iterations,
            "projected_residual": corr.projected_residual}
    diag["coercivity"] = coercivity_estimate(Q, op, base) if with_coercivity else math.nan
    return ReducedSample(Q=Q, eps=eps, A_eps=float(A), grad_A=grad, gamma_value=gval,
                         c0_gamma=c0 * gval, diagnostics=diag, correction=corr)


def loglog_slope(eps, values, last=4):
    """Least-squares slope of log|values| against log ε over the last rungs.

    Returns (slope, rms residual of the fit).
    """
    x = np.log(np.asarray(eps, dtype=float)[-last:])
    y = np.log(np.abs(np.asarray(values, dtype=float)[-last:]))
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return float(coef[0]), rms


def expansion_report(data, grid, base, c0, points, ladder, tol=1e-9, with_coercivity=True):
    """Rows of A_ε(Q) against c0 Γ(Q) over sample points and an ε-ladder.

    Failures at a point are recorded with ``status`` set to the error name
    and NaN values, instead of aborting the sweep.
    """
    from .discretization import assemble
    rows = []
    for eps in ladder:
        op = assemble(grid, data, eps)
        for Q in np.atleast_2d(points):
            row = {"Q": np.asarray(Q, dtype=float), "eps": float(eps)}
            try:
                s = reduced_energy(Q, op, base, c0, tol=tol, with_coercivity=with_coercivity)
                row.update(A_eps=s.A_eps, c0_gamma=s.c0_gamma, gap=s.gap,
                           grad_ratio=s.grad_ratio(data, c0),
                           ansatz_residual=s.diagnostics["ansatz_residual"],
                           w_norm=s.diagnostics["w_norm"],
                           coercivity=s.diagnostics["coercivity"], status="ok")
            except Exception as exc:  # noqa: BLE001 - sweep keeps going, row flagged
                log.warning("expansion sample failed at Q=%s eps=%s: %s", Q, eps, exc)
                row.update(A_eps=math.nan, c0_gamma=c0 * float(gamma(Q, data)), gap=math.nan,
                           grad_ratio=math.nan, ansatz_residual=math.nan, w_norm=math.nan,
                           coercivity=math.nan, status=type(exc).__name__)
            rows.append(row)
    return rows
