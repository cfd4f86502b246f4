"""Scaled spike U^Q(y) = V(Q)^{1/(p-1)} Ū(y sqrt(V(Q)/J(Q))) and its translates,
sampled in original variables as U^Q((x - Q)/ε)."""
from dataclasses import dataclass
import warnings

import numpy as np

from .errors import DegenerateBasis, NonpositiveCoefficient, ResolutionWarning

__all__ = ["SpikeProfile", "TangentBasis", "scaled_profile", "evaluate_ansatz",
           "tangent_basis", "h1_matrix", "check_resolution"]


@dataclass(frozen=True)
class SpikeProfile:
    center: np.ndarray
    amplitude: float
    inv_length: float
    base: object
    epsilon: float = 1.0

    @property
    def length(self):
        """Spike width ε sqrt(J(Q)/V(Q)) in original units."""
        return self.epsilon / self.inv_length

    @property
    def height(self):
        return self.amplitude * self.base.u0

    def __call__(self, x, center=None):
        c = self.center if center is None else np.asarray(center, dtype=float)
        d = np.asarray(x, dtype=float) - c
        r = np.sqrt(np.sum(d * d, axis=-1)) * self.inv_length / self.epsilon
        return self.amplitude * self.base(r)

    def with_epsilon(self, eps):
        return SpikeProfile(self.center, self.amplitude, self.inv_length, self.base, float(eps))

    def moved(self, center):
        """Same shape (amplitude, width) translated to ``center``."""
        return SpikeProfile(np.asarray(center, dtype=float), self.amplitude,
                            self.inv_length, self.base, self.epsilon)


def scaled_profile(Q, data, base, eps=1.0):
    """Spike centred at Q solving  -J(Q)Δu + V(Q)u = u^p  in rescaled variables."""
    Q = data.check_point(Q)
    if base.dimension != data.N or base.exponent != data.p:
        raise ValueError(f"profile is for (N={base.dimension}, p={base.exponent}), "
                         f"problem has (N={data.N}, p={data.p})")
    Jq, Vq = float(data.J.value(Q)), float(data.V.value(Q))
    if Jq <= 0 or Vq <= 0:
        raise NonpositiveCoefficient(f"J(Q)={Jq}, V(Q)={Vq}")
    return SpikeProfile(center=Q.copy(), amplitude=Vq ** (1 / (data.p - 1)),
                        inv_length=float(np.sqrt(Vq / Jq)), base=base, epsilon=float(eps))


def check_resolution(prof, grid, factor=3.0):
    """Warn when the spike width spans fewer than ``factor`` grid spacings."""
    if prof.length < factor * grid.h:
        warnings.warn(
            f"spike width {prof.length:.3g} is below {factor:g} grid spacings ({grid.h:.3g})",
            ResolutionWarning, stacklevel=3)
        return False
    return True


def evaluate_ansatz(prof, grid, center=None):
    """Nodal values of the spike on ``grid``."""
    check_resolution(prof, grid)
    return prof(grid.points, center)


def h1_matrix(grid, eps):
    """ε-weighted H^1 Gram matrix  ε² ∫∇u·∇v + ∫uv  (unit coefficients)."""
    from scipy import sparse
    n = grid.n_nodes
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for a, b, T in grid.faces:
        rows += [a, b]
        cols += [b, a]
        vals += [-T, -T]
        np.add.at(diag, a, T)
        np.add.at(diag, b, T)
    K = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n, n))
    return (eps**2 * (K + sparse.diags(diag)) + sparse.diags(grid.weights)).tocsr()


@dataclass(frozen=True, eq=False)
class TangentBasis:
    """Translation derivatives ∂_{P_i} U_P on the grid (rows of ``fields``).

    ``gram`` is in rescaled units (original-variable Gram times ε^{-N}).
    """

    fields: np.ndarray
    gram: np.ndarray
    inner: object
    cond: float

    def project_out(self, w):
        """Remove the span of the basis from w, orthogonally in ``inner``."""
        Z = self.fields
        coef = np.linalg.solve(self.raw_gram, Z @ (self.inner @ w))
        return w - coef @ Z

    @property
    def raw_gram(self):
        Z = self.fields
        return Z @ (self.inner @ Z.T)


def tangent_basis(prof, grid, h=None, inner=None):
    """Centred differences of the translated spike in the centre coordinate.

    ``h`` defaults to a twentieth of the spike width.  ``inner`` is the
    sparse Gram operator of the working inner product (default: the
    ε-weighted H^1 form).  Fields are multiplied by ε so they approximate
    derivatives with respect to the rescaled centre P = Q/ε.
    """
    eps = prof.epsilon
    if h is None:
        h = 0.05 * prof.length
    if h <= 0:
        raise ValueError("h must be positive")
    if inner is None:
        inner = h1_matrix(grid, eps)
    N = grid.dim
    Z = np.empty((N, grid.n_nodes))
    for i in range(N):
        e = np.zeros(N)
        e[i] = h
        Z[i] = eps * (prof(grid.points, prof.center + e) - prof(grid.points, prof.center - e)) / (2 * h)
    raw = Z @ (inner @ Z.T)
    raw = 0.5 * (raw + raw.T)
    eig = np.linalg.eigvalsh(raw)
    cond = np.inf if eig[0] <= 0 else eig[-1] / eig[0]
    if cond > 1e12:
        raise DegenerateBasis(f"tangent Gram matrix condition number {cond:.3g}")
    return TangentBasis(fields=Z, gram=raw * eps ** (-N), inner=inner, cond=float(cond))
