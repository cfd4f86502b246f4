"""Vertex-centred finite-volume discretisation of  -ε² div(J ∇u) + V u.

Each node owns the dual cell [x - h/2, x + h/2] clipped to Ω.  Fluxes cross
the faces between neighbouring nodes; faces on ∂Ω carry no flux, which is
the weak (natural) form of the homogeneous Neumann condition.  Boxes are
resolved exactly; balls use embedded-boundary cut cells whose volume and
face fractions are estimated on sub-cells (first-order cut cells).
"""
from dataclasses import dataclass, field
import itertools

import numpy as np
from scipy import sparse

from .errors import NonpositiveCoefficient, UnsupportedShape
from .problem import Ball, Box

__all__ = ["DomainGrid", "OperatorMatrix", "build_grid", "assemble", "write_triplets"]


@dataclass(frozen=True, eq=False)
class DomainGrid:
    """Active nodes of a tensor lattice over Ω with their dual-cell data.

    ``faces`` is a list, one per axis, of (a, b, T) arrays: node indices of
    neighbours along that axis and the face transmissibility
    area(face ∩ Ω) / h.  ``index`` maps lattice multi-indices to node
    numbers (-1 where the dual cell misses Ω).
    """

    spec: object
    counts: tuple
    axes: tuple
    spacing: np.ndarray
    index: np.ndarray
    points: np.ndarray
    weights: np.ndarray
    boundary: np.ndarray
    normals: np.ndarray
    faces: tuple = field(repr=False)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def n_nodes(self):
        return self.points.shape[0]

    @property
    def h(self):
        """Largest grid spacing."""
        return float(np.max(self.spacing))

    def to_lattice(self, u, fill=np.nan):
        """Scatter a nodal field onto the full lattice array."""
        out = np.full(self.counts, fill, dtype=float)
        active = self.index >= 0
        out[active] = np.asarray(u)[self.index[active]]
        return out

    def integrate(self, u):
        return float(self.weights @ u)


def _trapezoid_widths(n, h):
    w = np.full(n, h)
    w[[0, -1]] = 0.5 * h
    return w


def _box_grid(spec, counts):
    lo, hi = spec.bounds()
    axes = tuple(np.linspace(a, b, n) for a, b, n in zip(lo, hi, counts))
    spacing = np.array([(b - a) / (n - 1) for a, b, n in zip(lo, hi, counts)])
    N = len(counts)
    widths = [_trapezoid_widths(n, h) for n, h in zip(counts, spacing)]
    index = np.arange(np.prod(counts)).reshape(counts)
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, N)
    W = widths[0]
    for w in widths[1:]:
        W = np.multiply.outer(W, w)
    weights = W.reshape(-1)

    normals = np.zeros((pts.shape[0], N))
    for k in range(N):
        normals[:, k] -= np.isclose(pts[:, k], lo[k])
        normals[:, k] += np.isclose(pts[:, k], hi[k])
    boundary = np.any(normals != 0, axis=1)
    normals[boundary] /= np.linalg.norm(normals[boundary], axis=1, keepdims=True)

    faces = []
    for k in range(N):
        left = [slice(None)] * N
        right = [slice(None)] * N
        left[k], right[k] = slice(0, -1), slice(1, None)
        a = index[tuple(left)].reshape(-1)
        b = index[tuple(right)].reshape(-1)
        area = np.ones(1)
        for j in range(N):
            if j != k:
                area = np.multiply.outer(area, widths[j])
        # area varies only with the transverse coordinates
        shape = [counts[j] if j != k else 1 for j in range(N)]
        area = np.broadcast_to(area.reshape(shape), index[tuple(left)].shape).reshape(-1)
        faces.append((a, b, area / spacing[k]))
    return axes, spacing, index, pts, weights, boundary, normals, tuple(faces)


def _ramp(q, c, radius, widths):
    """Inside-fraction of small sub-cells centred at q, linear in the signed
    distance across the sub-cell's extent along the boundary normal."""
    d = q - c
    r = np.sqrt(np.sum(d * d, axis=-1))
    n = d / np.where(r > 0, r, 1.0)[..., None]
    extent = np.sum(np.abs(n) * widths, axis=-1)
    s = radius - r
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(extent > 0, 0.5 + s / extent, (s >= 0).astype(float))
    return np.clip(f, 0.0, 1.0)


def _ball_grid(spec, counts, sub):
    N = spec.dim
    lo, hi = spec.bounds()
    axes = tuple(np.linspace(a, b, n) for a, b, n in zip(lo, hi, counts))
    spacing = np.array([(b - a) / (n - 1) for a, b, n in zip(lo, hi, counts)])
    lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    c = np.array(spec.center)
    offs = (np.arange(sub) + 0.5) / sub - 0.5

    # volume fraction of each dual cell, clipped to the bounding box
    frac = np.zeros(counts)
    for o in itertools.product(offs, repeat=N):
        q = lattice + np.array(o) * spacing
        inbox = np.all((q >= lo) & (q <= hi), axis=-1)
        frac += _ramp(q, c, spec.radius, spacing / sub) * inbox
    frac /= sub**N
    cell = np.prod(spacing)
    active = frac > 0
    index = np.full(counts, -1, dtype=np.int64)
    index[active] = np.arange(active.sum())
    pts = lattice[active]
    weights = frac[active] * cell
    boundary = frac[active] < 1.0
    normals = np.zeros_like(pts)
    d = pts[boundary] - c
    nrm = np.linalg.norm(d, axis=1, keepdims=True)
    normals[boundary] = d / np.where(nrm > 0, nrm, 1.0)

    faces = []
    for k in range(N):
        left = [slice(None)] * N
        right = [slice(None)] * N
        left[k], right[k] = slice(0, -1), slice(1, None)
        mid = 0.5 * (lattice[tuple(left)] + lattice[tuple(right)])
        ap = np.zeros(mid.shape[:-1])
        other = [j for j in range(N) if j != k]
        for o in itertools.product(offs, repeat=N - 1):
            q = mid.copy()
            for j, oj in zip(other, o):
                q[..., j] += oj * spacing[j]
            w = spacing / sub
            w[k] = 0.0
            ap += _ramp(q, c, spec.radius, w)
        ap /= sub ** (N - 1)
        a = index[tuple(left)]
        b = index[tuple(right)]
        keep = (a >= 0) & (b >= 0) & (ap > 0)
        area = ap[keep] * np.prod(spacing[other]) if other else ap[keep]
        faces.append((a[keep], b[keep], area / spacing[k]))
    return axes, spacing, index, pts, weights, boundary, normals, tuple(faces)


def build_grid(spec, resolution, subsample=None):
    """Grid over a Box or Ball with ``resolution`` nodes per axis (int or
    per-axis tuple), at least 8 each."""
    if not isinstance(spec, (Box, Ball)):
        raise UnsupportedShape(f"no grid builder for {type(spec).__name__}")
    N = spec.dim
    counts = (int(resolution),) * N if np.isscalar(resolution) else tuple(int(n) for n in resolution)
    if len(counts) != N:
        raise ValueError(f"resolution has {len(counts)} entries, domain is {N}-dimensional")
    if min(counts) < 8:
        raise ValueError("need at least 8 nodes per axis")
    if isinstance(spec, Box):
        parts = _box_grid(spec, counts)
    else:
        parts = _ball_grid(spec, counts, subsample or (8 if N <= 2 else 4))
    axes, spacing, index, pts, weights, boundary, normals, faces = parts
    for arr in (index, pts, weights, boundary, normals):
        arr.setflags(write=False)
    return DomainGrid(spec=spec, counts=counts, axes=axes, spacing=spacing,
                      index=index, points=pts, weights=weights, boundary=boundary,
                      normals=normals, faces=faces)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrices of  a(u, v) = ∫ ε² J ∇u·∇v + ∫ V u v  on a grid.

    ``A = eps**2 * K + diag(weights * V)``; ``K`` is the flux part with unit
    ε; ``mass`` holds the lumped mass (the quadrature weights).
    """

    grid: DomainGrid
    data: object
    eps: float
    A: sparse.csr_matrix
    K: sparse.csr_matrix
    mass: np.ndarray
    J_nodes: np.ndarray
    V_nodes: np.ndarray
    face_coeffs: tuple = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def M(self):
        return sparse.diags(self.mass)

    def flux_apply(self, u):
        """K u accumulated face by face; exactly zero on constants."""
        out = np.zeros_like(u, dtype=float)
        for (a, b, _), tj in zip(self.grid.faces, self.face_coeffs):
            f = tj * (u[a] - u[b])
            np.add.at(out, a, f)
            np.add.at(out, b, -f)
        return out

    def apply(self, u):
        return self.eps**2 * self.flux_apply(u) + self.mass * self.V_nodes * u

    def A_solve(self, rhs):
        """Solve with A, reusing one sparse factorisation."""
        lu = self._cache.get("A_lu")
        if lu is None:
            from scipy.sparse.linalg import splu
            lu = splu(self.A.tocsc(), permc_spec="MMD_AT_PLUS_A")
            self._cache["A_lu"] = lu
        return lu.solve(np.asarray(rhs, dtype=float))

    def dual_norm(self, g):
        """sqrt(g^T A^{-1} g): the norm of a residual in the energy inner product."""
        return float(np.sqrt(max(g @ self.A_solve(g), 0.0)))

    def energy_norm(self, u):
        return float(np.sqrt(max(u @ (self.A @ u), 0.0)))


def assemble(grid, data, eps):
    """Assemble the Neumann operator for one ε on ``grid``.

    Face coefficients are harmonic means of nodal J.  Boundary faces do not
    exist in the face list, so no flux leaves Ω.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    Jn = np.asarray(data.J.value(grid.points), dtype=float)
    Vn = np.asarray(data.V.value(grid.points), dtype=float)
    if np.any(Jn <= 0) or np.any(Vn <= 0):
        raise NonpositiveCoefficient(
            f"J and V must be positive on the grid (min J={Jn.min()}, min V={Vn.min()})")
    n = grid.n_nodes
    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    coeffs = []
    for a, b, T in grid.faces:
        jf = 2 * Jn[a] * Jn[b] / (Jn[a] + Jn[b])
        tj = T * jf
        coeffs.append(tj)
        rows += [a, b]
        cols += [b, a]
        vals += [-tj, -tj]
        np.add.at(diag, a, tj)
        np.add.at(diag, b, tj)
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    K = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n, n))
    K.sum_duplicates()
    A = (eps**2 * K + sparse.diags(grid.weights * Vn)).tocsr()
    for arr in (Jn, Vn):
        arr.setflags(write=False)
    return OperatorMatrix(grid=grid, data=data, eps=float(eps), A=A, K=K,
                          mass=np.asarray(grid.weights), J_nodes=Jn, V_nodes=Vn,
                          face_coeffs=tuple(coeffs))


def write_triplets(matrix, path):
    """Dump a sparse matrix as 'row col value' lines (debug output)."""
    coo = sparse.coo_matrix(matrix)
    with open(path, "w") as fh:
        fh.write(f"# shape {coo.shape[0]} {coo.shape[1]} nnz {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v!r}\n")
