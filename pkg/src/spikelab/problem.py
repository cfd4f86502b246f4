"""Problem data: the coefficient fields J and V over a box or ball domain.

Coefficient fields are vectorised over points: ``value(x)`` takes an array
of shape (..., N) and returns shape (...); ``gradient`` returns (..., N) and
``hessian`` (..., N, N).  Built-in fields supply analytic derivatives; a
bare callable wrapped in :class:`CallableField` falls back to centred
differences with step ``h_c``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import NonpositiveCoefficient, OutsideDomain, UnsupportedShape
from .ground_state import critical_exponent

__all__ = [
    "CoefficientField",
    "Constant",
    "QuadraticWell",
    "GaussianBumps",
    "Polynomial",
    "CallableField",
    "Box",
    "Ball",
    "ProblemData",
    "make_field",
    "make_domain",
]


class CoefficientField:
    """Scalar field on R^N.  Subclasses override ``value`` and, when they
    can, ``gradient`` and ``hessian``; otherwise centred differences are
    used."""

    h_c = 1e-4
    analytic = False

    def value(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    def gradient(self, x):
        return fd_gradient(self.value, x, self.h_c)

    def hessian(self, x):
        return fd_hessian(self.value, x, self.h_c)

    def params(self):
        """Plain-data description used when writing resolved configs."""
        return {"kind": type(self).__name__}


def fd_gradient(f, x, h):
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    g = np.empty(x.shape)
    for i in range(N):
        e = np.zeros(N)
        e[i] = h
        g[..., i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def fd_hessian(f, x, h):
    x = np.asarray(x, dtype=float)
    N = x.shape[-1]
    H = np.empty(x.shape + (N,))
    f0 = f(x)
    for i in range(N):
        ei = np.zeros(N)
        ei[i] = h
        H[..., i, i] = (f(x + ei) - 2 * f0 + f(x - ei)) / h**2
        for j in range(i + 1, N):
            ej = np.zeros(N)
            ej[j] = h
            hij = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h**2)
            H[..., i, j] = H[..., j, i] = hij
    return H


class Constant(CoefficientField):
    analytic = True

    def __init__(self, c):
        self.c = float(c)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], self.c)

    def gradient(self, x):
        return np.zeros(np.shape(x))

    def hessian(self, x):
        x = np.asarray(x)
        return np.zeros(x.shape + (x.shape[-1],))

    def params(self):
        return {"kind": "constant", "value": self.c}


class QuadraticWell(CoefficientField):
    """base + curvature * |x - center|^2"""

    analytic = True

    def __init__(self, center, base=1.0, curvature=1.0):
        self.center = np.asarray(center, dtype=float)
        self.base = float(base)
        self.curvature = float(curvature)

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return self.base + self.curvature * np.sum(d * d, axis=-1)

    def gradient(self, x):
        return 2 * self.curvature * (np.asarray(x, dtype=float) - self.center)

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        N = x.shape[-1]
        return np.broadcast_to(2 * self.curvature * np.eye(N), x.shape + (N,)).copy()

    def params(self):
        return {"kind": "quadratic_well", "center": self.center.tolist(),
                "base": self.base, "curvature": self.curvature}


class GaussianBumps(CoefficientField):
    """base + sum_k a_k exp(-|x - c_k|^2 / (2 s_k^2)); negative a_k are wells."""

    analytic = True

    def __init__(self, base, amplitudes, centers, widths):
        self.base = float(base)
        self.amplitudes = np.atleast_1d(np.asarray(amplitudes, dtype=float))
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.widths = np.atleast_1d(np.asarray(widths, dtype=float))
        if not (len(self.amplitudes) == len(self.centers) == len(self.widths)):
            raise ValueError("bump parameter lists differ in length")

    def _terms(self, x):
        x = np.asarray(x, dtype=float)
        d = x[..., None, :] - self.centers           # (..., K, N)
        s2 = self.widths**2
        g = self.amplitudes * np.exp(-np.sum(d * d, axis=-1) / (2 * s2))
        return d, s2, g

    def value(self, x):
        _, _, g = self._terms(x)
        return self.base + g.sum(axis=-1)

    def gradient(self, x):
        d, s2, g = self._terms(x)
        return -np.sum((g / s2)[..., None] * d, axis=-2)

    def hessian(self, x):
        d, s2, g = self._terms(x)
        N = d.shape[-1]
        outer = d[..., :, None] * d[..., None, :] / s2[:, None, None] ** 2
        eye = np.eye(N) / s2[:, None, None]
        return np.sum(g[..., None, None] * (outer - eye), axis=-3)

    def params(self):
        return {"kind": "gaussian_bumps", "base": self.base,
                "amplitudes": self.amplitudes.tolist(),
                "centers": self.centers.tolist(), "widths": self.widths.tolist()}


class Polynomial(CoefficientField):
    """sum over terms of  coef * prod_i x_i^{k_i};  terms maps exponent tuples
    to coefficients."""

    analytic = True

    def __init__(self, terms):
        self.terms = {tuple(int(k) for k in e): float(c) for e, c in dict(terms).items()}
        dims = {len(e) for e in self.terms}
        if len(dims) != 1:
            raise ValueError("all exponent tuples must have the same length")

    @staticmethod
    def _mono(x, e):
        out = np.ones(x.shape[:-1])
        for i, k in enumerate(e):
            if k:
                out = out * x[..., i] ** k
        return out

    def _shifted(self, e, i):
        if e[i] == 0:
            return None, 0
        e2 = list(e)
        e2[i] -= 1
        return tuple(e2), e[i]

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c * self._mono(x, e) for e, c in self.terms.items())

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        g = np.zeros(x.shape)
        for e, c in self.terms.items():
            for i in range(len(e)):
                e1, k = self._shifted(e, i)
                if k:
                    g[..., i] += c * k * self._mono(x, e1)
        return g

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        N = x.shape[-1]
        H = np.zeros(x.shape + (N,))
        for e, c in self.terms.items():
            for i in range(N):
                e1, ki = self._shifted(e, i)
                if not ki:
                    continue
                for j in range(N):
                    e2, kj = self._shifted(e1, j)
                    if kj:
                        H[..., i, j] += c * ki * kj * self._mono(x, e2)
        return H

    def params(self):
        return {"kind": "polynomial",
                "terms": [[list(e), c] for e, c in sorted(self.terms.items())]}


class CallableField(CoefficientField):
    """Wrap ``f(x) -> values``; derivatives by centred differences."""

    def __init__(self, f, h_c=1e-4):
        self.f = f
        self.h_c = h_c

    def value(self, x):
        return np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float)


_FIELD_KINDS = {
    "constant": lambda d: Constant(d["value"]),
    "quadratic_well": lambda d: QuadraticWell(d["center"], d.get("base", 1.0), d.get("curvature", 1.0)),
    "gaussian_bumps": lambda d: GaussianBumps(d["base"], d["amplitudes"], d["centers"], d["widths"]),
    "polynomial": lambda d: Polynomial({tuple(e): c for e, c in d["terms"]}),
}


def make_field(spec):
    """Build a built-in field from its ``params()`` dictionary."""
    kind = spec.get("kind")
    if kind not in _FIELD_KINDS:
        raise ValueError(f"unknown coefficient kind {kind!r}; expected one of {sorted(_FIELD_KINDS)}")
    return _FIELD_KINDS[kind](spec)


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        if len(lo) != len(hi) or any(b <= a for a, b in zip(lo, hi)):
            raise ValueError(f"invalid box {lo} x {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def volume(self):
        return math.prod(b - a for a, b in zip(self.lower, self.upper))

    @property
    def diameter(self):
        return math.dist(self.lower, self.upper)

    def bounds(self):
        return np.array(self.lower), np.array(self.upper)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return np.all((x >= np.array(self.lower)) & (x <= np.array(self.upper)), axis=-1)

    def distance_to_boundary(self, x):
        x = np.asarray(x, dtype=float)
        d = np.minimum(x - np.array(self.lower), np.array(self.upper) - x)
        return np.min(d, axis=-1)

    def params(self):
        return {"shape": "box", "lower": list(self.lower), "upper": list(self.upper)}


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    @property
    def volume(self):
        N = self.dim
        return math.pi ** (N / 2) / math.gamma(N / 2 + 1) * self.radius**N

    @property
    def diameter(self):
        return 2 * self.radius

    def bounds(self):
        c = np.array(self.center)
        return c - self.radius, c + self.radius

    def contains(self, x):
        d = np.asarray(x, dtype=float) - np.array(self.center)
        return np.sum(d * d, axis=-1) <= self.radius**2

    def distance_to_boundary(self, x):
        d = np.asarray(x, dtype=float) - np.array(self.center)
        return self.radius - np.sqrt(np.sum(d * d, axis=-1))

    def normal(self, x):
        d = np.asarray(x, dtype=float) - np.array(self.center)
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def params(self):
        return {"shape": "ball", "center": list(self.center), "radius": self.radius}


def make_domain(spec):
    shape = spec.get("shape")
    if shape == "box":
        return Box(spec["lower"], spec["upper"])
    if shape == "ball":
        return Ball(spec["center"], spec["radius"])
    raise UnsupportedShape(f"unknown domain shape {shape!r}")


# ---------------------------------------------------------------- problem

@dataclass(frozen=True)
class ProblemData:
    """Everything that defines  -ε² div(J ∇u) + V u = u^p  in Ω, ∂_ν u = 0."""

    N: int
    p: float
    J: CoefficientField
    V: CoefficientField
    domain: object
    coercivity: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.domain.dim != self.N:
            raise ValueError(f"domain dimension {self.domain.dim} != N={self.N}")
        if self.p <= 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if self.p >= critical_exponent(self.N):
            raise ValueError(f"p={self.p} is not subcritical for N={self.N}")

    @property
    def theta(self):
        """Exponent of V in Γ: (p+1)/(p-1) - N/2."""
        return (self.p + 1) / (self.p - 1) - self.N / 2

    def check_point(self, Q):
        Q = np.asarray(Q, dtype=float)
        if Q.shape[-1] != self.N:
            raise ValueError(f"point has dimension {Q.shape[-1]}, expected {self.N}")
        if not np.all(self.domain.contains(Q)):
            raise OutsideDomain(f"point {Q.tolist()} lies outside the domain")
        return Q

    def validate(self, n=17):
        """Sample the coefficients and their Hessians on a lattice over the domain.

        Returns the recorded lower bounds and sup-norms; raises
        NonpositiveCoefficient when J or V is not bounded below by a
        positive constant on the samples.
        """
        lo, hi = self.domain.bounds()
        axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.N)
        pts = pts[self.domain.contains(pts)]
        Jv, Vv = self.J.value(pts), self.V.value(pts)
        if not np.all(np.isfinite(Jv)) or not np.all(np.isfinite(Vv)):
            raise NonpositiveCoefficient("J or V is not finite on the domain")
        info = {
            "min_J": float(Jv.min()), "min_V": float(Vv.min()),
            "max_J": float(Jv.max()), "max_V": float(Vv.max()),
            "max_hess_J": float(np.abs(self.J.hessian(pts)).max()),
            "max_hess_V": float(np.abs(self.V.hessian(pts)).max()),
        }
        if info["min_J"] <= 0 or info["min_V"] <= 0:
            raise NonpositiveCoefficient(
                f"coefficients must be positive: min J={info['min_J']}, min V={info['min_V']}")
        self.coercivity.update(info)
        return info

    def params(self):
        return {"N": self.N, "p": self.p, "J": self.J.params(),
                "V": self.V.params(), "domain": self.domain.params()}
