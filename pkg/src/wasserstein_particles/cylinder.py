"""Cylinder functionals, the grid conditional expectation, and hat gradients.

A cylinder functional is a product of powers of linear functionals
``g -> <f, g>_{L2[0,1]}``.  Restricted to configurations through the grid
conditional expectation, ``<f, g_X>`` is an affine function of the particle
positions whose gradient is the triangular (hat) kernel average of f at the
grid points; everything downstream (Dirichlet-form estimates, divergences,
integration by parts) is built from those coefficients.

Integrals against step and piecewise-linear quantiles are exact up to
quadrature: closed form through the antiderivative when the test function
carries one, else a fixed 16-point Gauss-Legendre rule per linear piece
(exact for polynomial integrands up to degree 31, ~1e-15 for the smooth
corpus here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ParticleConfig
from .quantiles import QuantileStep
from .testfunctions import TestFunction

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = (_GL_X + 1.0) / 2.0   # nodes on [0,1]
_GL_W = _GL_W / 2.0


def gl_panel_integrate(fun, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of ``fun`` over each panel [a_k, b_k]."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    width = b - a
    nodes = a[..., None] + width[..., None] * _GL_X
    return width * (fun(nodes) @ _GL_W)


@dataclass(frozen=True)
class PiecewiseLinearQuantile:
    """Continuous piecewise-linear quantile with knots at i/N.

    ``knot_values`` has length N+1 with fixed endpoints 0 and 1; the grid
    conditional expectation of a stationary quantile path given its values
    at the interior knots.
    """

    knot_values: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.knot_values, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise ValueError("need at least the two boundary knots")
        if y[0] != 0.0 or y[-1] != 1.0:
            raise ValueError("boundary knot values must be 0 and 1")
        if np.any(np.diff(y) < 0) or np.any(y < 0) or np.any(y > 1):
            raise ValueError("knot values must be nondecreasing within [0,1]")
        y.setflags(write=False)
        object.__setattr__(self, "knot_values", y)

    @property
    def n(self) -> int:
        return self.knot_values.size - 1

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        n = self.n
        i = np.minimum((t * n).astype(int), n - 1)
        y = self.knot_values
        return y[i] + (t * n - i) * (y[i + 1] - y[i])


def condexp_quantile(x: ParticleConfig, n: int) -> PiecewiseLinearQuantile:
    """Linear interpolation of the configuration through the i/N grid."""
    if x.n != n:
        raise ValueError(f"config has N={x.n}, expected {n}")
    return PiecewiseLinearQuantile(np.concatenate([[0.0], x.positions, [1.0]]))


def inner_product(f: TestFunction, g) -> float:
    """<f, g>_{L2[0,1]} for a step or piecewise-linear quantile, exact."""
    if isinstance(g, QuantileStep):
        ends = np.concatenate([g.breakpoints[1:], [1.0]])
        if f.antiderivative is not None:
            pieces = f.antiderivative(ends) - f.antiderivative(g.breakpoints)
        else:
            pieces = gl_panel_integrate(f.f, g.breakpoints, ends)
        return float(np.dot(g.values, pieces))
    if isinstance(g, PiecewiseLinearQuantile):
        n = g.n
        grid = np.arange(n + 1) / n
        return float(np.sum(gl_panel_integrate(lambda t: f.f(t) * g(t),
                                               grid[:-1], grid[1:])))
    raise TypeError(f"unsupported quantile type {type(g)!r}")


def hat_gradient(f: TestFunction, n: int, i: int) -> float:
    """Partial derivative of X -> <f, g_X> in the i-th position.

    Equals the integral of f against the unit-mass triangular kernel of
    width 2/N centered at i/N, scaled by 1/N; independent of X.
    """
    if not 1 <= i <= n - 1:
        raise ValueError(f"need 1 <= i <= N-1, got i={i}, N={n}")
    lo, mid, hi = (i - 1) / n, i / n, (i + 1) / n
    up = gl_panel_integrate(lambda t: f.f(t) * (n * t - (i - 1)),
                            np.array([lo]), np.array([mid]))
    down = gl_panel_integrate(lambda t: f.f(t) * ((i + 1) - n * t),
                              np.array([mid]), np.array([hi]))
    return float(up[0] + down[0])


def hat_coefficients(f: TestFunction, n: int) -> tuple[float, np.ndarray]:
    """Affine representation <f, g_X> = c0 + sum_i c_i x_i.

    Returns (c0, c) with c of length N-1; c_i is ``hat_gradient(f, n, i)``
    and c0 the inner product at the all-zero configuration.
    """
    k = np.arange(n)
    width = 1.0 / n
    nodes = k[:, None] / n + width * _GL_X
    fv = f.f(nodes)
    # up[k]   = int over cell k of f(t) (Nt - k) dt      (rising edge of hat k+1)
    # down[k] = int over cell k of f(t) (k + 1 - Nt) dt  (falling edge of hat k)
    up = width * ((fv * (n * nodes - k[:, None])) @ _GL_W)
    down = width * ((fv * (k[:, None] + 1 - n * nodes)) @ _GL_W)
    return float(up[-1]), up[:-1] + down[1:]


@dataclass(frozen=True)
class CylinderFunctional:
    """Product of powers of linear functionals g -> <f_i, g>."""

    factors: tuple

    def __post_init__(self):
        factors = tuple((f, int(k)) for f, k in self.factors)
        for f, k in factors:
            if not isinstance(f, TestFunction):
                raise TypeError("factors must be (TestFunction, power) pairs")
            if k < 1:
                raise ValueError("powers must be positive integers")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def linear(cls, f: TestFunction) -> "CylinderFunctional":
        return cls(((f, 1),))

    @classmethod
    def constant_one(cls) -> "CylinderFunctional":
        """The empty product (w == 1)."""
        return cls(())

    def l_values(self, g) -> np.ndarray:
        return np.array([inner_product(f, g) for f, _ in self.factors])

    def evaluate(self, g) -> float:
        l = self.l_values(g)
        return float(np.prod([lv**k for lv, (_, k) in zip(l, self.factors)]))

    def value_and_factor_partials(self, l: np.ndarray) -> tuple[float, np.ndarray]:
        """u and du/dl_j at given factor values (product/chain rule)."""
        powers = np.array([k for _, k in self.factors], dtype=float)
        value = float(np.prod(l**powers)) if l.size else 1.0
        partials = np.empty_like(l)
        for j in range(l.size):
            rest = np.prod(np.delete(l, j) ** np.delete(powers, j))
            partials[j] = powers[j] * l[j] ** (powers[j] - 1.0) * rest
        return value, partials

    def gradient_l2(self, g) -> tuple[float, "GradientField"]:
        """u(g) and the L2 gradient (a finite combination of the f_i)."""
        l = self.l_values(g)
        value, partials = self.value_and_factor_partials(l)
        return value, GradientField(tuple(f for f, _ in self.factors), partials)

    def __repr__(self):
        terms = " ".join(f"l[{f.name}]^{k}" for f, k in self.factors) or "1"
        return f"CylinderFunctional({terms})"


@dataclass(frozen=True)
class GradientField:
    """A function sum_j coef_j f_j(t): the L2 gradient of a cylinder functional."""

    functions: tuple
    coefficients: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for f, c in zip(self.functions, self.coefficients):
            out = out + c * f.f(t)
        return out


@dataclass(frozen=True)
class VectorFieldSpec:
    """Vector field zeta(g, t) = w(g) * phi(g(t)) with phi vanishing at 0, 1."""

    w: CylinderFunctional
    phi: TestFunction

    def __post_init__(self):
        if not self.phi.vanishing_ends:
            raise ValueError("phi must vanish at the endpoints (vanishing_ends flag)")
