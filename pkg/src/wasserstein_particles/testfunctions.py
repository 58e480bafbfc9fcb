"""Smooth test functions on [0,1] with explicit derivatives.

Two roles: observables f for the measure-valued diagnostics (these need the
reflecting boundary condition f'(0) = f'(1) = 0) and vector-field profiles
phi for the divergence calculus (these vanish at the endpoints).  All
evaluators are vectorized over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_FLAG_TOL = 1e-12


@dataclass(frozen=True)
class TestFunction:
    """A C^3 function on [0,1] bundled with its first three derivatives.

    ``antiderivative`` (when available) makes integrals against step
    functions closed-form; otherwise fixed Gauss-Legendre panels are used.
    ``sup_d1``/``sup_d2``/``sup_d3`` are exact sup-norm bounds of the
    derivatives where known.
    """

    name: str
    f: Callable
    d1: Callable
    d2: Callable
    d3: Callable
    antiderivative: Callable | None = None
    neumann: bool = False
    vanishing_ends: bool = False
    sup_d1: float | None = None
    sup_d2: float | None = None
    sup_d3: float | None = None

    def __post_init__(self):
        if self.neumann:
            if abs(self.d1(0.0)) > _FLAG_TOL or abs(self.d1(1.0)) > _FLAG_TOL:
                raise ValueError(f"{self.name}: neumann flag but f' does not vanish at 0,1")
        if self.vanishing_ends:
            if abs(self.f(0.0)) > _FLAG_TOL or abs(self.f(1.0)) > _FLAG_TOL:
                raise ValueError(f"{self.name}: vanishing_ends flag but f(0), f(1) != 0")

    def __call__(self, t):
        return self.f(t)

    def __repr__(self):
        return f"TestFunction({self.name})"


def constant(c: float = 1.0) -> TestFunction:
    return TestFunction(
        name=f"constant:{c:g}",
        f=lambda t, c=c: np.full_like(np.asarray(t, dtype=float), c),
        d1=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d2=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d3=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        antiderivative=lambda t, c=c: c * np.asarray(t, dtype=float),
        neumann=True, sup_d1=0.0, sup_d2=0.0, sup_d3=0.0)


def identity() -> TestFunction:
    return TestFunction(
        name="identity",
        f=lambda t: np.asarray(t, dtype=float),
        d1=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        d2=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d3=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        antiderivative=lambda t: np.asarray(t, dtype=float) ** 2 / 2,
        sup_d1=1.0, sup_d2=0.0, sup_d3=0.0)


def square() -> TestFunction:
    return TestFunction(
        name="square",
        f=lambda t: np.asarray(t, dtype=float) ** 2,
        d1=lambda t: 2 * np.asarray(t, dtype=float),
        d2=lambda t: np.full_like(np.asarray(t, dtype=float), 2.0),
        d3=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        antiderivative=lambda t: np.asarray(t, dtype=float) ** 3 / 3,
        sup_d1=2.0, sup_d2=2.0, sup_d3=0.0)


def cosine(k: int = 1) -> TestFunction:
    """cos(k pi t): the workhorse reflecting-boundary observable."""
    w = k * math.pi
    return TestFunction(
        name=f"cos:{k}",
        f=lambda t, w=w: np.cos(w * np.asarray(t, dtype=float)),
        d1=lambda t, w=w: -w * np.sin(w * np.asarray(t, dtype=float)),
        d2=lambda t, w=w: -w * w * np.cos(w * np.asarray(t, dtype=float)),
        d3=lambda t, w=w: w**3 * np.sin(w * np.asarray(t, dtype=float)),
        antiderivative=lambda t, w=w: np.sin(w * np.asarray(t, dtype=float)) / w,
        neumann=True, sup_d1=w, sup_d2=w * w, sup_d3=w**3)


def exponential() -> TestFunction:
    e = math.e
    return TestFunction(
        name="exp",
        f=lambda t: np.exp(np.asarray(t, dtype=float)),
        d1=lambda t: np.exp(np.asarray(t, dtype=float)),
        d2=lambda t: np.exp(np.asarray(t, dtype=float)),
        d3=lambda t: np.exp(np.asarray(t, dtype=float)),
        antiderivative=lambda t: np.exp(np.asarray(t, dtype=float)),
        sup_d1=e, sup_d2=e, sup_d3=e)


def bump_quad() -> TestFunction:
    """t(1-t), the simplest profile vanishing at both ends."""
    return TestFunction(
        name="bump_quad",
        f=lambda t: np.asarray(t, dtype=float) * (1 - np.asarray(t, dtype=float)),
        d1=lambda t: 1 - 2 * np.asarray(t, dtype=float),
        d2=lambda t: np.full_like(np.asarray(t, dtype=float), -2.0),
        d3=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        antiderivative=lambda t: np.asarray(t, dtype=float) ** 2 / 2
        - np.asarray(t, dtype=float) ** 3 / 3,
        vanishing_ends=True, sup_d1=1.0, sup_d2=2.0, sup_d3=0.0)


def bump_quartic() -> TestFunction:
    """t^2 (1-t)^2; flat at both ends."""
    def f(t):
        t = np.asarray(t, dtype=float)
        return (t * (1 - t)) ** 2

    def d1(t):
        t = np.asarray(t, dtype=float)
        return 2 * t - 6 * t**2 + 4 * t**3

    def d2(t):
        t = np.asarray(t, dtype=float)
        return 2 - 12 * t + 12 * t**2

    def d3(t):
        t = np.asarray(t, dtype=float)
        return -12 + 24 * t

    def anti(t):
        t = np.asarray(t, dtype=float)
        return t**3 / 3 - t**4 / 2 + t**5 / 5

    return TestFunction(name="bump_quartic", f=f, d1=d1, d2=d2, d3=d3,
                        antiderivative=anti, vanishing_ends=True, neumann=True,
                        sup_d1=math.sqrt(3) / 9, sup_d2=2.0, sup_d3=12.0)


def bump_sine(k: int = 1) -> TestFunction:
    """sin(k pi t)/(k pi); vanishes at the ends with |phi'| <= 1."""
    w = k * math.pi
    return TestFunction(
        name=f"bump_sine:{k}",
        f=lambda t, w=w: np.sin(w * np.asarray(t, dtype=float)) / w,
        d1=lambda t, w=w: np.cos(w * np.asarray(t, dtype=float)),
        d2=lambda t, w=w: -w * np.sin(w * np.asarray(t, dtype=float)),
        d3=lambda t, w=w: -w * w * np.cos(w * np.asarray(t, dtype=float)),
        antiderivative=lambda t, w=w: -np.cos(w * np.asarray(t, dtype=float)) / w**2,
        vanishing_ends=True, sup_d1=1.0, sup_d2=w, sup_d3=w * w)


def bump_skew() -> TestFunction:
    """t(1-t)(2-t)/2; an asymmetric vanishing-ends profile."""
    def f(t):
        t = np.asarray(t, dtype=float)
        return (2 * t - 3 * t**2 + t**3) / 2

    def d1(t):
        t = np.asarray(t, dtype=float)
        return (2 - 6 * t + 3 * t**2) / 2

    def d2(t):
        t = np.asarray(t, dtype=float)
        return 3 * (t - 1)

    def d3(t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, 3.0)

    def anti(t):
        t = np.asarray(t, dtype=float)
        return (t**2 - t**3 + t**4 / 4) / 2

    return TestFunction(name="bump_skew", f=f, d1=d1, d2=d2, d3=d3,
                        antiderivative=anti, vanishing_ends=True,
                        sup_d1=1.0, sup_d2=3.0, sup_d3=3.0)


_BUILDERS = {
    "constant": lambda arg: constant(float(arg) if arg else 1.0),
    "identity": lambda arg: identity(),
    "square": lambda arg: square(),
    "cos": lambda arg: cosine(int(arg) if arg else 1),
    "exp": lambda arg: exponential(),
    "bump_quad": lambda arg: bump_quad(),
    "bump_quartic": lambda arg: bump_quartic(),
    "bump_sine": lambda arg: bump_sine(int(arg) if arg else 1),
    "bump_skew": lambda arg: bump_skew(),
}


def from_name(spec: str) -> TestFunction:
    """Resolve a serialized function name like ``cos:2`` or ``bump_quad``."""
    head, _, arg = spec.strip().partition(":")
    try:
        return _BUILDERS[head](arg)
    except KeyError:
        raise ValueError(f"unknown test function {spec!r}") from None
