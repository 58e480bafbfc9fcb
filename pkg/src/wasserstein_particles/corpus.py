"""Shipped test corpora and their serialization formats.

Quantile steps serialize as ``breakpoint:value`` pairs joined by semicolons
(one quantile per line); cylinder functionals as ``name^power`` factors
joined by ``*`` with ``1`` for the empty product; test functions by the
registry names in ``testfunctions``.

The step-quantile corpus is built for the discrete-to-continuum sweeps: all
quantiles start at value 0 and end at value 1 (matching the support of the
invariant law), and every jump location is an irrational whose distance to
all dyadic grids i/N, N <= 4096, exceeds 6e-5, so difference quotients never
straddle a grid point ambiguously.
"""

from __future__ import annotations

import importlib.resources

import numpy as np

from .cylinder import CylinderFunctional, VectorFieldSpec
from .quantiles import QuantileStep
from .testfunctions import TestFunction, from_name


def serialize_quantile(g: QuantileStep) -> str:
    return ";".join(f"{float(b)!r}:{float(v)!r}"
                    for b, v in zip(g.breakpoints, g.values))


def parse_quantile(line: str) -> QuantileStep:
    pairs = [tok.split(":") for tok in line.strip().split(";") if tok]
    b = np.array([float(p[0]) for p in pairs])
    v = np.array([float(p[1]) for p in pairs])
    return QuantileStep(b, v)


def serialize_cylinder(u: CylinderFunctional) -> str:
    if not u.factors:
        return "1"
    return "*".join(f.name + (f"^{k}" if k > 1 else "") for f, k in u.factors)


def parse_cylinder(line: str) -> CylinderFunctional:
    line = line.strip()
    if line == "1":
        return CylinderFunctional(())
    factors = []
    for tok in line.split("*"):
        name, _, power = tok.partition("^")
        factors.append((from_name(name), int(power) if power else 1))
    return CylinderFunctional(tuple(factors))


def _data_lines(filename: str) -> list[str]:
    text = (importlib.resources.files("wasserstein_particles.data") / filename).read_text()
    return [ln for ln in (raw.strip() for raw in text.splitlines())
            if ln and not ln.startswith("#")]


def quantile_corpus() -> list[QuantileStep]:
    return [parse_quantile(ln) for ln in _data_lines("quantile_corpus.txt")]


def phi_corpus() -> list[TestFunction]:
    return [from_name(ln) for ln in _data_lines("phi_corpus.txt")]


def cylinder_corpus() -> list[CylinderFunctional]:
    return [parse_cylinder(ln) for ln in _data_lines("cylinder_corpus.txt")]


def ibp_pairs() -> list[tuple[CylinderFunctional, VectorFieldSpec]]:
    """The ten (functional, vector field) pairs used by the residual suite."""
    u_specs = ["cos:1", "identity^2", "exp", "cos:1*cos:2", "1"]
    field_specs = [("1", "bump_quad"), ("identity", "bump_sine:1"),
                   ("cos:1", "bump_skew"), ("identity", "bump_quad")]
    pairs = []
    for i, u_spec in enumerate(u_specs):
        for j, (w_spec, phi_spec) in enumerate(field_specs):
            if (i + j) % 2 == 0:
                pairs.append((parse_cylinder(u_spec),
                              VectorFieldSpec(parse_cylinder(w_spec),
                                              from_name(phi_spec))))
    return pairs
