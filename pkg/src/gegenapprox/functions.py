"""Registry of built-in target functions.

Evaluators take one coordinate array per dimension and broadcast them, so
``f(x1[:, None], x2[None, :])`` fills a tensor grid without materializing
the mesh.  The isotropic built-ins are functions g(s) of s = sum x_j^2 and
carry their complex continuation and the location of the singularity of g.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .bounds import region_context
from .polycore import DomainError, eval_poly


@dataclass(frozen=True)
class TargetFunction:
    name: str
    evaluator: Callable
    dimension: int
    # h^2 such that g(s) is singular at s = -h^2 (isotropic built-ins only)
    singular_h2: Optional[float] = None
    radial: Optional[Callable] = None
    regularity: Optional[tuple] = None
    params: dict = field(default_factory=dict)

    def __call__(self, *coords):
        if len(coords) != self.dimension:
            raise DomainError(f"{self.name} expects {self.dimension} coordinates")
        return self.evaluator(*coords)

    @property
    def analyticity(self):
        """Region context with the largest admissible h (singular on its boundary)."""
        if self.singular_h2 is None:
            return None
        return region_context(math.sqrt(self.singular_h2))

    def at_points(self, pts):
        """Evaluate at the rows of an (M, d) array."""
        pts = np.asarray(pts, dtype=float)
        return np.asarray(self.evaluator(*pts.T), dtype=float)

    @property
    def complex_evaluator(self):
        if self.radial is None:
            return None
        g = self.radial

        def ev(*coords):
            return g(sum(np.asarray(c, dtype=complex) ** 2 for c in coords))

        return ev

    @property
    def singular_distance(self):
        """Distance from sum z_j^2 to the singular point of g."""
        if self.singular_h2 is None:
            return None
        h2 = self.singular_h2

        def dist(z):
            z = np.asarray(z, dtype=complex)
            return np.abs(np.sum(z ** 2, axis=-1) + h2)

        return dist


def _isotropic(name, g_real, g_complex, h2, d, params):
    def ev(*coords):
        return g_real(sum(np.asarray(c, dtype=float) ** 2 for c in coords))

    return TargetFunction(name, ev, d, singular_h2=h2, radial=g_complex, params=params)


def _f1(d):
    return _isotropic("f1", lambda s: np.sqrt(s + 0.5), lambda s: np.sqrt(s + 0.5 + 0j), 0.5, d, {})


def _f2(d):
    return _isotropic("f2", lambda s: 1.0 / (s + 1.0), lambda s: 1.0 / (s + 1.0), 1.0, d, {})


def _runge(h, d):
    h = float(h)
    if h <= 0:
        raise DomainError("runge needs h > 0")
    h2 = h * h
    return _isotropic(f"runge({h:g})", lambda s: 1.0 / (s + h2), lambda s: 1.0 / (s + h2), h2, d, {"h": h})


def _poly_test(d):
    if d != 2:
        raise DomainError("poly_test is bivariate")

    def ev(x1, x2):
        return eval_poly(0.5, 2, x1) * eval_poly(0.5, 3, x2)

    return TargetFunction("poly_test", ev, 2, params={})


def _const(d):
    def ev(*coords):
        return np.ones(np.broadcast_shapes(*(np.shape(c) for c in coords)))

    return TargetFunction("const", ev, d, radial=lambda s: np.ones_like(s), params={})


def _x1(d):
    def ev(*coords):
        return np.broadcast_to(np.asarray(coords[0], dtype=float),
                               np.broadcast_shapes(*(np.shape(c) for c in coords))).copy()

    return TargetFunction("x1", ev, d, params={})


def sobolev_order(s):
    """Largest integer m with d^m/dx^m |x|^s square integrable near 0, i.e. m < s + 1/2."""
    return int(math.ceil(s + 0.5)) - 1


def _finite_reg(s, d):
    s = float(s)
    if s <= 0:
        raise DomainError("finite_reg needs s > 0")

    def ev(*coords):
        out = 1.0
        for c in coords:
            out = out * np.abs(np.asarray(c, dtype=float)) ** s
        return out

    m = sobolev_order(s)
    return TargetFunction(f"finite_reg({s:g})", ev, d, regularity=(m,) * d, params={"s": s})


_REGISTRY = {
    "f1": lambda d=2, **kw: _f1(d),
    "f2": lambda d=2, **kw: _f2(d),
    "runge": lambda d=2, h=1.0, **kw: _runge(h, d),
    "poly_test": lambda d=2, **kw: _poly_test(d),
    "const": lambda d=2, **kw: _const(d),
    "x1": lambda d=2, **kw: _x1(d),
    "finite_reg": lambda d=2, s=3.5, **kw: _finite_reg(s, d),
}

BUILTIN_NAMES = tuple(_REGISTRY)


def parse_function_spec(spec):
    """'runge(0.5)' -> ('runge', {'h': 0.5}); 'finite_reg(3.5, 2)' -> s and d."""
    spec = spec.strip()
    if "(" not in spec:
        return spec, {}
    name, rest = spec.split("(", 1)
    if not rest.endswith(")"):
        raise DomainError(f"malformed function spec {spec!r}")
    args = [a.strip() for a in rest[:-1].split(",") if a.strip()]
    name = name.strip()
    vals = [float(a) for a in args]
    if name == "runge" and len(vals) == 1:
        return name, {"h": vals[0]}
    if name == "finite_reg" and 1 <= len(vals) <= 2:
        kw = {"s": vals[0]}
        if len(vals) == 2:
            kw["d"] = int(vals[1])
        return name, kw
    raise DomainError(f"unexpected arguments in {spec!r}")


def builtin_function(name, **params):
    """Look up a built-in by name, e.g. ``builtin_function('runge', h=0.5)``.

    ``name`` may also carry its arguments: ``'runge(0.5)'``.
    """
    base, parsed = parse_function_spec(name)
    parsed.update(params)
    if base not in _REGISTRY:
        raise KeyError(f"unknown built-in function {base!r}; known: {', '.join(BUILTIN_NAMES)}")
    return _REGISTRY[base](**parsed)
