"""Expansion coefficients by tensor-product Gauss quadrature, projection
evaluation and uniform-error measurement.

The coefficient transform samples f once on the n_1 x ... x n_d Gauss grid
and contracts one axis at a time with the 1D matrix
V[k, i] = w_i C_k(x_i) / h_k, so the cost is O(d K n^d) instead of
O(|Lambda| n^d).
"""

import csv
from dataclasses import dataclass, field
import io
import math

import numpy as np

from .indexsets import IndexSet, ResourceCapError
from .polycore import DomainError, as_family, eval_all, gauss_rule, norm_constants

NORMALIZATIONS = ("gegenbauer", "chebyshev_T", "legendre", "legendre_normalized")
QUAD_GUARD = 17
DEFAULT_GRID_CAP = 10 ** 8
DEFAULT_DIM_CAP = 4
NOISE_FLOOR = 1e-16
LOG10_CLAMP = -16.0
ERROR_SEED = 0x5EED


def default_normalization(lam):
    if lam == 0.0:
        return "chebyshev_T"
    if lam == 0.5:
        return "legendre"
    return "gegenbauer"


def _check_normalization(lam, normalization):
    if normalization not in NORMALIZATIONS:
        raise DomainError(f"unknown normalization {normalization!r}")
    if normalization == "chebyshev_T" and lam != 0.0:
        raise DomainError("chebyshev_T normalization needs lam = 0")
    if normalization in ("legendre", "legendre_normalized") and lam != 0.5:
        raise DomainError(f"{normalization} normalization needs lam = 1/2")
    if normalization == "gegenbauer" and lam == 0.0:
        raise DomainError("lam = 0 coefficients use the chebyshev_T normalization")


def legendre_scale(keys):
    """prod_j sqrt(k_j + 1/2): the factor between a_k and the normalized a-bar_k."""
    keys = np.asarray(keys, dtype=float)
    return np.prod(np.sqrt(keys + 0.5), axis=-1)


@dataclass(frozen=True)
class CoefficientTable:
    lam: float
    normalization: str
    keys: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_normalization(self.lam, self.normalization)
        keys = np.asarray(self.keys, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if keys.ndim != 2 or len(keys) != len(vals):
            raise ValueError("keys must be (n, d) with one value per row")
        keys.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "values", vals)

    @property
    def d(self):
        return self.keys.shape[1]

    def __len__(self):
        return len(self.keys)

    @property
    def entries(self):
        return {tuple(int(v) for v in k): float(a) for k, a in zip(self.keys, self.values)}

    @property
    def at_noise_floor(self):
        """Mask of coefficients too small to be distinguished from rounding."""
        return np.abs(self.values) < NOISE_FLOOR

    def get(self, k, default=0.0):
        hit = np.flatnonzero(np.all(self.keys == np.asarray(k), axis=1))
        return float(self.values[hit[0]]) if len(hit) else default

    def convert(self, normalization):
        """Switch between the legendre and legendre_normalized conventions."""
        if normalization == self.normalization:
            return self
        pair = {self.normalization, normalization}
        if pair != {"legendre", "legendre_normalized"}:
            raise DomainError(f"cannot convert {self.normalization} to {normalization}")
        s = legendre_scale(self.keys)
        vals = self.values / s if normalization == "legendre_normalized" else self.values * s
        return CoefficientTable(self.lam, normalization, self.keys, vals, dict(self.meta))

    def basis_values(self):
        """Coefficients with respect to the unnormalized C_k (or T_k) basis."""
        if self.normalization == "legendre_normalized":
            return self.values * legendre_scale(self.keys)
        return self.values

    def dense(self):
        """Dense tensor of basis coefficients over the bounding box of the keys."""
        if len(self.keys) == 0:
            return np.zeros((1,) * self.d)
        shape = tuple(int(m) + 1 for m in self.keys.max(axis=0))
        out = np.zeros(shape)
        out[tuple(self.keys.T)] = self.basis_values()
        return out

    def to_csv(self, header=None):
        buf = io.StringIO()
        for line in header or ():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"k_{j + 1}" for j in range(self.d)] + ["value", "log10abs"])
        with np.errstate(divide="ignore"):
            logs = np.maximum(np.log10(np.abs(self.values)), LOG10_CLAMP)
        for k, a, la in zip(self.keys.tolist(), self.values, logs):
            w.writerow(k + [repr(float(a)), f"{round(float(la), 6) + 0.0:.6f}"])
        return buf.getvalue()


def _quad_orders(quad_order, kmax):
    d = len(kmax)
    if quad_order is None:
        orders = [int(k) + QUAD_GUARD for k in kmax]
    elif np.ndim(quad_order) == 0:
        orders = [int(quad_order)] * d
    else:
        orders = [int(n) for n in quad_order]
        if len(orders) != d:
            raise DomainError("quad_order needs one entry per dimension")
    for n, k in zip(orders, kmax):
        if n < k + 1:
            raise DomainError(f"quad_order {n} is too small for degree {k} (need >= {k + 1})")
    return orders


def analysis_matrix(fam, kmax, rule):
    """V[k, i] = w_i C_k(x_i) / h_k for k = 0..kmax."""
    vals = eval_all(fam, kmax, rule.nodes)
    return vals * rule.weights[None, :] / norm_constants(fam, kmax)[:, None]


def grid_values(f, rules):
    """f sampled on the tensor grid of the rules' nodes, as a dense array."""
    d = len(rules)
    coords = []
    for j, r in enumerate(rules):
        shape = [1] * d
        shape[j] = r.order
        coords.append(r.nodes.reshape(shape))
    vals = np.asarray(f(*coords), dtype=float)
    return np.broadcast_to(vals, tuple(r.order for r in rules))


def contract_modes(F, mats):
    """Apply mats[j] along axis j of F, one axis at a time (fixed order)."""
    A = F
    for j, M in enumerate(mats):
        A = np.moveaxis(np.tensordot(M, A, axes=([1], [j])), 0, j)
    return A


def compute_coefficients(f, fam, iset, quad_order=None, normalization=None,
                         grid_cap=DEFAULT_GRID_CAP, dim_cap=DEFAULT_DIM_CAP):
    """Coefficients a_k = (1/h_k) int f C_k w for every k in ``iset``.

    ``quad_order`` is an int or one int per dimension; the default is the
    largest degree in that dimension plus 17.  ``normalization`` defaults to
    chebyshev_T for lam = 0, legendre for lam = 1/2 and gegenbauer otherwise;
    ``legendre_normalized`` gives a-bar_k = a_k / prod sqrt(k_j + 1/2).
    """
    fam = as_family(fam)
    lam = fam.lam
    normalization = normalization or default_normalization(lam)
    _check_normalization(lam, normalization)
    d = iset.d
    if d != f.dimension:
        raise DomainError(f"index set has d={d} but {f.name} has d={f.dimension}")
    if d > dim_cap:
        raise ResourceCapError(f"d={d} exceeds the dimension cap {dim_cap}")
    kmax = [int(k) for k in iset.max_degrees]
    orders = _quad_orders(quad_order, kmax)
    if math.prod(orders) > grid_cap:
        raise ResourceCapError(f"quadrature grid of {math.prod(orders)} points exceeds cap {grid_cap}")

    rules = [gauss_rule(fam, n) for n in orders]
    F = grid_values(f, rules)
    if not np.all(np.isfinite(F)):
        raise FloatingPointError(f"{f.name} is not finite on the quadrature grid")
    mats = [analysis_matrix(fam, k, r) for k, r in zip(kmax, rules)]
    A = contract_modes(F, mats)
    vals = A[tuple(iset.keys.T)] if len(iset) else np.zeros(0)
    if normalization == "legendre_normalized":
        vals = vals / legendre_scale(iset.keys)
    meta = {"function": f.name, "quad_order": orders, "q": iset.q, "N": iset.N}
    return CoefficientTable(lam, normalization, iset.keys, vals, meta)


def naive_coefficients(f, fam, keys, quad_order):
    """Per-coefficient quadrature sum, used to cross-check the contraction."""
    fam = as_family(fam)
    keys = np.asarray(keys, dtype=np.int64)
    d = keys.shape[1]
    orders = _quad_orders(quad_order, keys.max(axis=0))
    rules = [gauss_rule(fam, n) for n in orders]
    F = np.asarray(grid_values(f, rules))
    out = np.empty(len(keys))
    for i, k in enumerate(keys):
        w = np.ones(())
        for j in range(d):
            vals = eval_all(fam, int(k[j]), rules[j].nodes)[k[j]]
            w = np.multiply.outer(w, rules[j].weights * vals / norm_constants(fam, int(k[j]))[-1])
        out[i] = np.sum(F * w)
    return out


def evaluate_projection(tab, x, chunk=4096):
    """Sum of a_k C_k(x) over the table at a point (d,) or points (M, d)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x.reshape(-1, tab.d)
    if np.any(np.abs(pts) > 1.0):
        raise DomainError("projection is evaluated on [-1, 1]^d")
    if len(tab) == 0:
        out = np.zeros(len(pts))
        return float(out[0]) if single else out
    A = tab.dense()
    fam = as_family(tab.lam)
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        p = pts[start:start + chunk]
        # T[m, ...] carries the partially contracted tensor for point m
        P = eval_all(fam, A.shape[0] - 1, p[:, 0])
        T = np.tensordot(P.T, A, axes=([1], [0]))
        for j in range(1, tab.d):
            P = eval_all(fam, A.shape[j] - 1, p[:, j])
            T = np.einsum("mk...,km->m...", T, P)
        out[start:start + chunk] = T
    return float(out[0]) if single else out


def evaluate_projection_grid(tab, grids):
    """Projection on the tensor grid grids[0] x ... x grids[d-1]."""
    if len(grids) != tab.d:
        raise DomainError("need one grid per dimension")
    A = tab.dense()
    fam = as_family(tab.lam)
    mats = [eval_all(fam, A.shape[j] - 1, np.asarray(g, dtype=float)).T for j, g in enumerate(grids)]
    return contract_modes(A, mats)


def chebyshev_extreme_points(n):
    """cos(j pi / (n - 1)), j = 0..n-1, in ascending order."""
    return np.cos(np.pi * np.arange(n - 1, -1, -1) / (n - 1))


@dataclass(frozen=True)
class GridSpec:
    kind: str = "auto"
    points: int = 501
    samples: int = 100_000
    seed: int = ERROR_SEED

    def resolve(self, d):
        kind = self.kind
        if kind == "auto":
            kind = "tensor" if d <= 2 else "random"
        if kind not in ("tensor", "random"):
            raise DomainError(f"unknown grid kind {kind!r}")
        return kind

    def describe(self, d):
        kind = self.resolve(d)
        if kind == "tensor":
            return f"tensor chebyshev {self.points}^{d}"
        return f"random uniform M={self.samples} seed={self.seed:#x}"


def sup_error(f, tab, grid_spec=None):
    """max |f - Pi f| over the error grid."""
    spec = grid_spec or GridSpec()
    d = tab.d
    if spec.resolve(d) == "tensor":
        g = chebyshev_extreme_points(spec.points)
        approx = evaluate_projection_grid(tab, [g] * d)
        exact = grid_values(f, [_Nodes(g)] * d)
        return float(np.max(np.abs(exact - approx)))
    rng = np.random.default_rng(spec.seed)
    pts = rng.uniform(-1.0, 1.0, size=(spec.samples, d))
    return float(np.max(np.abs(f.at_points(pts) - evaluate_projection(tab, pts))))


class _Nodes:
    """Adapter so grid_values can sample on an arbitrary 1D grid."""

    def __init__(self, nodes):
        self.nodes = nodes
        self.order = len(nodes)


def fit_slope(x, y):
    """Least-squares slope of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.polyfit(x, y, 1)[0])
