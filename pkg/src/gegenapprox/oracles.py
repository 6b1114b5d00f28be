"""Independent numerical ground truth.

Weighted Cauchy transforms Q_n^(λ)(z) by Gauss-Jacobi quadrature, their
closed forms for the Chebyshev members, adaptive 1D/2D integration, and
complex evaluation of the built-in test functions.
"""

import cmath
from functools import lru_cache
import math

import mpmath
import numpy as np

from .polycore import DomainError, eval_all, gauss_rule, log_norm_constant

MIN_CUT_DISTANCE = 1e-6


class ToleranceNotReached(RuntimeError):
    pass


def cut_distance(z):
    z = complex(z)
    xr = min(max(z.real, -1.0), 1.0)
    return abs(z - xr)


def exterior_root(z):
    """sqrt(z^2 - 1) on the branch with |z + sqrt(z^2 - 1)| >= 1."""
    z = complex(z)
    s = cmath.sqrt(z - 1.0) * cmath.sqrt(z + 1.0)
    if abs(z + s) < 1.0:
        s = -s
    return s


def joukowski_inverse(z):
    """u with z = (u + 1/u)/2 and |u| >= 1."""
    return complex(z) + exterior_root(z)


def ellipse_points(rho, count, offset=0.0):
    """``count`` points z = (u + 1/u)/2 on the Bernstein ellipse, |u| = rho."""
    theta = offset + 2.0 * np.pi * np.arange(count) / count
    u = rho * np.exp(1j * theta)
    return 0.5 * (u + 1.0 / u)


def cheb_closed_form(kind, n, z):
    """Q_n^(0) (kind 'T') or Q_n^(1) (kind 'U') in closed form."""
    s = exterior_root(z)
    u = complex(z) + s
    if kind == "T":
        if n == 0:
            return 1.0 / (2.0 * s)
        return 1.0 / (s * u ** n)
    if kind == "U":
        return 1.0 / u ** (n + 1)
    raise ValueError(f"kind must be 'T' or 'U', got {kind!r}")


# --- Cauchy transform by quadrature -----------------------------------------

def _check_z(z):
    if cut_distance(z) <= MIN_CUT_DISTANCE:
        raise DomainError(f"z={z} is within {MIN_CUT_DISTANCE} of the cut [-1, 1]")


def cauchy_q(lam, n, z, tol=1e-12, max_order=4096):
    """Q_n^(λ)(z) by adaptive (order-doubling) Gauss-Jacobi quadrature in binary64.

    The weight (1-x^2)^(λ-1/2) is absorbed by the rule; only C_n(x)/(z-x)
    is sampled.  Converged when two successive orders agree to ``tol``
    (absolute, floored at 1e-12 |Q_n|).  For |Q_n| far below the size of
    the individual terms use
    :func:`cauchy_q_mp`.
    """
    if lam < 0:
        raise DomainError("cauchy_q needs lam >= 0")
    _check_z(z)
    if lam == 0:
        # the lam -> 0 limit is the Chebyshev-T closed form
        return complex(cheb_closed_form("T", n, z))
    z = complex(z)
    scale = 0.5 * math.exp(-log_norm_constant(lam, n))
    order = max(32, n + 16)
    prev = None
    while order <= max_order:
        rule = gauss_rule(lam, order)
        c = eval_all(lam, n, rule.nodes)[n]
        val = scale * np.sum(rule.weights * c / (z - rule.nodes))
        # absolute tol, floored at 1e-12 relative when |Q_n| is large (small lam)
        if prev is not None and abs(val - prev) <= max(tol, 1e-12 * abs(val)):
            return complex(val)
        prev = val
        order *= 2
    raise ToleranceNotReached(f"cauchy_q(lam={lam}, n={n}, z={z}) did not reach tol={tol}")


@lru_cache(maxsize=64)
def _mp_rule(lam, order, dps):
    """Gauss-Jacobi rule in extended precision: binary64 nodes polished by Newton."""
    with mpmath.workdps(dps):
        lam_mp = mpmath.mpf(lam)
        seeds = gauss_rule(lam, order).nodes
        nodes, weights = [], []
        lead_ratio = 2 * (order - 1 + lam_mp) / order
        log_h = _mp_log_norm(lam_mp, order - 1)
        scale = lead_ratio * mpmath.exp(log_h) * (order + 2 * lam_mp - 1)
        for x0 in seeds[: (order + 1) // 2]:
            x = mpmath.mpf(float(x0))
            for _ in range(8):
                val, der = _mp_value_derivative(lam_mp, order, x)
                step = val / der
                x -= step
                if abs(step) < mpmath.mpf(10) ** (-dps + 3):
                    break
            _, der = _mp_value_derivative(lam_mp, order, x)
            nodes.append(x)
            weights.append(scale / ((1 - x) * (1 + x) * der * der))
        half = len(nodes) if order % 2 == 0 else len(nodes) - 1
        nodes = nodes + [-x for x in reversed(nodes[:half])]
        weights = weights + list(reversed(weights[:half]))
        if order % 2:
            nodes[order // 2] = mpmath.mpf(0)
        return tuple(nodes), tuple(weights)


def _mp_log_norm(lam, n):
    return ((1 - 2 * lam) * mpmath.log(2) + mpmath.log(mpmath.pi) - 2 * mpmath.loggamma(lam)
            + mpmath.loggamma(n + 2 * lam) - mpmath.loggamma(n + 1) - mpmath.log(n + lam))


def _mp_value_derivative(lam, m, x):
    c0, c1 = mpmath.mpf(1), 2 * lam * x
    d0, d1 = mpmath.mpf(0), 2 * lam
    for k in range(1, m):
        alpha = 2 * (k + lam) / (k + 1)
        beta = -(k + 2 * lam - 1) / (k + 1)
        c0, c1 = c1, alpha * x * c1 + beta * c0
        d0, d1 = d1, alpha * (c0 + x * d1) + beta * d0
    return c1, d1


@lru_cache(maxsize=64)
def _mp_weighted_values(lam, nmax, order, dps):
    """Rows n = 0..nmax of w_j C_n(x_j) / (2 h_n) in extended precision."""
    nodes, weights = _mp_rule(lam, order, dps)
    with mpmath.workdps(dps):
        lam_mp = mpmath.mpf(lam)
        rows = [[None] * order for _ in range(nmax + 1)]
        for j, (x, w) in enumerate(zip(nodes, weights)):
            c0, c1 = mpmath.mpf(1), 2 * lam_mp * x
            rows[0][j] = w
            if nmax >= 1:
                rows[1][j] = w * c1
            for k in range(1, nmax):
                c0, c1 = c1, (2 * (k + lam_mp) * x * c1 - (k + 2 * lam_mp - 1) * c0) / (k + 1)
                rows[k + 1][j] = w * c1
        for n in range(nmax + 1):
            s = 1 / (2 * mpmath.exp(_mp_log_norm(lam_mp, n)))
            rows[n] = [v * s for v in rows[n]]
        return nodes, rows


def cauchy_q_mp(lam, nmax, z, rtol=1e-14, dps=50, start_order=64, max_order=1024):
    """Q_0..Q_nmax at ``z`` by Gauss-Jacobi quadrature in ``dps``-digit arithmetic.

    Orders double until every Q_n agrees with the previous order to ``rtol``
    relative.  Returns a complex128 array.  Extended precision is needed
    because |Q_n| decays like rho^-n while the quadrature terms do not.
    """
    if lam <= 0:
        raise DomainError("cauchy_q_mp needs lam > 0")
    _check_z(z)
    order = max(start_order, nmax + 16)
    prev = None
    while order <= max_order:
        nodes, rows = _mp_weighted_values(float(lam), nmax, order, dps)
        with mpmath.workdps(dps):
            zz = mpmath.mpc(complex(z))
            kernel = [1 / (zz - x) for x in nodes]
            vals = [mpmath.fdot(row, kernel) for row in rows]
            out = np.array([complex(v) for v in vals])
            if prev is not None:
                diffs = [abs(a - b) / abs(a) for a, b in zip(vals, prev)]
                if max(diffs) <= rtol:
                    return out
            prev = vals
        order *= 2
    raise ToleranceNotReached(f"cauchy_q_mp(lam={lam}, z={z}) did not reach rtol={rtol}")


# --- adaptive integration ---------------------------------------------------

_GK_X = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_GK_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_GK_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

GK_NODES = np.concatenate([-_GK_X[:-1], _GK_X[::-1]])
GK_WEIGHTS = np.concatenate([_GK_WK[:-1], _GK_WK[::-1]])
# Gauss-7 nodes are the odd positions of the 15-point Kronrod set
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_GK_WG[:-1], _GK_WG[::-1]])


def _gk15(f, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    vals = np.asarray(f(mid + half * GK_NODES), dtype=float)
    kron = half * (GK_WEIGHTS @ vals)
    gauss = half * (G_WEIGHTS @ vals)
    return kron, abs(kron - gauss)


def adaptive_integral_1d(f, a, b, tol=1e-12, max_intervals=20000, weight_lambda=None):
    """Integral of vectorized ``f`` over [a, b] by recursive bisection with Gauss-Kronrod 7/15.

    ``b`` may be ``math.inf``; the tail is mapped to [0, 1) with
    x = a + t / (1 - t).  If ``weight_lambda`` is given the integral is of
    f(x) (1 - x^2)^(λ - 1/2) over [-1, 1] and is computed after the
    substitution x = sin(t), which removes the endpoint singularity.
    """
    if weight_lambda is not None:
        lam = float(weight_lambda)
        g = f

        def f(t):
            return g(np.sin(t)) * np.cos(t) ** (2.0 * lam)

        a, b = -0.5 * np.pi, 0.5 * np.pi
    elif math.isinf(b):
        g, a0 = f, a

        def f(t):
            t = np.asarray(t, dtype=float)
            return g(a0 + t / (1.0 - t)) / (1.0 - t) ** 2

        a, b = 0.0, 1.0

    total_est, err = _gk15(f, a, b)
    stack = [(a, b, total_est, err)]
    done_val, done_err = 0.0, 0.0
    count = 0
    while stack:
        lo, hi, val, e = stack.pop()
        width_share = (hi - lo) / (b - a)
        if e <= max(tol * width_share, 1e-15 * abs(val)) or hi - lo < 1e-12 * (b - a):
            done_val += val
            done_err += e
            continue
        count += 1
        if count > max_intervals:
            raise ToleranceNotReached(f"adaptive_integral_1d exceeded {max_intervals} subdivisions")
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        stack.append((lo, mid, v1, e1))
        stack.append((mid, hi, v2, e2))
    return float(done_val)


def _gk15_2d(f, box):
    (a1, b1), (a2, b2) = box
    m1, h1 = 0.5 * (a1 + b1), 0.5 * (b1 - a1)
    m2, h2 = 0.5 * (a2 + b2), 0.5 * (b2 - a2)
    x1 = m1 + h1 * GK_NODES
    x2 = m2 + h2 * GK_NODES
    vals = np.asarray(f(x1[:, None], x2[None, :]), dtype=float)
    kron = h1 * h2 * (GK_WEIGHTS @ vals @ GK_WEIGHTS)
    gauss = h1 * h2 * (G_WEIGHTS @ vals @ G_WEIGHTS)
    return kron, abs(kron - gauss)


def adaptive_integral_2d(f, box=((-1.0, 1.0), (-1.0, 1.0)), tol=1e-12, max_boxes=200000):
    """Integral of ``f(x1, x2)`` (broadcasting) over a rectangle by quadtree refinement.

    Each box is estimated with the tensor Gauss-Kronrod 15x15 rule and its
    embedded 7x7 Gauss rule; boxes whose estimates disagree by more than their
    share of ``tol`` are split in four.
    """
    (a1, b1), (a2, b2) = box
    area = (b1 - a1) * (b2 - a2)
    stack = [(tuple(box),) + _gk15_2d(f, box)]
    total = 0.0
    count = 0
    while stack:
        bx, val, e = stack.pop()
        (l1, u1), (l2, u2) = bx
        share = (u1 - l1) * (u2 - l2) / area
        if e <= max(tol * share, 1e-15 * abs(val)):
            total += val
            continue
        count += 1
        if count > max_boxes:
            raise ToleranceNotReached(f"adaptive_integral_2d exceeded {max_boxes} subdivisions")
        c1, c2 = 0.5 * (l1 + u1), 0.5 * (l2 + u2)
        for sub in (((l1, c1), (l2, c2)), ((c1, u1), (l2, c2)), ((l1, c1), (c2, u2)), ((c1, u1), (c2, u2))):
            stack.append((sub,) + _gk15_2d(f, sub))
    return float(total)


# --- complex continuation of built-ins ---------------------------------------

def complex_eval_builtin(name, z, **params):
    """Principal-branch continuation of a registered analytic built-in at ``z``."""
    from .functions import builtin_function

    fn = builtin_function(name, **params)
    if fn.complex_evaluator is None:
        raise ValueError(f"built-in {name!r} has no complex continuation")
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != fn.dimension:
        raise DomainError(f"expected points of dimension {fn.dimension}")
    if fn.singular_distance is not None and np.any(fn.singular_distance(z) < 1e-8):
        raise DomainError(f"{name}: point within 1e-8 of the singular set")
    out = fn.complex_evaluator(*np.moveaxis(z, -1, 0))
    return complex(out) if np.ndim(out) == 0 else out
