"""Gegenbauer-family polynomials, normalization constants and Gauss rules.

The family is indexed by ``lam`` (λ >= 0).  ``lam == 0`` is the Chebyshev
first-kind member (T_n), ``lam == 0.5`` is Legendre and ``lam == 1`` is
Chebyshev second kind.  All orthogonality is with respect to the weight
``(1 - x**2) ** (lam - 1/2)`` on [-1, 1].
"""

from dataclasses import dataclass
import math

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class FamilyParam:
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam) or lam < 0:
            raise DomainError(f"family parameter must be >= 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def is_chebyshev_t(self):
        return self.lam == 0.0

    def weight(self, x):
        return (1.0 - np.asarray(x, dtype=float) ** 2) ** (self.lam - 0.5)


def as_family(fam):
    return fam if isinstance(fam, FamilyParam) else FamilyParam(fam)


@dataclass(frozen=True)
class QuadratureRule:
    lam: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self):
        return len(self.nodes)

    def integrate(self, values):
        """Weighted sum of ``values`` sampled at the nodes (last axis)."""
        return np.asarray(values) @ self.weights


def eval_poly(fam, n, x, strict=True):
    """C_n^(λ)(x) by the three-term recurrence (T_n(x) when λ = 0).

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    fam = as_family(fam)
    if n < 0:
        raise DomainError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    if strict and np.any(np.abs(x) > 1.0):
        raise DomainError("eval_poly is defined on [-1, 1]")
    out = eval_all(fam, n, x)[n]
    return float(out) if out.ndim == 0 else out


def eval_all(fam, nmax, x):
    """Values of degrees 0..nmax at ``x``; shape (nmax + 1,) + x.shape."""
    fam = as_family(fam)
    x = np.asarray(x, dtype=float)
    lam = fam.lam
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    out[1] = x if lam == 0.0 else 2.0 * lam * x
    for k in range(1, nmax):
        if lam == 0.0:
            out[k + 1] = 2.0 * x * out[k] - out[k - 1]
        else:
            out[k + 1] = (2.0 * (k + lam) * x * out[k] - (k + 2.0 * lam - 1.0) * out[k - 1]) / (k + 1.0)
    return out


def recurrence_coefficients(lam, k):
    """(alpha_k, beta_k) with P_{k+1} = alpha_k x P_k + beta_k P_{k-1}, valid for k >= 1."""
    if lam == 0.0:
        return 2.0, -1.0
    return 2.0 * (k + lam) / (k + 1.0), -(k + 2.0 * lam - 1.0) / (k + 1.0)


def clenshaw(fam, coeffs, x, axis=0):
    """Evaluate sum_k coeffs[k] C_k^(λ)(x) with Clenshaw's backward recurrence.

    ``coeffs`` carries the degree along ``axis``; the remaining axes broadcast
    against ``x``.
    """
    fam = as_family(fam)
    lam = fam.lam
    c = np.moveaxis(np.asarray(coeffs, dtype=float), axis, 0)
    x = np.asarray(x, dtype=float)
    n = c.shape[0]
    if n == 0:
        return np.zeros(np.broadcast_shapes(c.shape[1:], x.shape))
    b1 = np.zeros(np.broadcast_shapes(c.shape[1:], x.shape))
    b2 = np.zeros_like(b1)
    for k in range(n - 1, 0, -1):
        alpha, _ = recurrence_coefficients(lam, k)
        _, beta_next = recurrence_coefficients(lam, k + 1)
        b1, b2 = c[k] + alpha * x * b1 + beta_next * b2, b1
    phi1 = x if lam == 0.0 else 2.0 * lam * x
    _, beta1 = recurrence_coefficients(lam, 1)
    return c[0] + phi1 * b1 + beta1 * b2


def log_eval_at_one(fam, n):
    fam = as_family(fam)
    lam = fam.lam
    if lam == 0.0:
        return 0.0 if n == 0 else math.log(2.0 / n)
    return gammaln(n + 2.0 * lam) - gammaln(n + 1.0) - gammaln(2.0 * lam)


def eval_at_one(fam, n):
    """C_n^(λ)(1) = binom(n + 2λ - 1, n); for λ = 0 the limiting value 2/n (1 for n = 0).

    Evaluated with 30 significant digits and rounded once, so the result is
    the correctly rounded binary64 value.
    """
    fam = as_family(fam)
    if n < 0:
        raise DomainError("degree must be non-negative")
    if fam.lam == 0.0:
        return 1.0 if n == 0 else 2.0 / n
    with mpmath.workdps(30):
        return float(mpmath.binomial(n + 2 * mpmath.mpf(fam.lam) - 1, n))


def log_norm_constant(fam, n):
    fam = as_family(fam)
    lam = fam.lam
    if lam == 0.0:
        return math.log(math.pi) if n == 0 else math.log(math.pi / 2.0)
    return ((1.0 - 2.0 * lam) * math.log(2.0) + math.log(math.pi) - 2.0 * gammaln(lam)
            + gammaln(n + 2.0 * lam) - gammaln(n + 1.0) - math.log(n + lam))


def norm_constant(fam, n):
    """h_n^(λ) = integral of C_n^2 times the weight over [-1, 1]."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    return math.exp(log_norm_constant(fam, n))


def norm_constants(fam, nmax):
    return np.array([norm_constant(fam, n) for n in range(nmax + 1)])


def weight_integral(lam):
    """Integral of (1-x^2)^(λ-1/2) over [-1, 1]."""
    return math.exp(0.5 * math.log(math.pi) + gammaln(lam + 0.5) - gammaln(lam + 1.0))


def jacobi_matrix(lam, order):
    """Diagonal and off-diagonal of the symmetric Jacobi matrix (monic recurrence)."""
    k = np.arange(1, order, dtype=float)
    beta = np.empty(order - 1)
    if order > 1:
        beta[0] = 1.0 / (2.0 * (1.0 + lam))
        kk = k[1:]
        beta[1:] = kk * (kk + 2.0 * lam - 1.0) / (4.0 * (kk + lam) * (kk + lam - 1.0))
    return np.zeros(order), np.sqrt(beta)


def _value_and_derivative(lam, m, x):
    """C_m(x) and C_m'(x) by the differentiated three-term recurrence."""
    c0, d0 = np.ones_like(x), np.zeros_like(x)
    if lam == 0.0:
        c1, d1 = x.copy(), np.ones_like(x)
    else:
        c1, d1 = 2.0 * lam * x, np.full_like(x, 2.0 * lam)
    if m == 0:
        return c0, d0
    for k in range(1, m):
        alpha, beta = recurrence_coefficients(lam, k)
        c0, c1 = c1, alpha * x * c1 + beta * c0
        d0, d1 = d1, alpha * (c0 + x * d1) + beta * d0
    return c1, d1


def gauss_rule(fam, order):
    """Gauss rule for the weight (1-x^2)^(λ-1/2).

    Nodes come from the Golub-Welsch eigenproblem of the Jacobi matrix.  They
    are then polished with one Newton step, and the weights are recomputed
    from C_m'(x_j).  The eigenvector weights alone lose about 1e-13 relative
    accuracy at the outermost nodes.
    """
    fam = as_family(fam)
    if order < 1:
        raise DomainError("quadrature order must be >= 1")
    lam, m = fam.lam, order
    diag, off = jacobi_matrix(lam, m)
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"Jacobi eigen-solve failed (lam={lam}, order={m})") from exc
    if not np.all(np.isfinite(nodes)):
        raise RuntimeError(f"Jacobi eigen-solve returned non-finite nodes (lam={lam}, order={m})")
    nodes = 0.5 * (nodes - nodes[::-1])

    val, der = _value_and_derivative(lam, m, nodes)
    nodes = nodes - val / der
    nodes = 0.5 * (nodes - nodes[::-1])
    if m % 2:
        nodes[m // 2] = 0.0
    _, der = _value_and_derivative(lam, m, nodes)
    one_minus_x2 = (1.0 - nodes) * (1.0 + nodes)
    if lam == 0.0:
        lead_ratio = 1.0 if m == 1 else 2.0
        scale = lead_ratio * norm_constant(fam, m - 1) * m
    else:
        lead_ratio = 2.0 * (m - 1.0 + lam) / m
        scale = lead_ratio * norm_constant(fam, m - 1) * (m + 2.0 * lam - 1.0)
    weights = scale / (one_minus_x2 * der * der)
    weights = 0.5 * (weights + weights[::-1])

    if np.any(np.diff(nodes) <= 0) or np.any(weights <= 0):
        raise RuntimeError(f"Gauss rule lost node ordering or positivity (lam={lam}, order={m})")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(lam, nodes, weights)
