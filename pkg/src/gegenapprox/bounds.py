"""Explicit a-priori bounds for multivariate Gegenbauer expansions.

Constants are assembled in log space and exponentiated once.  Boundary
suprema (B_f, B-hat_f, sup over D_{h,eps}) are sampled from the complex
continuation of a built-in when the caller does not supply them.
"""

from dataclasses import dataclass
import math
from typing import Callable, Optional

import numpy as np
from scipy.special import betaln, gammaln

from .indexsets import aleph, lq_norm, parse_q
from .polycore import DomainError, log_norm_constant

TORUS_POINTS = 256
SAFETY = 1.01
DEFAULT_EPSILON = 1e-3


class MissingDataError(ValueError):
    """A bound needs a quantity (B_f, V_{k,m}) that was neither given nor computable."""


# --- ellipse geometry --------------------------------------------------------

@dataclass(frozen=True)
class EllipseParams:
    rho: float
    h: float
    circumference: float

    @property
    def semi_axes(self):
        return 0.5 * (self.rho + 1.0 / self.rho), 0.5 * (self.rho - 1.0 / self.rho)


def rho_from_h(h):
    return h + math.sqrt(1.0 + h * h)


def h_from_rho(rho):
    return 0.5 * (rho - 1.0 / rho)


def ellipse_perimeter(a, b):
    """Perimeter of an ellipse with semi-axes a >= b >= 0 by the AGM.

    L = 2 pi / AGM(a, b) * (a^2 - sum_n 2^(n-1) c_n^2), c_0^2 = a^2 - b^2.
    """
    a, b = float(max(a, b)), float(min(a, b))
    if b == 0.0:
        return 4.0 * a
    an, bn = a, b
    acc = 0.5 * (a * a - b * b)
    power = 1.0
    for _ in range(64):
        cn = 0.5 * (an - bn)
        # a_n - b_n stalls at a few ulps; stop before 2^n amplifies the noise
        if cn <= 4.0 * np.finfo(float).eps * an:
            break
        an, bn = 0.5 * (an + bn), math.sqrt(an * bn)
        acc += power * cn * cn
        power *= 2.0
    return 2.0 * math.pi * (a * a - acc) / an


def ellipse_circumference(rho):
    """L(E_rho); the degenerate rho = 1 is the segment traversed twice (L = 4)."""
    if rho < 1.0:
        raise DomainError("rho must be >= 1")
    return ellipse_perimeter(0.5 * (rho + 1.0 / rho), 0.5 * (rho - 1.0 / rho))


def ellipse_from_rho(rho):
    rho = float(rho)
    if not rho > 1.0:
        raise DomainError(f"rho must be > 1, got {rho}")
    return EllipseParams(rho, h_from_rho(rho), ellipse_circumference(rho))


def ellipse_from_h(h):
    h = float(h)
    if not h > 0.0:
        raise DomainError(f"h must be > 0, got {h}")
    rho = rho_from_h(h)
    return EllipseParams(rho, h, ellipse_circumference(rho))


# --- analyticity data --------------------------------------------------------

@dataclass(frozen=True)
class AnalyticityContext:
    """Polyellipse radii (Assumption 1) or region D_{h,eps} (Assumption 2).

    ``B_f`` is the supremum of |f| on the relevant boundary; when it is None
    the bound routines sample it from a built-in's complex continuation.
    """
    mode: str
    rho_vec: Optional[tuple] = None
    h: Optional[float] = None
    epsilon: float = 0.0
    B_f: Optional[float] = None

    def __post_init__(self):
        if self.mode == "polyellipse":
            if not self.rho_vec or any(not r > 1.0 for r in self.rho_vec):
                raise DomainError("polyellipse mode needs every rho_j > 1")
            object.__setattr__(self, "rho_vec", tuple(float(r) for r in self.rho_vec))
        elif self.mode == "region_Dh":
            if self.h is None or not self.h > 0:
                raise DomainError("region mode needs h > 0")
            if self.epsilon < 0:
                raise DomainError("epsilon must be >= 0")
        else:
            raise DomainError(f"unknown analyticity mode {self.mode!r}")
        if self.B_f is not None and not self.B_f > 0:
            raise DomainError("B_f must be positive")

    @property
    def rho(self):
        """rho = h + sqrt(1 + h^2) of the region (region mode only)."""
        return rho_from_h(self.h)

    @property
    def d(self):
        return len(self.rho_vec) if self.rho_vec else None

    def check_lambda(self, lam):
        if self.mode == "region_Dh" and 0 < lam < 1 and self.epsilon <= 0:
            raise DomainError("0 < lambda < 1 needs epsilon > 0 (D-constants blow up as rho-hat -> 1)")


def polyellipse_context(rho_vec, B_f=None):
    return AnalyticityContext("polyellipse", rho_vec=tuple(rho_vec), B_f=B_f)


def region_context(h, epsilon=0.0, B_f=None):
    return AnalyticityContext("region_Dh", h=float(h), epsilon=float(epsilon), B_f=B_f)


def default_epsilon(lam):
    return DEFAULT_EPSILON if 0 < lam < 1 else 0.0


# --- boundary suprema --------------------------------------------------------

def torus_sup(fz: Callable, rho_vec, points=TORUS_POINTS, safety=SAFETY, chunk=1 << 16):
    """safety * max |f| over the distinguished boundary prod_j E_{rho_j}.

    z_j = (rho_j e^{i t_j} + rho_j^{-1} e^{-i t_j}) / 2 on a uniform grid in t_j.
    """
    d = len(rho_vec)
    theta = 2.0 * np.pi * np.arange(points) / points
    circles = [0.5 * (r * np.exp(1j * theta) + np.exp(-1j * theta) / r) for r in rho_vec]
    best = 0.0
    # sweep the first d-1 coordinates in blocks, broadcast the last one
    total = points ** (d - 1)
    idx = np.arange(total)
    step = max(1, chunk // points)
    for start in range(0, total, step):
        block = idx[start:start + step]
        coords = []
        rem = block
        for j in range(d - 1):
            div = points ** (d - 2 - j)
            coords.append(circles[j][(rem // div) % points][:, None])
        coords.append(circles[-1][None, :])
        vals = np.abs(np.asarray(fz(*coords)))
        best = max(best, float(np.max(vals)))
    if not math.isfinite(best):
        raise FloatingPointError("|f| is not finite on the polyellipse boundary")
    return safety * best


def region_sup(f, h, epsilon, d, points=4096, safety=SAFETY):
    """safety * sup |f| over D_{h,eps} for an isotropic built-in f = g(sum z_j^2).

    z -> sum z_j^2 maps D_{h,eps} onto N_{d, h^2 + d eps}, so the supremum is
    max |g| on the boundary ellipse (foci 0 and d, leftmost point -a).
    """
    if f.radial is None:
        raise MissingDataError(f"{f.name}: sup over D_(h,eps) needs a user-supplied B_f")
    a = h * h + d * epsilon
    if f.singular_h2 is not None and a >= f.singular_h2:
        raise DomainError(f"{f.name} is singular inside D_(h,eps): need h^2 + d eps < {f.singular_h2}")
    semi_major = 0.5 * d + a
    semi_minor = math.sqrt(semi_major ** 2 - (0.5 * d) ** 2)
    t = 2.0 * np.pi * np.arange(points) / points
    s = 0.5 * d + semi_major * np.cos(t) + 1j * semi_minor * np.sin(t)
    return safety * float(np.max(np.abs(f.radial(s))))


def _complex_fn(f):
    fz = getattr(f, "complex_evaluator", None) if f is not None else None
    if fz is None:
        raise MissingDataError("B_f not supplied and no complex continuation available")
    return fz


_SUP_CACHE = {}


def boundary_sup(f, rho_vec, points=TORUS_POINTS):
    """Sampled B_f of a built-in over prod_j E_{rho_j}, memoized per function.

    Isotropic built-ins are symmetric in the coordinates, so their key uses
    the sorted radii.
    """
    fz = _complex_fn(f)
    rhos = tuple(float(r) for r in rho_vec)
    if getattr(f, "radial", None) is not None:
        rhos = tuple(sorted(rhos))
    key = (f.name, tuple(sorted(f.params.items())), rhos, points)
    if key not in _SUP_CACHE:
        if len(_SUP_CACHE) > 100_000:
            _SUP_CACHE.clear()
        _SUP_CACHE[key] = torus_sup(fz, rhos, points)
    return _SUP_CACHE[key]


# --- Q_n bound constants -----------------------------------------------------

def log_Dbar(rho, lam):
    if lam <= 0:
        raise DomainError("Dbar needs lambda > 0")
    if rho <= 1.0:
        if lam >= 1.0 and rho == 1.0:
            return (lam - 1.0) * math.log(2.0)
        raise DomainError("Dbar needs rho > 1 when 0 < lambda < 1")
    sign = 1.0 if lam >= 1.0 else -1.0
    return -math.log(rho) + (lam - 1.0) * math.log1p(sign / (rho * rho))


def log_D(rho, lam):
    if lam <= 0:
        raise DomainError("D needs lambda > 0")
    extra = 1.0 / 12.0 if lam >= 1.0 else 1.0 / 12.0 + (1.0 - lam) / (2.0 * lam)
    return gammaln(lam) + extra + log_Dbar(rho, lam)


def Dbar(rho, lam):
    """n = 0 constant of the Q_n bound on E_rho."""
    return math.exp(log_Dbar(rho, lam))


def D(rho, lam):
    """n >= 1 constant of the Q_n bound on E_rho."""
    return math.exp(log_D(rho, lam))


def log_qn_bound(rho, lam, n):
    if not rho > 1.0:
        raise DomainError("qn_bound needs rho > 1")
    if lam == 0:
        raise DomainError("lambda = 0 has the closed form cheb_closed_form('T', n, z)")
    if lam < 0 or n < 0:
        raise DomainError("qn_bound needs lambda > 0 and n >= 0")
    if lam == 1.0:
        return -(n + 1.0) * math.log(rho)
    if n == 0:
        return log_Dbar(rho, lam)
    return log_D(rho, lam) + (1.0 - lam) * math.log(n) - n * math.log(rho)


def qn_bound(rho, lam, n):
    """Upper bound of |Q_n^(lam)(z)| over z on E_rho (lam = 1 uses 1/rho^(n+1))."""
    return math.exp(log_qn_bound(rho, lam, n))


# --- coefficient bounds ------------------------------------------------------

def rho_hat(h, epsilon, k):
    """rho-hat_j = sqrt((c_j h)^2 + eps) + sqrt(1 + (c_j h)^2 + eps), c = k / ||k||_2."""
    k = np.asarray(k, dtype=float)
    nrm = math.sqrt(float(np.sum(k * k)))
    if nrm == 0.0:
        raise DomainError("rho_hat is undefined for the zero multi-index")
    c2h2 = (k / nrm * h) ** 2
    return tuple(float(v) for v in np.sqrt(c2h2 + epsilon) + np.sqrt(1.0 + c2h2 + epsilon))


def _rho_hat_any(h, epsilon, k):
    # k = 0 has no direction; any unit c works, the symmetric one is used
    if not any(k):
        d = len(k)
        return rho_hat(h, epsilon, (1,) * d)
    return rho_hat(h, epsilon, k)


def _log_product(lam, k, rhos):
    """sum over j of log Dbar (k_j = 0) or log(k_j^(1-lam) D) (k_j > 0)."""
    out = 0.0
    for kj, r in zip(k, rhos):
        if kj == 0:
            out += log_Dbar(r, lam)
        else:
            out += (1.0 - lam) * math.log(kj) + log_D(r, lam)
    return out


def _log_L(rhos):
    return sum(math.log(ellipse_circumference(r)) for r in rhos)


def _resolve_B(ctx, f, rhos):
    if ctx.B_f is not None:
        return ctx.B_f
    return boundary_sup(f, rhos)


def _check_k(k, d):
    k = tuple(int(v) for v in k)
    if d is not None and len(k) != d:
        raise DomainError(f"multi-index has d={len(k)}, context has d={d}")
    if any(v < 0 for v in k):
        raise DomainError("multi-index entries must be >= 0")
    return k


def coeff_bound_a1(ctx, lam, k, f=None):
    """|a_k| bound under Assumption 1 (analytic inside the polyellipse ctx.rho_vec)."""
    if ctx.mode != "polyellipse":
        raise DomainError("coeff_bound_a1 needs a polyellipse context")
    if lam <= 0:
        raise DomainError("coeff_bound_a1 needs lambda > 0")
    k = _check_k(k, ctx.d)
    rhos = ctx.rho_vec
    B = _resolve_B(ctx, f, rhos)
    d = len(k)
    log_b = (math.log(B) + _log_L(rhos) - d * math.log(math.pi)
             - sum(kj * math.log(r) for kj, r in zip(k, rhos)) + _log_product(lam, k, rhos))
    return math.exp(log_b)


def coeff_bound_a2(ctx, lam, k, f=None):
    """|a_k| bound under Assumption 2: rho^(-||k||_2) decay with rho-hat(k) constants."""
    if ctx.mode != "region_Dh":
        raise DomainError("coeff_bound_a2 needs a region context")
    if lam <= 0:
        raise DomainError("coeff_bound_a2 needs lambda > 0")
    ctx.check_lambda(lam)
    k = _check_k(k, None)
    rhos = _rho_hat_any(ctx.h, ctx.epsilon, k)
    B = _resolve_B(ctx, f, rhos)
    d = len(k)
    log_b = (math.log(B) + _log_L(rhos) - d * math.log(math.pi)
             - lq_norm(k, 2) * math.log(ctx.rho) + _log_product(lam, k, rhos))
    return math.exp(log_b)


def cheb_T_bound_a1(ctx, k, f=None):
    """2^(d - aleph(k)) B_f / rho^k."""
    if ctx.mode != "polyellipse":
        raise DomainError("needs a polyellipse context")
    k = _check_k(k, ctx.d)
    B = _resolve_B(ctx, f, ctx.rho_vec)
    log_b = (len(k) - aleph(k)) * math.log(2.0) + math.log(B) - sum(
        kj * math.log(r) for kj, r in zip(k, ctx.rho_vec))
    return math.exp(log_b)


def cheb_U_bound_a1(ctx, k, f=None):
    """B_f L(E_rho) / (pi^d rho^(k+1))."""
    if ctx.mode != "polyellipse":
        raise DomainError("needs a polyellipse context")
    k = _check_k(k, ctx.d)
    rhos = ctx.rho_vec
    B = _resolve_B(ctx, f, rhos)
    log_b = (math.log(B) + _log_L(rhos) - len(k) * math.log(math.pi)
             - sum((kj + 1.0) * math.log(r) for kj, r in zip(k, rhos)))
    return math.exp(log_b)


def _region_eps0(ctx):
    if ctx.mode != "region_Dh":
        raise DomainError("needs a region context")
    if ctx.epsilon != 0:
        raise DomainError("the Chebyshev region bounds are stated for epsilon = 0")


def cheb_T_bound_a2(ctx, k, f=None):
    """2^(d - aleph(k)) B-hat_f / rho^||k||_2 on D_{h,0}."""
    _region_eps0(ctx)
    k = _check_k(k, None)
    rhos = _rho_hat_any(ctx.h, 0.0, k)
    B = _resolve_B(ctx, f, rhos)
    log_b = (len(k) - aleph(k)) * math.log(2.0) + math.log(B) - lq_norm(k, 2) * math.log(ctx.rho)
    return math.exp(log_b)


def cheb_U_bound_a2(ctx, k, f=None):
    """B-hat_f L(E_rho-hat) / (pi^d rho^(||k||_2 + 1)) on D_{h,0}."""
    _region_eps0(ctx)
    k = _check_k(k, None)
    rhos = _rho_hat_any(ctx.h, 0.0, k)
    B = _resolve_B(ctx, f, rhos)
    log_b = (math.log(B) + _log_L(rhos) - len(k) * math.log(math.pi)
             - (lq_norm(k, 2) + 1.0) * math.log(ctx.rho))
    return math.exp(log_b)


def legendre_bounds(ctx, k, normalized=False, f=None):
    """Bound on |a_k^L| (or on the normalized a-bar_k^L when ``normalized``).

    With a polyellipse context this is the lambda = 1/2 case of Assumption 1.
    With a region context rho_vec is rho-hat(k) and rho^k is replaced by
    rho^||k||_2, as in Assumption 2.
    """
    lam = 0.5
    k = _check_k(k, ctx.d)
    if ctx.mode == "polyellipse":
        rhos = ctx.rho_vec
        log_decay = sum(kj * math.log(r) for kj, r in zip(k, rhos))
    else:
        ctx.check_lambda(lam)
        rhos = _rho_hat_any(ctx.h, ctx.epsilon, k)
        log_decay = lq_norm(k, 2) * math.log(ctx.rho)
    B = _resolve_B(ctx, f, rhos)
    d = len(k)
    log_b = math.log(B) + _log_L(rhos) - d * math.log(math.pi) - log_decay
    for kj, r in zip(k, rhos):
        if kj == 0:
            log_b += log_Dbar(r, lam)
        else:
            log_b += log_D(r, lam) + (0.0 if normalized else 0.5 * math.log(kj))
    if normalized:
        log_b += 0.5 * aleph(k) * math.log(2.0)
    return math.exp(log_b)


# --- helper lemmas -----------------------------------------------------------

def gamma_factor(q, d):
    """gamma = 1 for q >= 2, d^(1/q - 1/2) for 0 < q < 2."""
    q = parse_q(q)
    if q >= 2:
        return 1.0
    return float(d) ** (1.0 / q - 0.5)


def m_b(b):
    """b if b is a positive integer, floor(b) + 1 otherwise."""
    if b <= 0:
        raise DomainError("m_b needs b > 0")
    if float(b).is_integer():
        return int(b)
    return int(math.floor(b)) + 1


def int_bound(a, b, M):
    """Upper bound of int_M^inf e^(-a x) x^b dx by m_b + 1 integrations by parts."""
    if not (a > 0 and b > 0 and M > 0):
        raise DomainError("int_bound needs a, b, M > 0")
    total = 0.0
    prod = 1.0
    for j in range(1, m_b(b) + 2):
        if j >= 2:
            prod *= b - (j - 2)
        total += M ** (b - j + 1) / a ** j * prod
    return math.exp(-a * M) * total


def upsilon(k, a, b):
    """Upsilon_k^{a,b}, with Gamma(k+a)/Gamma(k+b) <= Upsilon k^(a-b)."""
    if not (k >= 1 and k + a > 1 and k + b > 1):
        raise DomainError("upsilon needs k >= 1, k + a > 1, k + b > 1")
    return math.exp((a - b) / (2.0 * (k + b - 1.0)) + 1.0 / (12.0 * (k + a - 1.0))
                    + (a - 1.0) * (a - b) / k)


def C_d(d):
    """1 for d = 1, (pi/2)^floor(d/2) / (d-2)!! for d >= 2 (0!! = 1)."""
    if d < 1:
        raise DomainError("d must be >= 1")
    if d == 1:
        return 1.0
    dfact = 1
    for v in range(d - 2, 0, -2):
        dfact *= v
    return (math.pi / 2.0) ** (d // 2) / dfact


def kappa(lam, epsilon):
    """max{1, Gamma(lam)/Gamma(2 lam) exp(...)} times Dbar at sqrt(eps) + sqrt(1 + eps)."""
    if lam <= 0:
        raise DomainError("kappa needs lambda > 0")
    expo = (2.0 * max(0.0, (2.0 * lam - 1.0) / 2.0, (1.0 - lam) / (2.0 * lam))
            + 1.0 / (24.0 * lam) + (2.0 * lam - 1.0) ** 2 + 1.0 / 12.0)
    first = math.exp(gammaln(lam) - gammaln(2.0 * lam) + expo)
    r_eps = math.sqrt(epsilon) + math.sqrt(1.0 + epsilon)
    return max(1.0, first) * math.exp(log_Dbar(r_eps, lam))


def tail_sum_bound(rho, q, d, N, lam=0.0):
    """C_d sum_j (N/gamma)^(b-j+1)/(ln rho)^j prod(b-i) rho^(-N/gamma), b = lam d + d - 1.

    For lam = 0 the sum runs to j = d as in the Chebyshev constant.
    """
    g = gamma_factor(q, d)
    M = N / g
    a = math.log(rho)
    b = lam * d + d - 1.0
    top = m_b(b) + 1 if lam > 0 else d
    total, prod = 0.0, 1.0
    for j in range(1, top + 1):
        if j >= 2:
            prod *= b - (j - 2)
        total += M ** (b - j + 1) / a ** j * prod
    return C_d(d) * total * rho ** (-M)


@dataclass(frozen=True)
class Thm41Result:
    bound: float
    K: float
    rho: float
    gamma: float
    sup_f: float


def error_bound_thm41(ctx, lam, q, d, N, f=None):
    """Uniform error bound K rho^(-N/gamma) for the l^q ball projection.

    K is evaluated at the given N (it grows polynomially in N).  The sup of
    |f| over D_{h,eps} is ctx.B_f when given, otherwise sampled from an
    isotropic built-in.
    """
    if ctx.mode != "region_Dh":
        raise DomainError("Theorem 4.1 needs a region context")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    ctx.check_lambda(lam)
    if lam == 0 and ctx.epsilon != 0:
        raise DomainError("lambda = 0 uses epsilon = 0")
    h, eps = ctx.h, ctx.epsilon
    rho = ctx.rho
    g = gamma_factor(q, d)
    if lam > 0 and not N > lam * g * d / math.log(rho):
        raise DomainError(f"need N > lambda gamma d / ln rho = {lam * g * d / math.log(rho):.6g}")
    if not N > 0:
        raise DomainError("N must be > 0")
    sup_f = ctx.B_f if ctx.B_f is not None else region_sup(f, h, eps, d)
    tail = tail_sum_bound(rho, q, d, N, lam)
    decay = rho ** (-N / g)
    if lam == 0:
        K = sup_f * 2.0 ** d * tail / decay
    else:
        r_eps = math.sqrt(h * h + eps) + math.sqrt(1.0 + h * h + eps)
        L = ellipse_circumference(r_eps)
        K = sup_f * L ** d * (kappa(lam, eps) / math.pi) ** d * tail / decay
    return Thm41Result(K * decay, K, rho, g, sup_f)


# --- finite regularity -------------------------------------------------------

@dataclass(frozen=True)
class FiniteRegularitySpec:
    m: tuple
    V_km_oracle: Optional[Callable] = None

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if not m or any(v < 1 for v in m):
            raise DomainError("regularity orders m_j must be >= 1")
        object.__setattr__(self, "m", m)

    def theorem52_applies(self, lam):
        return all(mj > lam + 1 for mj in self.m)


def finite_reg_coeff_bound(fam_lam, k, spec):
    """(V_{k,m}/h_k) prod_j sqrt(h^{(lam+n_j)}_{k_j-n_j}) prod_s 2(lam+s)/((k_j-s)(k_j+2 lam+s)),
    n_j = min(k_j, m_j)."""
    lam = float(getattr(fam_lam, "lam", fam_lam))
    if lam <= 0:
        raise DomainError("finite_reg_coeff_bound needs lambda > 0")
    k = tuple(int(v) for v in k)
    if len(k) != len(spec.m):
        raise DomainError("k and m differ in dimension")
    if spec.V_km_oracle is None:
        raise MissingDataError("V_{k,m} oracle not supplied")
    V = float(spec.V_km_oracle(k))
    if V == 0.0:
        return 0.0
    log_b = math.log(V)
    for kj, mj in zip(k, spec.m):
        n = min(kj, mj)
        log_b -= log_norm_constant(lam, kj)
        log_b += 0.5 * log_norm_constant(lam + n, kj - n)
        for s in range(n):
            log_b += math.log(2.0 * (lam + s)) - math.log(kj - s) - math.log(kj + 2.0 * lam + s)
    return math.exp(log_b)


def power_V_km(s, lam, m):
    """V_{k,m} oracle for f = prod_j |x_j|^s in closed form.

    d^n/dx^n |x|^s = s(s-1)...(s-n+1) |x|^(s-n) sgn(x)^n, and
    int |x|^(2a) (1-x^2)^b dx over [-1, 1] = B(a + 1/2, b + 1).
    """
    m = tuple(m)

    def V(k):
        log_v2 = 0.0
        for kj, mj in zip(k, m):
            n = min(kj, mj)
            if s - n <= -0.5:
                raise DomainError("derivative not square integrable")
            coef = 1.0
            for i in range(n):
                coef *= s - i
            if coef == 0.0:
                return 0.0
            log_v2 += 2.0 * math.log(abs(coef)) + betaln(s - n + 0.5, lam + n + 0.5)
        return math.exp(0.5 * log_v2)

    return V


def finite_reg_error_rate(lam, m):
    """Exponent r with full-grid error O(N^-r), r = min_j (m_j - lam - 1)."""
    m = tuple(int(v) for v in m)
    if any(mj <= lam + 1 for mj in m):
        raise DomainError("the rate needs every m_j > lambda + 1")
    return float(min(mj - lam - 1.0 for mj in m))


DEFAULT_SHRINK = 0.9


def working_context(f, lam, shrink=DEFAULT_SHRINK, epsilon=None):
    """Region context for an isotropic built-in, pulled inside its singularity.

    The largest admissible h makes |f| unbounded on the boundary, so bounds
    are evaluated at h = shrink * h_max.  epsilon defaults to 1e-3 for
    0 < lam < 1 and 0 otherwise; h^2 + d eps must stay below h_max^2.
    """
    if f.singular_h2 is None:
        raise MissingDataError(f"{f.name} has no registered analyticity region")
    eps = default_epsilon(lam) if epsilon is None else float(epsilon)
    h = shrink * math.sqrt(f.singular_h2)
    if h * h + f.dimension * eps >= f.singular_h2:
        raise DomainError("shrink/epsilon leave no analyticity margin")
    return region_context(h, eps)
