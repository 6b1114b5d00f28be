import cmath
import math

import numpy as np
import pytest

from gegenapprox.bounds import qn_bound
from gegenapprox.functions import builtin_function
from gegenapprox.oracles import (ToleranceNotReached, adaptive_integral_1d, adaptive_integral_2d,
                                 cauchy_q, cauchy_q_mp, cheb_closed_form, complex_eval_builtin,
                                 ellipse_points, exterior_root, joukowski_inverse)
from gegenapprox.polycore import DomainError


def test_closed_form_examples():
    assert cheb_closed_form("T", 0, 2.0) == pytest.approx(1 / (2 * math.sqrt(3)), rel=1e-15)
    rho = 2.0
    z = 0.5 * (rho + 1 / rho)
    assert abs(cheb_closed_form("U", 0, z)) == pytest.approx(1 / rho, rel=1e-15)
    h = 0.5 * (rho - 1 / rho)
    assert cheb_closed_form("T", 5, z) == pytest.approx(1 / (h * 2 ** 5), rel=1e-14)
    with pytest.raises(ValueError):
        cheb_closed_form("V", 1, z)


def test_exterior_root_branch():
    for z in ellipse_points(1.4, 64, 0.1):
        s = exterior_root(z)
        assert abs(z + s) >= 1.0
        assert s * s == pytest.approx(z * z - 1, abs=1e-14)
        assert abs(joukowski_inverse(z)) == pytest.approx(1.4, rel=1e-14)


def test_closed_form_is_continuous_along_ellipse():
    theta = np.linspace(0, 2 * np.pi, 20001)
    u = 1.3 * np.exp(1j * theta)
    z = 0.5 * (u + 1 / u)
    # sqrt(z^2 - 1) = (u - 1/u)/2 along the ellipse, so the parametric forms
    # are the branch-free continuation; any branch flip would show up here
    s = 0.5 * (u - 1 / u)
    for n in (0, 1, 4):
        t_par = 1 / (2 * s) if n == 0 else 1 / (s * u ** n)
        for kind, par in (("T", t_par), ("U", u ** -(n + 1))):
            vals = np.array([cheb_closed_form(kind, n, zz) for zz in z])
            assert np.max(np.abs(vals - par)) < 1e-8


def test_cauchy_q_examples():
    q = cauchy_q(0.5, 0, 2.0)
    assert abs(q.imag) < 1e-15 and q.real > 0
    # Q_0^(1/2)(z) = (1/4) log((z+1)/(z-1))
    assert q.real == pytest.approx(0.25 * math.log(3.0), rel=1e-12)
    z = 0.3 + 0.8j
    for lam in (0.3, 1.0, 2.0):
        for n in (0, 3, 7):
            assert cauchy_q(lam, n, z.conjugate()) == pytest.approx(cauchy_q(lam, n, z).conjugate(), abs=1e-13)


def test_cauchy_q_near_cut_rejected():
    with pytest.raises(DomainError):
        cauchy_q(0.5, 2, 0.3 + 1e-7j)
    with pytest.raises(DomainError):
        cauchy_q(-0.5, 2, 2.0)


def test_cauchy_q_lambda_zero_dispatch():
    z = 1.2 + 0.4j
    assert cauchy_q(0.0, 3, z) == cheb_closed_form("T", 3, z)


def test_cauchy_q_matches_u_closed_form():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(200):
        n = int(rng.integers(0, 31))
        rho = (1.3, 2.0)[i % 2]
        u = rho * np.exp(1j * rng.uniform(0, 2 * np.pi))
        z = 0.5 * (u + 1 / u)
        worst = max(worst, abs(cauchy_q(1.0, n, z) - cheb_closed_form("U", n, z)))
    assert worst < 1e-10


def test_small_lambda_approaches_chebyshev():
    lam = 1e-4
    for n in range(0, 11):
        for z in ellipse_points(1.5, 16, 0.3):
            q = cauchy_q(lam, n, z)
            scaled = q if n == 0 else 2.0 / n * lam * q
            t = cheb_closed_form("T", n, z)
            assert abs(scaled - t) <= 1e-2 * abs(t)


def test_parity_and_conjugate_symmetry():
    z = 1.1 + 0.5j
    for n in range(6):
        q = cauchy_q(0.7, n, z)
        assert cauchy_q(0.7, n, -z) == pytest.approx((-1) ** (n + 1) * q, abs=1e-13)
        assert cauchy_q(0.7, n, z.conjugate()) == pytest.approx(q.conjugate(), abs=1e-13)


def test_mp_oracle_agrees_with_binary64():
    z = ellipse_points(1.6, 4, np.pi / 64)[1]
    mp = cauchy_q_mp(0.5, 12, z, dps=30)
    for n in range(13):
        assert mp[n] == pytest.approx(cauchy_q(0.5, n, z), abs=1e-12)
        assert abs(mp[n]) <= qn_bound(1.6, 0.5, n)


def test_adaptive_1d_examples():
    assert adaptive_integral_1d(lambda x: x, 0, 1) == pytest.approx(0.5, abs=1e-14)
    assert adaptive_integral_1d(lambda x: x * np.exp(-x), 1, math.inf) == pytest.approx(2 / math.e, abs=1e-12)
    assert adaptive_integral_1d(lambda x: np.ones_like(x), -1, 1, weight_lambda=0.5) == pytest.approx(2.0, abs=1e-14)
    # Chebyshev weight: int (1-x^2)^(-1/2) = pi
    assert adaptive_integral_1d(lambda x: np.ones_like(x), -1, 1, weight_lambda=0.0) == pytest.approx(math.pi, abs=1e-12)


def test_adaptive_1d_subdivision_cap():
    with pytest.raises(ToleranceNotReached):
        adaptive_integral_1d(lambda x: np.sin(1 / np.maximum(np.abs(x), 1e-300)), -1, 1, tol=1e-15,
                             max_intervals=10)


def test_adaptive_2d_examples():
    assert adaptive_integral_2d(lambda x, y: x * x + y * y) == pytest.approx(8 / 3, abs=1e-13)
    assert adaptive_integral_2d(lambda x, y: np.exp(x + y), box=((0, 1), (0, 1))) == pytest.approx(
        (math.e - 1) ** 2, abs=1e-13)


def test_complex_eval_builtin():
    x = np.array([[0.3, -0.2], [0.9, 0.1]])
    np.testing.assert_allclose(complex_eval_builtin("f2", x).real, builtin_function("f2").at_points(x), rtol=1e-15)
    # approaching the pole z1^2 + z2^2 = -1
    for t in (1e-2, 1e-4, 1e-6):
        z = np.array([1j * math.sqrt(1 - t), 0.0])
        assert abs(complex_eval_builtin("f2", z)) == pytest.approx(1 / t, rel=1e-6)
    with pytest.raises(DomainError):
        complex_eval_builtin("f2", np.array([1j, 0.0]))
    z = np.array([0.2 + 0.3j, 0.3 - 0.2j])
    s = np.sum(z * z)
    assert abs(s.imag) < 1e-15 and s.real > -0.5
    v = complex_eval_builtin("f1", z)
    assert v.real > 0 and abs(v - cmath.sqrt(s + 0.5)) < 1e-15
    assert complex_eval_builtin("runge", np.array([0.1j, 0.2]), h=0.5) == pytest.approx(
        1 / (-0.01 + 0.04 + 0.25), rel=1e-14)
    with pytest.raises(KeyError):
        complex_eval_builtin("nope", np.array([0.1, 0.2]))
