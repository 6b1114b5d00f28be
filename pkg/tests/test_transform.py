import math

import numpy as np
import pytest

from gegenapprox.functions import builtin_function
from gegenapprox.indexsets import IndexSet, ResourceCapError, enumerate_set
from gegenapprox.oracles import adaptive_integral_2d
from gegenapprox.polycore import DomainError
from gegenapprox.transform import (CoefficientTable, GridSpec, chebyshev_extreme_points,
                                   compute_coefficients, evaluate_projection, naive_coefficients,
                                   sup_error)


def _set(q, N, d=2):
    return enumerate_set(q, N, d)


def test_constant_function():
    tab = compute_coefficients(builtin_function("const"), 0.5, _set(2, 6))
    assert tab.get((0, 0)) == pytest.approx(1.0, abs=1e-13)
    others = np.abs(tab.values[1:])
    assert np.all(others < 1e-13)


def test_first_coordinate():
    tab = compute_coefficients(builtin_function("x1"), 0.5, _set(math.inf, 4))
    for k, a in tab.entries.items():
        assert abs(a - (1.0 if k == (1, 0) else 0.0)) < 1e-13


def test_poly_test_single_entry():
    tab = compute_coefficients(builtin_function("poly_test"), 0.5, _set(math.inf, 6))
    big = {k: a for k, a in tab.entries.items() if abs(a) > 1e-13}
    assert list(big) == [(2, 3)]
    assert big[(2, 3)] == pytest.approx(1.0, abs=1e-13)


def test_f1_constant_term_against_adaptive_oracle():
    f = builtin_function("f1")
    tab = compute_coefficients(f, 0.5, _set(2, 4), normalization="legendre_normalized")
    # a_0 = (1/4) int f; normalized by (1/sqrt 2)^2
    integral = adaptive_integral_2d(lambda x, y: f(x, y), tol=1e-13)
    assert tab.get((0, 0)) == pytest.approx(integral / 4 / 0.5, abs=1e-10)


def test_chebyshev_t_normalization():
    # x1^2 = (T_0 + T_2) / 2
    f = builtin_function("x1")
    sq = type(f)("x1sq", lambda a, b: np.broadcast_to(a * a, np.broadcast_shapes(np.shape(a), np.shape(b))), 2)
    tab = compute_coefficients(sq, 0.0, _set(math.inf, 4))
    assert tab.normalization == "chebyshev_T"
    assert tab.get((0, 0)) == pytest.approx(0.5, abs=1e-14)
    assert tab.get((2, 0)) == pytest.approx(0.5, abs=1e-14)


def test_normalization_round_trip():
    tab = compute_coefficients(builtin_function("f2"), 0.5, _set(2, 20))
    back = tab.convert("legendre_normalized").convert("legendre")
    assert np.max(np.abs(back.values - tab.values)) <= 1e-14
    direct = compute_coefficients(builtin_function("f2"), 0.5, _set(2, 20),
                                  normalization="legendre_normalized")
    conv = tab.convert("legendre_normalized")
    np.testing.assert_allclose(conv.values, direct.values, rtol=1e-13, atol=1e-17)


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0, 1.7])
@pytest.mark.parametrize("name", ["f1", "f2", "runge(0.5)"])
def test_contraction_matches_naive(lam, name):
    f = builtin_function(name)
    iset = _set(math.inf, 8)
    tab = compute_coefficients(f, lam, iset, quad_order=24)
    ref = naive_coefficients(f, lam, iset.keys, 24)
    assert np.max(np.abs(tab.values - ref)) < 1e-13


@pytest.mark.parametrize("name", ["f1", "f2"])
@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_quad_order_doubling(name, lam):
    f = builtin_function(name)
    iset = _set(math.inf, 30)
    a = compute_coefficients(f, lam, iset)
    n = a.meta["quad_order"][0]
    b = compute_coefficients(f, lam, iset, quad_order=2 * n)
    assert np.max(np.abs(a.values - b.values)) < 1e-12


def test_parseval_sanity():
    f = builtin_function("f1")
    total = adaptive_integral_2d(lambda x, y: f(x, y) ** 2, tol=1e-13)
    sums = []
    for N in (4, 8, 16, 32):
        tab = compute_coefficients(f, 0.5, _set(math.inf, N), normalization="legendre_normalized")
        sums.append(float(np.sum(tab.values ** 2)))
    assert all(s2 >= s1 for s1, s2 in zip(sums, sums[1:]))
    assert sums[-1] <= total * (1 + 1e-12)
    assert sums[-1] == pytest.approx(total, rel=1e-10)


def test_quad_order_too_small():
    with pytest.raises(DomainError):
        compute_coefficients(builtin_function("f1"), 0.5, _set(math.inf, 10), quad_order=8)


def test_grid_cap():
    with pytest.raises(ResourceCapError):
        compute_coefficients(builtin_function("f1"), 0.5, _set(math.inf, 10), grid_cap=100)
    with pytest.raises(ResourceCapError):
        compute_coefficients(builtin_function("const", d=5), 0.5, _set(1, 1, 5))


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        compute_coefficients(builtin_function("f1"), 0.5, _set(1, 2, 3))


def test_normalization_mismatch():
    with pytest.raises(DomainError):
        compute_coefficients(builtin_function("f1"), 1.0, _set(1, 2), normalization="legendre")
    with pytest.raises(DomainError):
        compute_coefficients(builtin_function("f1"), 0.0, _set(1, 2), normalization="gegenbauer")


def test_evaluate_projection_examples():
    tab = compute_coefficients(builtin_function("x1"), 0.5, _set(2, 3))
    assert evaluate_projection(tab, [0.3, -0.7]) == pytest.approx(0.3, abs=1e-12)
    one = compute_coefficients(builtin_function("const"), 0.5, _set(2, 3))
    pts = np.random.default_rng(3).uniform(-1, 1, (50, 2))
    assert np.max(np.abs(evaluate_projection(one, pts) - 1.0)) < 1e-13
    empty = CoefficientTable(0.5, "legendre", np.zeros((0, 2)), np.zeros(0))
    assert evaluate_projection(empty, [0.1, 0.2]) == 0.0
    with pytest.raises(DomainError):
        evaluate_projection(tab, [1.5, 0.0])


def test_evaluate_projection_normalized_table():
    f = builtin_function("poly_test")
    tab = compute_coefficients(f, 0.5, _set(math.inf, 4), normalization="legendre_normalized")
    x = np.array([[0.2, -0.4], [0.9, 0.1]])
    np.testing.assert_allclose(evaluate_projection(tab, x), f.at_points(x), atol=1e-13)


def test_sup_error_polynomial():
    f = builtin_function("poly_test")
    tab = compute_coefficients(f, 0.5, _set(2, 5))
    assert sup_error(f, tab) < 1e-12
    assert sup_error(f, tab, GridSpec(kind="random", samples=2000)) < 1e-12


def test_sup_error_decreases():
    f = builtin_function("f1")
    e10 = sup_error(f, compute_coefficients(f, 0.5, _set(2, 10)))
    e20 = sup_error(f, compute_coefficients(f, 0.5, _set(2, 20)))
    assert e20 < e10


def test_chebyshev_extreme_points():
    g = chebyshev_extreme_points(5)
    np.testing.assert_allclose(g, [-1, -math.sqrt(0.5), 0, math.sqrt(0.5), 1], atol=1e-15)


def test_csv_format():
    tab = compute_coefficients(builtin_function("const"), 0.5, _set(1, 1))
    lines = tab.to_csv(["x"]).splitlines()
    assert lines[:2] == ["# x", "k_1,k_2,value,log10abs"]
    k1, k2, v, lg = lines[2].split(",")
    assert (k1, k2) == ("0", "0") and float(v) == pytest.approx(1.0) and lg == "0.000000"
    assert all(float(ln.split(",")[3]) >= -16 for ln in lines[2:])


def test_noise_floor_flags():
    tab = compute_coefficients(builtin_function("const"), 0.5, _set(1, 2))
    assert not tab.at_noise_floor[0]
    assert tab.at_noise_floor[1:].sum() >= 1


def test_coefficients_deterministic():
    f = builtin_function("f2")
    a = compute_coefficients(f, 0.5, _set(2, 25))
    b = compute_coefficients(f, 0.5, _set(2, 25))
    assert np.array_equal(a.values, b.values)
    assert isinstance(a.keys, np.ndarray) and not a.values.flags.writeable
    assert isinstance(_set(1, 1), IndexSet)
