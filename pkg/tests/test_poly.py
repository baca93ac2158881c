"""Unit tests for truncated multivariate polynomial arithmetic."""

from fractions import Fraction

from jetcalc.poly import (
    exponent_of_index_tuple,
    exponents_upto,
    factorial_of_exponent,
    index_tuple_of_exponent,
    matrix_poly_inverse,
    p_add,
    p_coeff,
    p_compose,
    p_const,
    p_diff,
    p_eval_zero,
    p_mul,
    p_scale,
    p_truncate,
    p_var,
)


def test_mul_truncates_at_total_degree():
    x = p_var(1, 2)
    y = p_var(2, 2)
    xy = p_mul(x, y, 2)
    assert xy == {(1, 1): Fraction(1)}
    assert p_mul(xy, x, 2) == {}  # degree 3 term dropped
    assert p_mul(xy, x, 3) == {(2, 1): Fraction(1)}


def test_add_cancels_to_empty_dict():
    x = p_var(1, 1)
    assert p_add(x, p_scale(x, -1)) == {}


def test_compose_univariate_series():
    # f(t) = t + t^2 composed with g(t) = 2t gives 2t + 4t^2
    f = p_add(p_var(1, 1), p_mul(p_var(1, 1), p_var(1, 1), 3))
    g = p_scale(p_var(1, 1), 2)
    comp = p_compose(f, [g], 3)
    assert p_coeff(comp, (1,)) == 2
    assert p_coeff(comp, (2,)) == 4


def test_compose_is_associative_on_truncations():
    # (f o g) o h == f o (g o h) exactly, because truncation at a fixed
    # total degree commutes with composition of terms without constants
    f = {(1, 0): Fraction(1), (0, 2): Fraction(3), (2, 1): Fraction(1, 2)}
    g0 = {(0, 1): Fraction(2), (1, 1): Fraction(1)}
    g1 = {(1, 0): Fraction(-1), (0, 2): Fraction(5)}
    h0 = {(1, 0): Fraction(1), (0, 1): Fraction(1), (2, 0): Fraction(1)}
    h1 = {(0, 1): Fraction(3), (1, 1): Fraction(-2)}
    deg = 4
    fg = p_compose(f, [g0, g1], deg)
    left = p_compose(fg, [h0, h1], deg)
    gh = [p_compose(g0, [h0, h1], deg), p_compose(g1, [h0, h1], deg)]
    right = p_compose(f, gh, deg)
    assert left == right


def test_diff_and_eval_zero():
    # p = 3 + x^2 y
    p = p_add(p_const(3, 2), {(2, 1): Fraction(1)})
    assert p_eval_zero(p) == 3
    dx = p_diff(p, 1)
    assert dx == {(1, 1): Fraction(2)}
    assert p_diff(dx, 2) == {(1, 0): Fraction(2)}


def test_truncate_drops_high_degree():
    p = {(3, 0): Fraction(1), (1, 0): Fraction(2)}
    assert p_truncate(p, 2) == {(1, 0): Fraction(2)}


def test_exponent_index_tuple_round_trip():
    for exp in exponents_upto(3, 3):
        idx = index_tuple_of_exponent(exp)
        assert tuple(sorted(idx)) == idx
        assert exponent_of_index_tuple(idx, 3) == exp
    assert factorial_of_exponent((3, 1, 2)) == 6 * 1 * 2


def test_matrix_poly_inverse_newton():
    # M = I + x N with N nilpotent-ish entries; check M Minv = I to degree 3
    x = p_var(1, 2)
    y = p_var(2, 2)
    M = [[p_add(p_const(1, 2), x), y],
         [p_scale(x, 2), p_add(p_const(2, 2), p_mul(x, y, 3))]]
    Minv = matrix_poly_inverse(M, 2, 3)
    for i in range(2):
        for j in range(2):
            entry = {}
            for k in range(2):
                entry = p_add(entry, p_mul(M[i][k], Minv[k][j], 3))
            expected = p_const(1 if i == j else 0, 2)
            assert p_truncate(entry, 3) == expected
