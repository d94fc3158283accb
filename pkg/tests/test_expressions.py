"""Expression DSL: precedence, functions, errors with byte offsets."""

import numpy as np
import pytest

from plevylab.expressions import EvaluationError, Expression, ExpressionError, parse_expr


def ev(text, x, d=1, y=None):
    e = parse_expr(text, d)
    if d == 1:
        return float(e(np.asarray([x]))[0])
    return float(e(np.asarray([x]), np.asarray([y]))[0])


def test_cos_pi_x():
    assert ev("cos(pi*x)", 1.0) == pytest.approx(-1.0)


def test_power_right_associative():
    assert ev("2^3^2", 0.0) == 512.0


def test_hat_function():
    assert ev("max(0,1-abs(x))", 0.25) == pytest.approx(0.75)
    assert ev("max(0,1-abs(x))", 2.0) == 0.0


def test_precedence_stack():
    assert ev("1+2*3^2", 0.0) == 19.0
    assert ev("-2^2", 0.0) == -4.0  # unary minus binds below ^
    assert ev("(1+2)*3", 0.0) == 9.0
    assert ev("2*-3", 0.0) == -6.0
    assert ev("min(1, max(0, x))", 7.0) == 1.0


def test_whitespace_insensitive():
    assert ev("  1 +  2*x ", 3.0) == ev("1+2*x", 3.0)


def test_scientific_literals():
    assert ev("1e-2 + 2.5E3*x", 1.0) == pytest.approx(0.01 + 2500.0)


def test_two_dimensional_variables():
    assert ev("x*y + sin(y)", 2.0, d=2, y=0.5) == pytest.approx(1.0 + np.sin(0.5))
    with pytest.raises(ExpressionError):
        parse_expr("x*y", 1)  # y unknown in 1D


def test_syntax_error_offsets():
    with pytest.raises(ExpressionError) as err:
        parse_expr("1+*2")
    assert err.value.offset == 2
    with pytest.raises(ExpressionError) as err:
        parse_expr("cos(x")
    assert err.value.offset == 5
    with pytest.raises(ExpressionError) as err:
        parse_expr("foo(x)")
    assert err.value.offset == 0


def test_empty_and_trailing():
    with pytest.raises(ExpressionError):
        parse_expr("   ")
    with pytest.raises(ExpressionError) as err:
        parse_expr("1+2 3")
    assert err.value.offset == 4


def test_arity_check():
    with pytest.raises(ExpressionError):
        parse_expr("max(1)")
    with pytest.raises(ExpressionError):
        parse_expr("sin(1,2)")


def test_division_by_zero_reports_location():
    e = parse_expr("1/x")
    with pytest.raises(EvaluationError, match="0.0"):
        e(np.asarray([2.0, 0.0]))


def test_sqrt_of_negative_reports():
    e = parse_expr("sqrt(x)")
    with pytest.raises(EvaluationError):
        e(np.asarray([-1.0]))


def test_vectorized_evaluation_matches_scalar():
    e = parse_expr("exp(-x^2)*sin(2*x)+x/3")
    xs = np.linspace(-2, 2, 11)
    v = e(xs)
    for xi, vi in zip(xs, v):
        assert vi == pytest.approx(float(np.exp(-xi**2) * np.sin(2 * xi) + xi / 3))


def test_determinism():
    e = parse_expr("sin(x)^2+cos(x)^2")
    xs = np.linspace(0, 1, 5)
    assert np.array_equal(e(xs), e(xs))
