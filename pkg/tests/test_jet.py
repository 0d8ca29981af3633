import itertools
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from abfinsler.jet import (
    Jet,
    JetDomainError,
    JetError,
    jet_arith,
    jet_func,
    seed_base,
    seed_fiber,
    series_derivs,
    univariate,
)


def fiber_vars(point, deg_y=5, deg_x=0):
    n = len(point)
    return [seed_fiber(v, i, n, deg_y, deg_x) for i, v in enumerate(point)]


def multi_indices(n, deg):
    return [m for m in itertools.product(range(deg + 1), repeat=n) if sum(m) <= deg]


def random_poly(rng, n, deg):
    ys = sp.symbols(f"y0:{n}")
    terms = multi_indices(n, deg)
    coeffs = rng.uniform(-2, 2, len(terms))
    return ys, sum(float(c) * sp.Mul(*[y**k for y, k in zip(ys, m)]) for c, m in zip(coeffs, terms))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polynomial_partials_match_sympy(rng, n):
    deg = 5
    point = rng.uniform(-1, 1, n)
    ys, p = random_poly(rng, n, deg)
    f = sp.lambdify(ys, p)
    y = fiber_vars(point, deg)
    j = f(*y)
    subs = dict(zip(ys, point))
    for m in multi_indices(n, deg):
        want = float(sp.diff(p, *[v for v, k in zip(ys, m) for _ in range(k)]).subs(subs)) if sum(m) else float(p.subs(subs))
        got = j.extract(m)
        assert got == pytest.approx(want, rel=1e-14, abs=1e-12)


def test_product_rule_leibniz(rng):
    n, deg = 2, 4
    y = fiber_vars(rng.uniform(0.5, 1.0, n), deg)
    a = (y[0] * y[1] + 2.0).exp() * y[0]
    b = (y[1] + 3.0).sqrt() + y[0] * y[0]
    ab = a * b
    for m in multi_indices(n, deg):
        total = 0.0
        for k in itertools.product(*(range(mi + 1) for mi in m)):
            coef = math.prod(math.comb(mi, ki) for mi, ki in zip(m, k))
            rest = tuple(mi - ki for mi, ki in zip(m, k))
            total += coef * a.extract(k) * b.extract(rest)
        assert ab.extract(m) == pytest.approx(total, rel=1e-12, abs=1e-12)


def test_sqrt_of_square_recovers_linear():
    t = univariate(0.0, 4)
    r = ((1 + t) * (1 + t)).sqrt()
    assert series_derivs(r) == pytest.approx([1.0, 1.0, 0, 0, 0], abs=1e-15)


def test_reciprocal_times_self_is_identity():
    x = seed_fiber(1.7, 0, 2, 5, 2) + seed_fiber(0.3, 1, 2, 5, 2) * seed_base(0.5, 2, 5, 2)
    one = (1 / x) * x
    assert one.value == pytest.approx(1.0)
    assert np.allclose(one.c[1:], 0.0, atol=1e-14)


def test_constant_has_zero_derivatives():
    c = Jet.constant(3.5, 3, 5, 2)
    assert c.extract((1, 2, 0), 1) == 0.0
    assert c.extract((0, 0, 0)) == 3.5


def test_base_direction_derivatives_match_sympy():
    t, y = sp.symbols("t y")
    expr = sp.sin(t * y) * sp.exp(t) / (1 + y**2)
    ty, tt = seed_fiber(0.4, 0, 1, 3, 2), seed_base(0.2, 1, 3, 2)
    j = (tt * ty).sin() * tt.exp() / (1 + ty * ty)
    for k in range(4):
        for p in range(3):
            want = float(sp.diff(expr, y, k, t, p).subs({t: 0.2, y: 0.4}))
            assert j.extract((k,), p) == pytest.approx(want, rel=1e-13, abs=1e-13)


def test_elementary_functions_match_sympy():
    s = sp.Symbol("s")
    cases = {
        "sqrt": (lambda j: j.sqrt(), sp.sqrt(s)),
        "exp": (lambda j: j.exp(), sp.exp(s)),
        "sin": (lambda j: j.sin(), sp.sin(s)),
        "cos": (lambda j: j.cos(), sp.cos(s)),
        "pow": (lambda j: j.pow_r(-1.5), s**-1.5),
        "rational": (lambda j: (j * j + 1) / (j - 3), (s * s + 1) / (s - 3)),
    }
    for name, (fn, expr) in cases.items():
        got = series_derivs(fn(univariate(0.7, 6)))
        want = [float(sp.diff(expr, s, k).subs(s, 0.7)) for k in range(7)]
        assert got == pytest.approx(want, rel=1e-12), name


def test_domain_errors():
    with pytest.raises(JetDomainError):
        univariate(-1.0, 3).sqrt()
    with pytest.raises(JetDomainError):
        univariate(0.0, 3).reciprocal()
    with pytest.raises(JetDomainError):
        univariate(-2.0, 3).pow_r(0.5)


def test_shape_mismatch_and_bad_indices():
    a, b = Jet.constant(1.0, 2, 3, 0), Jet.constant(1.0, 3, 3, 0)
    with pytest.raises(JetError):
        a + b
    with pytest.raises(JetError):
        a.extract((4, 0))
    with pytest.raises(JetError):
        a.extract((0, 0), 1)
    with pytest.raises(JetError):
        jet_arith(a, a, "pow")
    with pytest.raises(JetError):
        jet_func(a, "tan")


def test_fiber_derivative_lowers_degree():
    y = fiber_vars([0.5, 2.0], 4)
    f = y[0] ** 3 * y[1]
    df = f.d(0)
    assert df.deg_y == 3
    assert df.value == pytest.approx(3 * 0.25 * 2.0)
    assert df.extract((1, 1)) == pytest.approx(6 * 0.5)


def test_gradient_and_hessian():
    y = fiber_vars([1.0, 2.0, -1.0], 3)
    f = y[0] * y[1] * y[1] + y[2] ** 3
    assert f.gradient() == pytest.approx([4.0, 4.0, 3.0])
    H = f.hessian()
    assert H == pytest.approx(np.array([[0, 4, 0], [4, 2, 0], [0, 0, -6]]))
    T = f.derivative_tensor(3)
    assert T[0, 1, 1] == pytest.approx(2.0) and T[1, 0, 1] == pytest.approx(2.0)
    assert T[2, 2, 2] == pytest.approx(6.0)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.2, 1.5),
    st.floats(-0.5, 1.0),
    st.sampled_from(["sqrt", "exp", "sin", "cos"]),
)
def test_composition_against_richardson_differences(x0, c, fname):
    """First and second derivatives of f(x + c x^2) vs extrapolated central differences."""
    f = {"sqrt": math.sqrt, "exp": math.exp, "sin": math.sin, "cos": math.cos}[fname]

    def g(x):
        return f(x + c * x * x)

    t = univariate(x0, 3)
    j = jet_func(t + c * t * t, fname)

    def d1(h):
        return (g(x0 + h) - g(x0 - h)) / (2 * h)

    h = 1e-3
    rich = (4 * d1(h / 2) - d1(h)) / 3
    assert j.extract((1,)) == pytest.approx(rich, rel=1e-7, abs=1e-9)
