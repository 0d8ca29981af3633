import numpy as np
import pytest

from abfinsler.metric import DomainError, make_spec
from abfinsler.phi import make_phi
from abfinsler.riemann import metric_compatibility_residual, riemann_state, rs_contractions
from conftest import zoo
from oracles import SymbolicMetric


@pytest.fixture(scope="module")
def curved():
    a = [["1 + 0.3*x1^2"], ["0.2*x2*x1", "2 + sin(x2)"], ["0.1*x3", "0", "exp(0.2*x1)"]]
    b = ["0.2 + 0.1*x2", "0.1*x1*x3", "0.3*cos(x1)"]
    return make_spec(3, a, b, make_phi("randers"), box=[(-0.5, 0.5)] * 3, id="curved")


def test_christoffel_and_rs_match_sympy(curved, rng):
    sym = SymbolicMetric(curved)
    for x in rng.uniform(-0.5, 0.5, (3, 3)):
        st = riemann_state(curved, x)
        G, r, s = sym.riemann_numeric(x)
        assert st.gamma == pytest.approx(G, abs=1e-13)
        assert st.r == pytest.approx(r, abs=1e-13)
        assert st.s == pytest.approx(s, abs=1e-13)


def test_metric_compatibility_and_symmetry(curved, rng):
    for x in rng.uniform(-0.5, 0.5, (20, 3)):
        st = riemann_state(curved, x)
        assert metric_compatibility_residual(st) <= 1e-10
        assert np.abs(st.gamma - st.gamma.transpose(0, 2, 1)).max() <= 1e-14
        assert st.a @ st.a_inv == pytest.approx(np.eye(3), abs=1e-13)
        assert np.abs(st.s + st.s.T).max() == 0.0


def test_ybar_annihilates_s_i0(curved, rng):
    for x in rng.uniform(-0.5, 0.5, (20, 3)):
        st = riemann_state(curved, x)
        y = rng.standard_normal(3)
        c = rs_contractions(st, y)
        assert abs((st.a @ y) @ c.s_up_i0) <= 1e-14 * (1 + np.abs(c.s_up_i0).max())


def test_contraction_values(curved):
    st = riemann_state(curved, [0.1, -0.2, 0.3])
    y = np.array([0.3, -1.0, 0.5])
    c = rs_contractions(st, y)
    assert c.r00 == pytest.approx(y @ st.r @ y)
    assert c.r_i0 == pytest.approx(st.r @ y)
    assert c.s_i0 == pytest.approx(st.s @ y)
    assert c.s0 == pytest.approx(st.s_vec @ y)
    assert c.r0 == pytest.approx(st.r_vec @ y)
    assert c.s_up_i0 == pytest.approx(st.a_inv @ st.s @ y)


def test_zero_direction_rejected(curved):
    st = riemann_state(curved, [0, 0, 0])
    with pytest.raises(ValueError):
        rs_contractions(st, [0, 0, 0])


def test_indefinite_metric_is_a_domain_error():
    spec = make_spec(2, [["1"], ["0", "x1"]], ["0.1", "0"], make_phi("randers"))
    with pytest.raises(DomainError) as info:
        riemann_state(spec, [-0.5, 0.0])
    assert info.value.guard == "a-positive-definite"


def test_hopf_form_is_unit_killing_of_constant_length():
    spec = zoo("hopf-kropina")
    rng = np.random.default_rng(3)
    for x in rng.uniform(-0.8, 0.8, (25, 3)):
        st = riemann_state(spec, x)
        assert st.b_norm_sq == pytest.approx(1.0, abs=1e-13)
        assert np.abs(st.r).max() <= 1e-13
        assert np.abs(st.s_vec).max() <= 1e-13
        assert np.abs(st.s).max() >= 0.1
