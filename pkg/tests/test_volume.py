import math

import numpy as np
import pytest

from abfinsler.metric import make_spec
from abfinsler.phi import make_phi
from abfinsler.riemann import riemann_state
from abfinsler.volume import sphere_rule, unit_ball_volume, volume_density
from conftest import samples


def euclid(n, b=0.0, family="riemannian"):
    a = [["1" if i == j else "0" for j in range(i + 1)] for i in range(n)]
    bv = [str(b)] + ["0"] * (n - 1)
    return make_spec(n, a, bv, make_phi(family), id="flat")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_euclidean_density_is_one(n):
    vd = volume_density(euclid(n), np.zeros(n))
    assert vd.sigma == pytest.approx(1.0, abs=1e-10)
    assert np.abs(vd.grad_log_sigma).max() <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_rules_integrate_polynomials(n):
    Y, w = sphere_rule(n)
    area = n * unit_ball_volume(n)
    assert w.sum() == pytest.approx(area, rel=1e-13)
    assert (w * Y[:, 0] ** 2).sum() == pytest.approx(area / n, rel=1e-12)
    assert (w * Y[:, 0] ** 4).sum() == pytest.approx(3 * area / (n * (n + 2)), rel=1e-12)


def brute_force_2d(b, m):
    """Busemann-Hausdorff density by an m-point trapezoid rule on the circle."""
    t = 2 * np.pi * np.arange(m) / m
    F = 1 + b * np.cos(t)
    return math.pi / (0.5 * np.sum(F**-2) * 2 * np.pi / m)


def test_randers_2d_against_double_resolution_oracle():
    b = 0.5
    sigma = volume_density(euclid(2, b, "randers"), [0, 0]).sigma
    assert sigma == pytest.approx(brute_force_2d(b, 8192), rel=1e-8)
    assert sigma == pytest.approx((1 - b * b) ** 1.5, rel=1e-12)


@pytest.mark.parametrize("family, b, exact", [("randers", 0.4, (1 - 0.16) ** 2), ("matsumoto", 0.3, None)])
def test_3d_density_converged(family, b, exact):
    vd = volume_density(euclid(3, b, family), [0, 0, 0])
    assert vd.discrepancy <= 1e-8
    if exact is not None:
        assert vd.sigma == pytest.approx(exact, rel=1e-10)


def test_randers_s_curvature_matches_known_formula():
    """S = (n+1)(e00/(2F) - s0 - rho0), e_ij = r_ij + b_i s_j + b_j s_i, rho = ln sqrt(1 - b^2)."""
    spec = make_spec(2, [["1"], ["0", "1"]], ["0.2 + 0.1*x2", "0.1*x1 + 0.05*x1*x2"], make_phi("randers"), id="rot")
    from abfinsler.finsler import point_state

    n = 2
    rng = np.random.default_rng(5)
    for x in rng.uniform(-0.5, 0.5, (5, 2)):
        y = rng.standard_normal(2)
        ps = point_state(spec, x, y)
        st = riemann_state(spec, x)
        e = st.r + np.outer(st.b, st.s_vec) + np.outer(st.s_vec, st.b)
        grad_rho = -(st.b_up @ st.nabla_b) / (1 - st.b_norm_sq)
        want = (n + 1) * (y @ e @ y / (2 * ps.F) - st.s_vec @ y - grad_rho @ y)
        assert ps.S == pytest.approx(want, abs=1e-9)


def test_density_gradient_vs_differences():
    spec = make_spec(2, [["1 + 0.1*x1^2"], ["0", "1"]], ["0.3 + 0.1*x1", "0.1*x2"], make_phi("matsumoto"), id="g")
    x, h = np.array([0.2, -0.1]), 1e-5
    vd = volume_density(spec, x)
    for k in range(2):
        e = np.eye(2)[k] * h
        fd = (math.log(volume_density(spec, x + e).sigma) - math.log(volume_density(spec, x - e).sigma)) / (2 * h)
        assert vd.grad_log_sigma[k] == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_hopf_density_converges_everywhere():
    for smp in samples("hopf-kropina", 20, 1).samples:
        assert smp.ps.volume.discrepancy <= 1e-8
