"""Closed-form (alpha, beta)-metric formulas.

Scalar coefficients are functions of ``s = beta/alpha`` and ``b^2``;
derivatives of ``Q`` and of the ``Psi_1`` bracket are taken by univariate
jet arithmetic in ``s`` so no derivative is expanded by hand.

The mean Landsberg formula is used in the form that matches the definition
path for arbitrary (alpha, beta): ``Psi_1 = sqrt(b^2-s^2) Delta^(1/2)
[sqrt(b^2-s^2) Phi / Delta^(3/2)]'`` and the term ``alpha^2 (r_i0 - 2 alpha
Q s_i)``. The variants without ``Phi`` in the bracket and with ``s_0`` in
place of ``s_i`` (``printed=True``) agree with it only when
``r_ij = 0`` and ``s_j = 0``.

``h_i`` below is the covector ``alpha b_i - s a_ij y^j`` (not the angular
metric), and ``T_ij = alpha^2 a_ij - ybar_i ybar_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .jet import series_derivs, univariate
from .metric import DomainError, MetricSpec
from .phi import PhiFamily
from .riemann import RiemannState, riemann_state, rs_contractions

SERIES_ORDER = 6


@dataclass(frozen=True)
class ABScalars:
    s: float
    b_sq: float
    n: int
    phi: float
    dphi: float
    ddphi: float
    Q: float
    dQ: float
    ddQ: float
    dddQ: float
    Delta: float
    Theta: float
    Psi: float
    Phi: float
    Psi1: float
    Psi1_printed: float
    Psi2: float
    rho: float
    rho0: float
    rho1: float
    rho2: float
    X4: float
    X6: float
    Y4: float
    Y6: float
    Lambda: float
    mu: float
    Gamma_coef: float
    Pi: float


def ab_scalars(phi: PhiFamily, s: float, b_sq: float, n: int) -> ABScalars:
    phi.check(s)
    if s * s > b_sq * (1 + 1e-12):
        raise DomainError("b2-exceeds-s2", f"b^2 = {b_sq:.6g}, s^2 = {s * s:.6g}")
    interior = b_sq - s * s > 1e-12 * b_sq
    t = univariate(s, SERIES_ORDER)
    ph = phi.series(t)
    dph = ph.d(0)
    ph5 = ph.truncate(5)
    t5 = t.truncate(5)
    den = ph5 - t5 * dph
    if den.value <= 0:
        raise DomainError("phi-s-dphi-positive", f"phi - s phi' = {den.value:.6g} at s = {s:.6g}")
    if ph.value <= 0:
        raise DomainError("phi-positive", f"phi = {ph.value:.6g} at s = {s:.6g}")
    Qs = dph / den  # order 5 in s
    q = series_derivs(Qs)
    Q, dQ, ddQ, dddQ = q[0], q[1], q[2], q[3]
    dQs = Qs.d(0)  # order 4
    t4 = t.truncate(4)
    Delta_s = 1.0 + t4 * Qs.truncate(4) + (b_sq - t4 * t4) * dQs
    Delta = Delta_s.value
    if Delta <= 0:
        raise DomainError("Delta-positive", f"Delta = {Delta:.6g} at s = {s:.6g}")
    t3 = t.truncate(3)
    Q3, dQ3, D3 = Qs.truncate(3), dQs.truncate(3), Delta_s.truncate(3)
    Phi_s = -(Q3 - t3 * dQ3) * (n * D3 + 1 + t3 * Q3) - (b_sq - t3 * t3) * (1 + t3 * Q3) * dQs.d(0)
    # Psi1 carries d/ds sqrt(b^2 - s^2): undefined on the edge y || b
    Psi1 = Psi1_printed = math.nan
    if interior:
        root = (b_sq - t4 * t4).sqrt()
        bracket = root * Delta_s.pow_r(-1.5)
        Psi1_printed = math.sqrt(b_sq - s * s) * math.sqrt(Delta) * bracket.extract((1,))
        bracket_phi = root.truncate(3) * Phi_s * D3.pow_r(-1.5)
        Psi1 = math.sqrt(b_sq - s * s) * math.sqrt(Delta) * bracket_phi.extract((1,))
    f = series_derivs(ph)
    p0, p1, p2 = f[0], f[1], f[2]
    Theta = (Q - s * dQ) / (2 * Delta)
    Psi = dQ / (2 * Delta)
    Phi = Phi_s.value
    Psi2 = 2 * (n + 1) * (Q - s * dQ) + 3 * Phi / Delta
    rho = p0 * (p0 - s * p1)
    rho0 = p0 * p2 + p1 * p1
    rho1 = -(s * (p0 * p2 + p1 * p1) - p0 * p1)
    rho2 = s * (s * (p0 * p2 + p1 * p1) - p0 * p1)
    X4 = (-2 * Delta * dddQ + 3 * (Q - s * dQ) * ddQ + 3 * (b_sq - s * s) * ddQ**2) / (2 * Delta**2)
    X6 = ((Q - s * dQ) ** 2 + (2 * (s + b_sq * Q) - (b_sq - s * s) * (Q - s * dQ)) * ddQ) / (2 * Delta**2)
    Y4 = -2 * Q * X4 + 3 * dQ * ddQ / Delta
    Y6 = -2 * Q * X6 + (Q - s * dQ) * dQ / Delta
    return ABScalars(
        s=s, b_sq=b_sq, n=n, phi=p0, dphi=p1, ddphi=p2, Q=Q, dQ=dQ, ddQ=ddQ, dddQ=dddQ,
        Delta=Delta, Theta=Theta, Psi=Psi, Phi=Phi, Psi1=Psi1, Psi1_printed=Psi1_printed, Psi2=Psi2,
        rho=rho, rho0=rho0, rho1=rho1, rho2=rho2, X4=X4, X6=X6, Y4=Y4, Y6=Y6,
        Lambda=-ddQ, mu=-(Q - s * dQ) / 3, Gamma_coef=1 / Delta, Pi=-Q / Delta,
    )


@dataclass(frozen=True)
class Frame:
    """Shared ingredients of the closed forms at (x, y)."""

    st: RiemannState
    y: np.ndarray
    alpha: float
    beta: float
    ybar: np.ndarray
    hvec: np.ndarray
    T: np.ndarray
    sc: ABScalars
    r00: float
    r_i0: np.ndarray
    s_i0: np.ndarray
    s_up_i0: np.ndarray
    r0: float
    s0: float
    s_i: np.ndarray


def frame(spec: MetricSpec, x, y, st: RiemannState | None = None) -> Frame:
    st = st or riemann_state(spec, x)
    y = np.asarray(y, float)
    ybar = st.a @ y
    alpha = math.sqrt(float(y @ ybar))
    beta = float(st.b @ y)
    s = beta / alpha
    sc = ab_scalars(spec.phi, s, st.b_norm_sq, spec.n)
    rs = rs_contractions(st, y)
    return Frame(
        st=st, y=y, alpha=alpha, beta=beta, ybar=ybar,
        hvec=alpha * st.b - s * ybar,
        T=alpha**2 * st.a - np.outer(ybar, ybar),
        sc=sc, r00=rs.r00, r_i0=rs.r_i0, s_i0=rs.s_i0, s_up_i0=rs.s_up_i0,
        r0=rs.r0, s0=rs.s0, s_i=st.s_vec,
    )


def spray_cf(spec: MetricSpec, x, y, fr: Frame | None = None) -> np.ndarray:
    fr = fr or frame(spec, x, y)
    st, sc, a = fr.st, fr.sc, fr.alpha
    G_alpha = 0.5 * np.einsum("ijk,j,k->i", st.gamma, fr.y, fr.y)
    return (
        G_alpha
        + a * sc.Q * fr.s_up_i0
        + (-2 * sc.Q * a * fr.s0 + fr.r00) * (sc.Theta * fr.y / a + sc.Psi * st.b_up)
    )


def mean_landsberg_cf(spec: MetricSpec, x, y, fr: Frame | None = None, printed: bool = False) -> np.ndarray:
    fr = fr or frame(spec, x, y)
    if not fr.sc.b_sq - fr.sc.s**2 > 1e-12 * fr.sc.b_sq:
        raise DomainError("b2-minus-s2-positive", "closed form divides by b^2 - s^2 (y parallel to b)")
    sc, a, h, yb = fr.sc, fr.alpha, fr.hvec, fr.ybar
    s, b2, n = sc.s, sc.b_sq, sc.n
    Q, dQ, D, Phi = sc.Q, sc.dQ, sc.Delta, sc.Phi
    r00s = fr.r00 - 2 * a * Q * fr.s0
    t1 = 2 * a**2 / (b2 - s * s) * (Phi / D + (n + 1) * (Q - s * dQ)) * (fr.r0 + fr.s0) * h
    psi1 = sc.Psi1_printed if printed else sc.Psi1
    t2 = a / (b2 - s * s) * (psi1 + s * Phi / D) * r00s * h
    inner = (
        -a * dQ * fr.s0 * h
        + a * Q * (a**2 * fr.s_i - yb * fr.s0)
        + a**2 * D * fr.s_i0
        + a**2 * (fr.r_i0 - 2 * a * Q * (fr.s0 if printed else fr.s_i))
        - r00s * yb
    )
    t3 = a * inner * Phi / D
    return -(t1 + t2 + t3) / (2 * a**4 * D)


def jbar_cf(spec: MetricSpec, x, y, fr: Frame | None = None, printed: bool = False) -> float:
    fr = fr or frame(spec, x, y)
    if not fr.sc.b_sq - fr.sc.s**2 > 1e-12 * fr.sc.b_sq:
        raise DomainError("b2-minus-s2-positive", "closed form divides by b^2 - s^2 (y parallel to b)")
    sc, a = fr.sc, fr.alpha
    psi1 = sc.Psi1_printed if printed else sc.Psi1
    return -(psi1 * (fr.r00 - 2 * a * sc.Q * fr.s0) + a * sc.Psi2 * (fr.r0 + fr.s0)) / (2 * a**2 * sc.Delta)


def landsberg_cf(spec: MetricSpec, x, y, fr: Frame | None = None) -> np.ndarray:
    fr = fr or frame(spec, x, y)
    sc, a, h, yb = fr.sc, fr.alpha, fr.hvec, fr.ybar
    D = a**2 * (fr.s_i0 + sc.Gamma_coef * fr.r_i0 + sc.Pi * a * fr.s_i) - (
        sc.Gamma_coef * fr.r00 + sc.Pi * a * fr.s0
    ) * yb
    Cv = (sc.X4 * fr.r00 + sc.Y4 * a * fr.s0) * h + 3 * sc.Lambda * D
    Ev = (sc.X6 * fr.r00 + sc.Y6 * a * fr.s0) * h + 3 * sc.mu * D
    hh = np.einsum("i,j->ij", h, h)
    body = (
        np.einsum("ij,k->ijk", hh, Cv) + np.einsum("jk,i->ijk", hh, Cv) + np.einsum("ik,j->ijk", hh, Cv)
        + 3 * (np.einsum("i,jk->ijk", Ev, fr.T) + np.einsum("j,ik->ijk", Ev, fr.T) + np.einsum("k,ij->ijk", Ev, fr.T))
    )
    return -sc.rho / (6 * a**5) * body


def mean_cartan_cf(spec: MetricSpec, x, y, fr: Frame | None = None) -> np.ndarray:
    """Mean Cartan torsion with the covector ``alpha b_i - s a_ij y^j``."""
    fr = fr or frame(spec, x, y)
    sc, a = fr.sc, fr.alpha
    return -sc.Phi * (sc.phi - sc.s * sc.dphi) / (2 * sc.Delta * sc.phi * a**2) * fr.hvec


def mean_cartan_cf_glow(spec: MetricSpec, x, y, y_low: np.ndarray, fr: Frame | None = None) -> np.ndarray:
    """Literal variant using ``y_i = g_ij y^j`` in the parenthesis (kept for comparison)."""
    fr = fr or frame(spec, x, y)
    sc, a = fr.sc, fr.alpha
    return -sc.Phi * (sc.phi - sc.s * sc.dphi) / (2 * sc.Delta * sc.phi * a**2) * (a * fr.st.b - sc.s * y_low)


def landsberg_reduced(fr: Frame) -> np.ndarray:
    """``V_ij s_k0 + V_jk s_i0 + V_ki s_j0``, valid when r_ij = 0 and s_j = 0."""
    sc, a, h = fr.sc, fr.alpha, fr.hvec
    V = sc.rho / (2 * a**3) * (sc.ddQ * np.outer(h, h) + (sc.Q - sc.s * sc.dQ) * fr.T)
    v = fr.s_i0
    return np.einsum("ij,k->ijk", V, v) + np.einsum("jk,i->ijk", V, v) + np.einsum("ki,j->ijk", V, v)


def mean_landsberg_reduced(fr: Frame) -> np.ndarray:
    """``-Phi/(2 alpha Delta) s_i0``, valid when r_ij = 0 and s_j = 0."""
    return -fr.sc.Phi / (2 * fr.alpha * fr.sc.Delta) * fr.s_i0


def g_expansion(fr: Frame) -> np.ndarray:
    """Fundamental tensor from the rho-coefficients."""
    sc, a = fr.sc, fr.alpha
    al = fr.ybar / a
    b = fr.st.b
    return sc.rho * fr.st.a + sc.rho0 * np.outer(b, b) + sc.rho1 * (np.outer(b, al) + np.outer(al, b)) + sc.rho2 * np.outer(al, al)


def angular_expansion(fr: Frame) -> np.ndarray:
    sc, a = fr.sc, fr.alpha
    al = fr.ybar / a
    b = fr.st.b
    p0, p1, p2, s = sc.phi, sc.dphi, sc.ddphi, sc.s
    return (
        p0 * (p0 - s * p1) * fr.st.a + p0 * p2 * np.outer(b, b)
        - s * p0 * p2 * (np.outer(b, al) + np.outer(al, b))
        - (p0 * (p0 - s * p1) - s * s * p0 * p2) * np.outer(al, al)
    )


@dataclass(frozen=True)
class LemmaResiduals:
    premise: bool
    premise_residual: float
    L1: float
    L2: float
    L3: float
    L4: float
    L5: float
    L2_levi_civita: float

    def as_dict(self) -> dict:
        return {"L1": self.L1, "L2": self.L2, "L3": self.L3, "L4": self.L4, "L5": self.L5}

    @property
    def max(self) -> float:
        return max(self.as_dict().values())


def lemma_residuals(spec: MetricSpec, x, y, ps=None, fr: Frame | None = None, premise_tol: float = 1e-9) -> LemmaResiduals:
    """Normalized residuals of the five identities valid when r_ij = 0, s_j = 0.

    ``ps`` is a definition-path :class:`~abfinsler.finsler.PointState`
    supplying ``y_i``, ``L`` and ``J``. Residuals are computed regardless of
    the premise; ``premise`` reports whether they are meant to vanish.
    """
    from .finsler import point_state

    ps = ps or point_state(spec, x, y)
    fr = fr or frame(spec, x, y)
    st = fr.st
    prem = max(float(np.max(np.abs(st.r))), float(np.max(np.abs(st.s_vec))))
    y = fr.y
    yl = ps.y_low
    nyl = float(np.linalg.norm(yl))

    v1 = fr.s_up_i0
    L1 = abs(float(yl @ v1)) / (1 + nyl * float(np.linalg.norm(v1)))

    # (s^i_0)_{|0} for the Berwald connection of F:
    # y^k d_k s^i_j y^j - 2 G^m s^i_m + s^m_0 N^i_m
    v2 = (
        np.einsum("ijk,j,k->i", st.d_s_mixed, y, y)
        - 2 * st.s_mixed @ ps.G
        + ps.N @ fr.s_up_i0
    )
    L2 = abs(float(yl @ v2)) / (1 + nyl * float(np.linalg.norm(v2)))
    # the alpha-covariant reading s^i_{j|k} y^j y^k is not annihilated by y_i
    ns_up = np.einsum("ih,hjk->ijk", st.a_inv, st.nabla_s)
    v2lc = np.einsum("ijk,j,k->i", ns_up, y, y)
    L2lc = abs(float(yl @ v2lc)) / (1 + nyl * float(np.linalg.norm(v2lc)))

    v3 = np.einsum("ijk,j,k->i", ns_up, st.b_up, y)
    lhs3 = float(yl @ v3)
    rhs3 = fr.sc.rho * float(fr.s_up_i0 @ fr.s_i0)
    L3 = abs(lhs3 - rhs3) / (1 + abs(lhs3) + abs(rhs3))

    bg = math.sqrt(max(float(st.b_up @ ps.g @ st.b_up), 0.0))
    L4 = abs(float(np.einsum("jkl,j,k,l->", ps.L, st.b_up, st.b_up, st.b_up))) / (1 + ps.norm(ps.L) * bg**3)
    L5 = abs(float(st.b_up @ ps.J)) / (1 + ps.norm(ps.J) * bg)
    return LemmaResiduals(prem <= premise_tol, prem, L1, L2, L3, L4, L5, L2lc)
