"""Finsler tensors computed from their definitions.

Everything here starts from jets of F^2 and never uses the closed-form
(alpha, beta) identities, so it serves as the oracle for :mod:`alphabeta`.

The Landsberg tensor is obtained as ``L_jkl = -1/2 y_m B^m_jkl``. The
P-reducibility deviation ``PRED = L - sym(J x h)/(n+1)`` also equals the
derivative of the Matsumoto torsion along the spray, ``M_{ijk|s} y^s``,
because ``h_{ij|s} y^s = 0`` and ``F_{|s} = 0`` for the Berwald connection;
no separate covariant-derivative path is needed for M.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .jet import Jet, JetSpace, space
from .metric import DomainError, MetricSpec, fiber_seeds
from .volume import VolumeDensity, volume_density


# matrix- and vector-valued jets share a scalar jet space ---------------------

def _tmul(sp: JetSpace, A: np.ndarray, B: np.ndarray, subscripts: str) -> np.ndarray:
    """Truncated product of coefficient arrays (leading axis = coefficients)."""
    ia, ib, ic = sp.mul_table
    prods = np.einsum(subscripts, A[ia], B[ib])
    out = np.zeros((sp.size,) + prods.shape[1:])
    np.add.at(out, ic, prods)
    return out


@lru_cache(maxsize=None)
def _deriv_index(n: int, deg_y: int, order: int):
    sp = space(n, deg_y, 0)
    idx = list(itertools.product(range(n), repeat=order))
    flat, fact = [], []
    for t in idx:
        m = [0] * n
        for i in t:
            m[i] += 1
        k = sp.flat(m, 0)
        flat.append(k)
        fact.append(sp.factorials[k])
    return np.array(flat), np.array(fact)


def _derivs(sp: JetSpace, C: np.ndarray, order: int) -> np.ndarray:
    """All fiber partials of given order; new axes appended after the value axes."""
    n = sp.n
    flat, fact = _deriv_index(n, sp.deg_y, order)
    vals = C[flat] * fact.reshape((-1,) + (1,) * (C.ndim - 1))
    vals = vals.reshape((n,) * order + C.shape[1:])
    return np.moveaxis(vals, list(range(order)), list(range(C.ndim - 1, C.ndim - 1 + order)))


def sym3(v: np.ndarray, h: np.ndarray) -> np.ndarray:
    """``v_i h_jk + v_j h_ik + v_k h_ij``."""
    return np.einsum("i,jk->ijk", v, h) + np.einsum("j,ik->ijk", v, h) + np.einsum("k,ij->ijk", v, h)


@dataclass(frozen=True)
class PointState:
    """Definition-path tensors at (x, y); index positions follow the names.

    ``N[i, j] = dG^i/dy^j`` are the nonlinear connection coefficients.
    """

    spec: MetricSpec
    x: np.ndarray
    y: np.ndarray
    F: float
    g: np.ndarray
    g_inv: np.ndarray
    y_low: np.ndarray
    h: np.ndarray
    C: np.ndarray
    I: np.ndarray
    M: np.ndarray
    G: np.ndarray
    B: np.ndarray
    L: np.ndarray
    J: np.ndarray
    PRED: np.ndarray
    N: np.ndarray
    div_G: float

    @property
    def n(self) -> int:
        return len(self.x)

    @cached_property
    def volume(self) -> VolumeDensity:
        return volume_density(self.spec, self.x)

    @cached_property
    def S(self) -> float:
        """S-curvature ``dG^i/dy^i - y^i d_i ln sigma_F``."""
        return float(self.div_G - self.y @ self.volume.grad_log_sigma)

    def norm(self, T: np.ndarray) -> float:
        """g-norm of a covariant tensor (all indices raised by g^-1)."""
        gi = self.g_inv
        k = T.ndim
        if k == 0:
            return abs(float(T))
        U = T
        for ax in range(k):
            U = np.moveaxis(np.tensordot(gi, U, axes=([1], [ax])), 0, ax)
        return math.sqrt(max(float(np.sum(U * T)), 0.0))

    def norm_mixed(self, T: np.ndarray) -> float:
        """g-norm of a tensor with first index up and the rest down (e.g. B)."""
        Tl = np.tensordot(self.g, T, axes=([1], [0]))
        return self.norm(Tl) if Tl.ndim else abs(float(Tl))


def _orthonormal_frame(spec: MetricSpec, bd, y) -> np.ndarray:
    """E with E^T g E = I from a low-order jet of F^2."""
    g = 0.5 * spec.F2_jet(bd, y, None, 2).hessian()
    w, V = np.linalg.eigh(g)
    if w[0] <= 0:
        raise DomainError("g-positive-definite", f"smallest eigenvalue {w[0]:.3g}")
    return V / np.sqrt(w)


def _lower(T: np.ndarray, Einv: np.ndarray) -> np.ndarray:
    """Frame components of a covariant tensor to coordinate components."""
    for ax in range(T.ndim):
        T = np.moveaxis(np.tensordot(Einv, T, axes=([0], [ax])), 0, ax)
    return T


def point_state(spec: MetricSpec, x: Sequence[float], y: Sequence[float]) -> PointState:
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = spec.n
    bd = spec.base_data(x)
    # fiber jets are taken in a g-orthonormal frame (y = y0 + E u): high
    # derivatives of 1/s-type profiles stay balanced across directions
    E = _orthonormal_frame(spec, bd, y)
    Einv = np.linalg.inv(E)
    dirs = [spec.F2_jet(bd, y, k, frame=E) for k in range(n)]
    P = dirs[0].base_coeff(0)  # F^2, fiber jet of degree 5
    F2 = P.value
    if F2 <= 0:
        raise DomainError("F-positive", f"F^2 = {F2:.3g}")
    F = math.sqrt(F2)

    sp3 = space(n, 3, 0)
    # g_ab as jets of degree 3 (frame components)
    gj = np.empty((sp3.size, n, n))
    dP = [P.d(i) for i in range(n)]
    for i in range(n):
        dPi = dP[i].d(i)
        gj[:, i, i] = 0.5 * dPi.truncate(3).c
        for j in range(i + 1, n):
            c = 0.5 * dP[i].d(j).truncate(3).c
            gj[:, i, j] = c
            gj[:, j, i] = c
    g_u = gj[0]
    try:
        g0inv = np.linalg.inv(g_u)
    except np.linalg.LinAlgError:
        raise DomainError("g-nondegenerate", "singular fundamental tensor") from None
    # Neumann series: (g0 + N)^-1 = sum_m (-g0^-1 N)^m g0^-1
    N = gj.copy()
    N[0] = 0.0
    K = -np.einsum("ij,cjk->cik", g0inv, N)
    term = np.zeros_like(gj)
    term[0] = g0inv
    ginvj = term.copy()
    for _ in range(3):
        term = _tmul(sp3, K, term, "cij,cjk->cik")
        ginvj = ginvj + term

    # T_a = y^k d_a d_{x^k} F^2 - E_la d_{x^l} F^2, degree 3
    dx = [d.base_coeff(1) for d in dirs]  # degree 5 jets of d_{x^k} F^2
    Tj = np.empty((sp3.size, n))
    yk = fiber_seeds(y, E, 4)
    for a in range(n):
        acc = None
        for k in range(n):
            t = yk[k] * dx[k].d(a).truncate(4) - dx[k].truncate(4) * E[k, a]
            acc = t if acc is None else acc + t
        Tj[:, a] = acc.truncate(3).c
    Gj = 0.25 * _tmul(sp3, ginvj, Tj, "cil,cl->ci")

    dG_u = _derivs(sp3, Gj, 1)  # d G^a / d u^b
    B_u = _derivs(sp3, Gj, 3)
    y_u = Einv @ y
    yl_u = g_u @ y_u
    C_u = 0.25 * P.derivative_tensor(3)
    gi_u = ginvj[0]
    L_u = -0.5 * np.einsum("m,mjkl->jkl", yl_u, B_u)

    g = _lower(g_u, Einv)
    if np.linalg.cond(g) > 1e12:
        raise DomainError("g-nondegenerate", f"condition number {np.linalg.cond(g):.3g}")
    ginv = E @ gi_u @ E.T
    y_low = g @ y
    h = g - np.outer(y_low, y_low) / F2
    C = _lower(C_u, Einv)
    L = _lower(L_u, Einv)
    I = np.einsum("jk,ijk->i", ginv, C)
    M = C - sym3(I, h) / (n + 1)
    J = np.einsum("jk,ijk->i", ginv, L)
    PRED = L - sym3(J, h) / (n + 1)
    G = E @ Gj[0]
    dG = E @ dG_u @ Einv
    B = np.einsum("ia,abcd,bj,ck,dl->ijkl", E, B_u, Einv, Einv, Einv)
    return PointState(
        spec=spec, x=x, y=y, F=F, g=g, g_inv=ginv, y_low=y_low, h=h, C=C, I=I, M=M,
        G=G, B=B, L=L, J=J, PRED=PRED, N=dG, div_G=float(np.trace(dG)),
    )


# thin operation wrappers -----------------------------------------------------

def eval_F(spec: MetricSpec, x, y, direction: int | None = None, deg_y: int = 5) -> Jet:
    return spec.F2_jet(spec.base_data(x), y, direction, deg_y)


def fundamental(spec, x, y):
    st = point_state(spec, x, y)
    return st.g, st.g_inv, st.y_low, st.h


def cartan_tensors(spec, x, y):
    st = point_state(spec, x, y)
    return st.C, st.I, st.M


def spray(spec, x, y) -> np.ndarray:
    return point_state(spec, x, y).G


def berwald_landsberg(spec, x, y):
    st = point_state(spec, x, y)
    return st.B, st.L, st.J, st.PRED


def s_curvature(spec, x, y) -> float:
    return point_state(spec, x, y).S
