"""Levi-Civita data of alpha and covariant derivatives of beta."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .metric import BaseData, DomainError, MetricSpec


@dataclass(frozen=True)
class RiemannState:
    """Everything about (alpha, beta) at one base point.

    Index conventions: ``gamma[i, j, k] = Gamma^i_jk``,
    ``dgamma[i, j, k, l] = d_l Gamma^i_jk``, ``nabla_b[i, j] = b_{i|j}``,
    ``nabla_s[i, j, k] = s_{ij|k}``.
    """

    x: np.ndarray
    a: np.ndarray
    a_inv: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    b: np.ndarray
    b_up: np.ndarray
    b_norm_sq: float
    nabla_b: np.ndarray
    r: np.ndarray
    s: np.ndarray
    s_mixed: np.ndarray
    s_vec: np.ndarray
    r_vec: np.ndarray
    nabla_s: np.ndarray
    d_s_mixed: np.ndarray
    base: BaseData

    @property
    def n(self) -> int:
        return len(self.x)


def _spd_inverse(a: np.ndarray) -> np.ndarray:
    try:
        L = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise DomainError("a-positive-definite", f"eigenvalues {np.linalg.eigvalsh(a)}") from None
    Linv = np.linalg.inv(L)
    return Linv.T @ Linv


def riemann_state(spec: MetricSpec, x: Sequence[float]) -> RiemannState:
    bd = spec.base_data(x)
    a, da, dda, b, db, ddb = bd.a, bd.da, bd.dda, bd.b, bd.db, bd.ddb
    ainv = _spd_inverse(a)
    # first-kind symbols Gamma_{m,jk} = (d_j a_mk + d_k a_jm - d_m a_jk) / 2
    g1 = 0.5 * (np.einsum("mkj->mjk", da) + np.einsum("jmk->mjk", da) - np.einsum("jkm->mjk", da))
    gamma = np.einsum("im,mjk->ijk", ainv, g1)
    dg1 = 0.5 * (
        np.einsum("mkjl->mjkl", dda) + np.einsum("jmkl->mjkl", dda) - np.einsum("jkml->mjkl", dda)
    )
    dainv = -np.einsum("ip,pql,qm->iml", ainv, da, ainv)
    dgamma = np.einsum("iml,mjk->ijkl", dainv, g1) + np.einsum("im,mjkl->ijkl", ainv, dg1)

    # b_{i|j} = d_j b_i - Gamma^m_ij b_m
    nabla_b = db - np.einsum("mij,m->ij", gamma, b)
    # d_k b_{i|j}
    d_nabla_b = ddb - np.einsum("mijk,m->ijk", dgamma, b) - np.einsum("mij,mk->ijk", gamma, db)
    r = 0.5 * (nabla_b + nabla_b.T)
    s = 0.5 * (nabla_b - nabla_b.T)
    ds = 0.5 * (d_nabla_b - np.einsum("jik->ijk", d_nabla_b))
    # s_{ij|k} = d_k s_ij - Gamma^m_ki s_mj - Gamma^m_kj s_im
    nabla_s = ds - np.einsum("mki,mj->ijk", gamma, s) - np.einsum("mkj,im->ijk", gamma, s)
    # d_k s^i_j
    d_s_mixed = np.einsum("ihk,hj->ijk", dainv, s) + np.einsum("ih,hjk->ijk", ainv, ds)

    b_up = ainv @ b
    return RiemannState(
        x=np.asarray(x, float),
        a=a,
        a_inv=ainv,
        gamma=gamma,
        dgamma=dgamma,
        b=b,
        b_up=b_up,
        b_norm_sq=float(b @ b_up),
        nabla_b=nabla_b,
        r=r,
        s=s,
        s_mixed=ainv @ s,
        s_vec=b_up @ s,
        r_vec=b_up @ r,
        nabla_s=nabla_s,
        d_s_mixed=d_s_mixed,
        base=bd,
    )


@dataclass(frozen=True)
class RSContractions:
    r00: float
    r_i0: np.ndarray
    s_i0: np.ndarray
    s_up_i0: np.ndarray
    r0: float
    s0: float


def rs_contractions(st: RiemannState, y: Sequence[float]) -> RSContractions:
    y = np.asarray(y, float)
    if not np.any(y):
        raise ValueError("y must be nonzero")
    r_i0 = st.r @ y
    s_i0 = st.s @ y
    return RSContractions(
        r00=float(y @ r_i0),
        r_i0=r_i0,
        s_i0=s_i0,
        s_up_i0=st.a_inv @ s_i0,
        r0=float(st.r_vec @ y),
        s0=float(st.s_vec @ y),
    )


def metric_compatibility_residual(st: RiemannState) -> float:
    """max |d_k a_ij - Gamma^m_ki a_mj - Gamma^m_kj a_im|."""
    da = st.base.da
    res = da - np.einsum("mki,mj->ijk", st.gamma, st.a) - np.einsum("mkj,im->ijk", st.gamma, st.a)
    return float(np.max(np.abs(res)))
