"""Busemann-Hausdorff volume density by spherical quadrature.

For any invertible linear map E, Vol{F < 1} = |det E| / n * integral over
the unit sphere of F(E u)^-n. E is chosen so that alpha(E u) = |u| and the
pole axis points along the alpha-dual of b: the integrand then depends on
the polar angle only through s = b cos(theta), and the boundary s = 0 of
half-space profiles falls on a quadrature panel edge. Holding E fixed while
x varies gives the base gradient from first-order base derivatives of F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .metric import BaseData, MetricSpec

CONVERGENCE_TOL = 1e-8


class QuadratureError(RuntimeError):
    def __init__(self, discrepancy: float):
        super().__init__(f"volume quadrature not converged: two-resolution discrepancy {discrepancy:.3e}")
        self.discrepancy = discrepancy


def _gl(m: int, lo: float, hi: float):
    t, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (hi - lo) * t + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


@lru_cache(maxsize=None)
def sphere_rule(n: int, half: bool = False):
    """Nodes (rows, pole = first axis) and weights summing to |S^{n-1}|."""
    f = 2 if half else 1
    if n == 2:
        m = 4096 // f
        th = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(th), np.sin(th)], axis=1), np.full(m, 2 * np.pi / m)
    if n == 3:
        m, naz = 32 // f, 128 // f
        t1, w1 = _gl(m, -1.0, 0.0)
        t2, w2 = _gl(m, 0.0, 1.0)
        t, wt = np.concatenate([t1, t2]), np.concatenate([w1, w2])
        psi = 2 * np.pi * np.arange(naz) / naz
        T, P = np.meshgrid(t, psi, indexing="ij")
        rho = np.sqrt(1 - T**2)
        U = np.stack([T, rho * np.cos(P), rho * np.sin(P)], axis=-1).reshape(-1, 3)
        W = (wt[:, None] * np.full(naz, 2 * np.pi / naz)[None, :]).ravel()
        return U, W
    if n == 4:
        m1, m2, naz = 24 // f, 96 // f, 96 // f
        a1, v1 = _gl(m1, 0.0, np.pi / 2)
        a2, v2 = _gl(m1, np.pi / 2, np.pi)
        th, wth = np.concatenate([a1, a2]), np.concatenate([v1, v2]) * np.sin(np.concatenate([a1, a2])) ** 2
        t2, w2 = _gl(m2, -1.0, 1.0)
        psi = 2 * np.pi * np.arange(naz) / naz
        TH, T2, P = np.meshgrid(th, t2, psi, indexing="ij")
        r2 = np.sqrt(1 - T2**2)
        U = np.stack(
            [np.cos(TH), np.sin(TH) * T2, np.sin(TH) * r2 * np.cos(P), np.sin(TH) * r2 * np.sin(P)], axis=-1
        ).reshape(-1, 4)
        W = (wth[:, None, None] * w2[None, :, None] * np.full(naz, 2 * np.pi / naz)[None, None, :]).ravel()
        return U, W
    raise ValueError(f"no sphere rule for n={n}")


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def adapted_frame(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """E with alpha(E u) = |u| and E e_1 along the alpha-dual of b."""
    L = np.linalg.cholesky(a)
    LinvT = np.linalg.inv(L).T
    v = np.linalg.solve(L, b)
    nv = np.linalg.norm(v)
    n = len(b)
    if nv == 0.0:
        return LinvT
    v = v / nv
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = e1 - v
    if np.linalg.norm(w) < 1e-14:
        Q = np.eye(n)
    else:
        w /= np.linalg.norm(w)
        Q = np.eye(n) - 2 * np.outer(w, w)  # Householder: Q e1 = v
    return LinvT @ Q


@dataclass(frozen=True)
class VolumeDensity:
    sigma: float
    grad_log_sigma: np.ndarray
    discrepancy: float


def _integrate(spec: MetricSpec, bd: BaseData, E: np.ndarray, half: bool):
    U, W = sphere_rule(spec.n, half)
    Y = U @ E.T
    F, dF, inside = spec.F_batch(bd, Y)
    n = spec.n
    Fi = np.where(inside, F, 1.0)
    integrand = np.where(inside, Fi ** (-n), 0.0)
    dintegrand = np.where(inside[:, None], -n * Fi[:, None] ** (-n - 1) * dF, 0.0)
    scale = abs(np.linalg.det(E)) / n
    vol = scale * float(W @ integrand)
    dvol = scale * (W @ dintegrand)
    return vol, dvol


def volume_density(spec: MetricSpec, x, check: bool = True) -> VolumeDensity:
    bd = spec.base_data(x)
    E = adapted_frame(bd.a, bd.b)
    vol, dvol = _integrate(spec, bd, E, half=False)
    grad = -dvol / vol
    disc = 0.0
    if check:
        vol_h, dvol_h = _integrate(spec, bd, E, half=True)
        grad_h = -dvol_h / vol_h
        disc = max(abs(vol - vol_h) / abs(vol), float(np.max(np.abs(grad - grad_h))) / (1 + float(np.max(np.abs(grad)))))
        if disc > CONVERGENCE_TOL:
            raise QuadratureError(disc)
    return VolumeDensity(unit_ball_volume(spec.n) / vol, grad, disc)
