"""(alpha, beta)-metric specifications and their base-point data."""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exprs
from .jet import Jet, seed_base
from .phi import PhiFamily


class DomainError(ValueError):
    """An evaluation point violates a regularity guard."""

    def __init__(self, guard: str, detail: str = ""):
        super().__init__(f"{guard}: {detail}" if detail else guard)
        self.guard = guard


@dataclass(frozen=True)
class BaseData:
    """Exact values and first/second partials of a_ij and b_i at one x.

    ``da[i, j, k] = d_k a_ij``, ``dda[i, j, k, l] = d_k d_l a_ij``,
    ``db[i, k] = d_k b_i``, ``ddb[i, k, l] = d_k d_l b_i``.
    """

    x: np.ndarray
    a: np.ndarray
    da: np.ndarray
    dda: np.ndarray
    b: np.ndarray
    db: np.ndarray
    ddb: np.ndarray


@dataclass(eq=False)
class MetricSpec:
    """``F = alpha * phi(beta / alpha)`` on a single chart.

    ``a_texts`` is the full symmetric matrix of expression strings and
    ``b_texts`` the covector; both are parsed on construction.
    """

    n: int
    a_texts: tuple[tuple[str, ...], ...]
    b_texts: tuple[str, ...]
    phi: PhiFamily
    box: tuple[tuple[float, float], ...]
    id: str = "custom"
    params: dict = field(default_factory=dict)
    _cache: OrderedDict = field(default_factory=OrderedDict, repr=False)

    def __post_init__(self):
        if not 2 <= self.n <= 4:
            raise ValueError(f"chart dimension must be 2..4, got {self.n}")
        if len(self.a_texts) != self.n or any(len(r) != self.n for r in self.a_texts):
            raise ValueError("a must be an n x n matrix of expressions")
        if len(self.b_texts) != self.n:
            raise ValueError("b must have n expressions")
        if len(self.box) != self.n:
            raise ValueError("box must have one interval per chart coordinate")
        self.a_exprs = [[exprs.parse(t, self.n) for t in row] for row in self.a_texts]
        for i in range(self.n):
            for j in range(i):
                if self.a_exprs[i][j] != self.a_exprs[j][i]:
                    raise ValueError(f"a is not symmetric at ({i + 1},{j + 1})")
        self.b_exprs = [exprs.parse(t, self.n) for t in self.b_texts]

    # base data ----------------------------------------------------------
    def _directional(self, x: np.ndarray, v: np.ndarray):
        """Taylor coefficients (value, D_v, D_v^2 / 2) of a and b along v."""
        xs = [seed_base(float(x[i]), 1, 0, 2, float(v[i])) for i in range(self.n)]
        cache: dict = {}
        n = self.n
        A = np.empty((n, n, 3))
        for i in range(n):
            for j in range(i, n):
                A[i, j] = A[j, i] = exprs.eval_jet(self.a_exprs[i][j], xs, cache).c
        B = np.array([exprs.eval_jet(e, xs, cache).c for e in self.b_exprs])
        return A, B

    def base_data(self, x: Sequence[float]) -> BaseData:
        """Exact partials via directional jets along e_k and e_k + e_l."""
        x = np.asarray(x, float)
        key = tuple(x.tolist())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        eye = np.eye(n)
        first_a, first_b, sec_a, sec_b = {}, {}, {}, {}
        for k in range(n):
            A, B = self._directional(x, eye[k])
            first_a[k], first_b[k] = A[..., 1], B[..., 1]
            sec_a[k, k], sec_b[k, k] = 2 * A[..., 2], 2 * B[..., 2]
            a0, b0 = A[..., 0], B[..., 0]
        for k in range(n):
            for l in range(k + 1, n):
                A, B = self._directional(x, eye[k] + eye[l])
                sec_a[k, l] = sec_a[l, k] = (2 * A[..., 2] - sec_a[k, k] - sec_a[l, l]) / 2
                sec_b[k, l] = sec_b[l, k] = (2 * B[..., 2] - sec_b[k, k] - sec_b[l, l]) / 2
        da = np.stack([first_a[k] for k in range(n)], axis=-1)
        db = np.stack([first_b[k] for k in range(n)], axis=-1)
        dda = np.empty((n, n, n, n))
        ddb = np.empty((n, n, n))
        for k in range(n):
            for l in range(n):
                dda[..., k, l] = sec_a[k, l]
                ddb[..., k, l] = sec_b[k, l]
        out = BaseData(x, a0, da, dda, b0, db, ddb)
        self._cache[key] = out
        if len(self._cache) > 64:
            self._cache.popitem(last=False)
        return out

    # F evaluation -------------------------------------------------------
    def F(self, x: Sequence[float], y: Sequence[float]) -> float:
        bd = self.base_data(x)
        y = np.asarray(y, float)
        alpha = math.sqrt(y @ bd.a @ y)
        return alpha * self.phi(float(bd.b @ y) / alpha)

    def F_batch(self, bd: BaseData, Y: np.ndarray):
        """F and its base gradient at many fiber points (rows of Y).

        Directions outside a half-space profile's domain get ``F = inf``.
        """
        alpha2 = np.einsum("pi,ij,pj->p", Y, bd.a, Y)
        alpha = np.sqrt(alpha2)
        beta = Y @ bd.b
        s = beta / alpha
        dalpha = np.einsum("pi,ijk,pj->pk", Y, bd.da, Y) / (2 * alpha[:, None])
        dbeta = np.einsum("pi,ik->pk", Y, bd.db)
        inside = (s > self.phi.lo) & (s < self.phi.hi)
        if not self.phi.half_space and not inside.all():
            raise DomainError("phi-domain", "indicatrix leaves the validity interval of phi")
        ss = np.where(inside, s, 0.5 * (max(self.phi.lo, -1.0) + min(self.phi.hi, 1.0)))
        ph = self.phi.value_np(ss)
        dph = self.phi.d1_np(ss)
        F = np.where(inside, alpha * ph, np.inf)
        dF = dalpha * (ph - ss * dph)[:, None] + dph[:, None] * dbeta
        dF[~inside] = 0.0
        return F, dF, inside

    # fiber jets -----------------------------------------------------------
    def F2_jet(self, bd: BaseData, y: Sequence[float], direction: int | None, deg_y: int = 5,
               frame: np.ndarray | None = None) -> Jet:
        """Jet of F^2 in the fiber around y and (optionally) x^direction.

        With ``frame`` E the fiber variables are u in ``y + E u``.
        """
        from .phi import compose_phi

        n = self.n
        deg_x = 0 if direction is None else 1
        ys = fiber_seeds(y, frame, deg_y, deg_x)

        def base(v, dv):
            return Jet.from_base_series([v, dv], n, deg_y, deg_x)

        k = direction
        alpha2 = None
        for i in range(n):
            vi = None
            for j in range(n):
                aij = base(bd.a[i, j], 0.0 if k is None else bd.da[i, j, k])
                t = aij * ys[j]
                vi = t if vi is None else vi + t
            t = vi * ys[i]
            alpha2 = t if alpha2 is None else alpha2 + t
        beta = None
        for i in range(n):
            t = base(bd.b[i], 0.0 if k is None else bd.db[i, k]) * ys[i]
            beta = t if beta is None else beta + t
        if alpha2.value <= 0:
            raise DomainError("alpha-positive", f"alpha^2 = {alpha2.value:.3g}")
        alpha = alpha2.sqrt()
        s = beta / alpha
        if not self.phi.in_domain(s.value):
            raise DomainError("phi-domain", f"s = {s.value:.6g} outside ({self.phi.lo:.6g}, {self.phi.hi:.6g})")
        ph = compose_phi(self.phi, s)
        return alpha2 * ph * ph

    def describe(self) -> dict:
        return {
            "id": self.id,
            "params": dict(self.params),
            "n": self.n,
            "phi": {"name": self.phi.name, **self.phi.param_dict},
        }


def fiber_seeds(y: Sequence[float], frame: np.ndarray | None, deg_y: int, deg_x: int = 0) -> list[Jet]:
    """Jets of the coordinates y^i as functions of the fiber variables."""
    from .jet import seed_fiber

    n = len(y)
    if frame is None:
        return [seed_fiber(float(y[i]), i, n, deg_y, deg_x) for i in range(n)]
    u = [seed_fiber(0.0, a, n, deg_y, deg_x) for a in range(n)]
    out = []
    for i in range(n):
        c = u[0].c * frame[i, 0]
        for a in range(1, n):
            c = c + u[a].c * frame[i, a]
        j = Jet(u[0].sp, c)
        j.c[0] = float(y[i])
        out.append(j)
    return out


def make_spec(n, a, b, phi, box=None, id="custom", params=None) -> MetricSpec:
    """Build a spec; ``a`` may be a full matrix or its lower triangle."""
    rows = [list(r) for r in a]
    if all(len(rows[i]) == i + 1 for i in range(n)):
        full = [[rows[max(i, j)][min(i, j)] for j in range(n)] for i in range(n)]
    else:
        full = rows
    box = box or [(-1.0, 1.0)] * n
    return MetricSpec(
        n,
        tuple(tuple(str(t) for t in r) for r in full),
        tuple(str(t) for t in b),
        phi,
        tuple((float(lo), float(hi)) for lo, hi in box),
        id,
        dict(params or {}),
    )
