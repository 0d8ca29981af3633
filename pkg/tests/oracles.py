"""Symbolic reference computations (sympy), independent of the jet engine."""

import functools

import numpy as np
import sympy as sp

PHI_EXPR = {
    "randers": lambda s, p: 1 + s,
    "riemannian": lambda s, p: sp.Integer(1),
    "kropina": lambda s, p: 1 / s,
    "matsumoto": lambda s, p: 1 / (1 - s),
    "randers-type": lambda s, p: p["c1"] * sp.sqrt(1 + p["c2"] * s**2) + p["c3"] * s,
    "rk-change": lambda s, p: -1 / (2 * p["c1"] * s) + p["c2"] * s / (2 * p["c1"]),
}


def _sym(text, xs):
    return sp.sympify(text.replace("^", "**"), locals={f"x{i + 1}": x for i, x in enumerate(xs)})


class SymbolicMetric:
    def __init__(self, spec):
        n = spec.n
        self.n = n
        self.xs = sp.symbols(f"x1:{n + 1}", real=True)
        self.ys = sp.symbols(f"y1:{n + 1}", real=True)
        self.a = sp.Matrix(n, n, lambda i, j: _sym(spec.a_texts[i][j], self.xs))
        self.b = [_sym(t, self.xs) for t in spec.b_texts]
        y = sp.Matrix(self.ys)
        self.alpha = sp.sqrt((y.T * self.a * y)[0])
        self.beta = sum(bi * yi for bi, yi in zip(self.b, self.ys))
        s = sp.Symbol("s")
        phi = PHI_EXPR[spec.phi.name](s, spec.phi.param_dict)
        self.F = self.alpha * phi.subs(s, self.beta / self.alpha)
        self.F2 = self.F**2

    @functools.cached_property
    def christoffel(self):
        n, a, xs = self.n, self.a, self.xs
        ainv = a.inv()
        return [[[sp.Rational(1, 2) * sum(ainv[i, m] * (sp.diff(a[m, j], xs[k]) + sp.diff(a[m, k], xs[j]) - sp.diff(a[j, k], xs[m])) for m in range(n))
                  for k in range(n)] for j in range(n)] for i in range(n)]

    def riemann_numeric(self, x):
        """Gamma^i_jk, r_ij, s_ij at x."""
        n, xs = self.n, self.xs
        sub = dict(zip(xs, map(float, x)))
        G = self.christoffel
        Gn = np.array([[[float(G[i][j][k].subs(sub)) for k in range(n)] for j in range(n)] for i in range(n)])
        nb = np.array([[float((sp.diff(self.b[i], xs[j]) - sum(self.b[k] * G[k][i][j] for k in range(n))).subs(sub)) for j in range(n)] for i in range(n)])
        return Gn, (nb + nb.T) / 2, (nb - nb.T) / 2

    def finsler_numeric(self, x, y):
        """F, g_ij, C_ijk, G^i at (x, y) from the defining formulas."""
        n, xs, ys = self.n, self.xs, self.ys
        sub = {**dict(zip(xs, map(float, x))), **dict(zip(ys, map(float, y)))}
        F2 = self.F2
        dF2 = [sp.diff(F2, v) for v in ys]
        g = np.array([[float(sp.diff(dF2[i], ys[j]).subs(sub)) / 2 for j in range(n)] for i in range(n)])
        C = np.array([[[float(sp.diff(dF2[i], ys[j], ys[k]).subs(sub)) / 4 for k in range(n)] for j in range(n)] for i in range(n)])
        gi = np.linalg.inv(g)
        w = np.array([float(sum(sp.diff(dF2[l], xs[k]) * ys[k] for k in range(n)).subs(sub) - sp.diff(F2, xs[l]).subs(sub)) for l in range(n)])
        G = gi @ w / 4
        return float(self.F.subs(sub)), g, C, G
