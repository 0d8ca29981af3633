"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` holds the Taylor coefficients of a scalar function of ``n``
fiber variables (total degree ``<= deg_y``) and one base variable
(degree ``<= deg_x``) around a point. Coefficients are Taylor-normalized:
``coeff = partial derivative / multi-index factorial``.

Fiber multi-indices are stored in graded lexicographic order.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

MAX_N = 4
MAX_DEG_Y = 6
MAX_DEG_X = 2


class JetError(ValueError):
    """Invalid jet construction or arithmetic."""


class JetDomainError(JetError):
    """An elementary function was applied outside its domain."""


def _graded_lex(n: int, deg: int) -> list[tuple[int, ...]]:
    out = []
    for d in range(deg + 1):
        block = [m for m in itertools.product(range(d + 1), repeat=n) if sum(m) == d]
        block.sort(reverse=True)
        out.extend(block)
    return out


class JetSpace:
    """Index tables shared by all jets of one shape (cached per shape)."""

    def __init__(self, n: int, deg_y: int, deg_x: int):
        if not (1 <= n <= MAX_N):
            raise JetError(f"fiber dimension must be in 1..{MAX_N}, got {n}")
        if not (0 <= deg_y <= MAX_DEG_Y) or not (0 <= deg_x <= MAX_DEG_X):
            raise JetError(f"unsupported truncation deg_y={deg_y}, deg_x={deg_x}")
        self.n, self.deg_y, self.deg_x = n, deg_y, deg_x
        self.fiber = _graded_lex(n, deg_y)
        self.fiber_pos = {m: i for i, m in enumerate(self.fiber)}
        self.nb = deg_x + 1
        self.size = len(self.fiber) * self.nb
        self.fiber_deg = np.array([sum(m) for m in self.fiber])
        fact = np.array([math.prod(math.factorial(k) for k in m) for m in self.fiber], float)
        self.factorials = (fact[:, None] * np.array([math.factorial(p) for p in range(self.nb)])[None, :]).ravel()
        self._mul = None
        self._deriv: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def flat(self, multi: Sequence[int], p: int) -> int:
        return self.fiber_pos[tuple(multi)] * self.nb + p

    @property
    def mul_table(self):
        if self._mul is None:
            ia, ib, ic = [], [], []
            for fa, ma in enumerate(self.fiber):
                da = sum(ma)
                for fb, mb in enumerate(self.fiber):
                    if da + sum(mb) > self.deg_y:
                        continue
                    fc = self.fiber_pos[tuple(x + y for x, y in zip(ma, mb))]
                    for pa in range(self.nb):
                        for pb in range(self.nb - pa):
                            ia.append(fa * self.nb + pa)
                            ib.append(fb * self.nb + pb)
                            ic.append(fc * self.nb + pa + pb)
            self._mul = (np.array(ia), np.array(ib), np.array(ic))
        return self._mul

    def deriv_table(self, axis: int):
        """Source index, target index and multiplier for d/dy^axis."""
        if axis not in self._deriv:
            low = space(self.n, max(self.deg_y - 1, 0), self.deg_x)
            src, dst, mult = [], [], []
            for f, m in enumerate(self.fiber):
                if m[axis] == 0:
                    continue
                mm = list(m)
                mm[axis] -= 1
                g = low.fiber_pos.get(tuple(mm))
                if g is None:
                    continue
                for p in range(self.nb):
                    src.append(f * self.nb + p)
                    dst.append(g * self.nb + p)
                    mult.append(m[axis])
            self._deriv[axis] = (np.array(src, int), np.array(dst, int), np.array(mult, float))
        return self._deriv[axis]


@lru_cache(maxsize=None)
def space(n: int, deg_y: int, deg_x: int) -> JetSpace:
    return JetSpace(n, deg_y, deg_x)


class Jet:
    """Truncated Taylor expansion; immutable value semantics."""

    __slots__ = ("sp", "c")
    __array_priority__ = 100

    def __init__(self, sp: JetSpace, coeffs: np.ndarray):
        self.sp = sp
        self.c = coeffs

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, value: float, n: int, deg_y: int, deg_x: int) -> "Jet":
        sp = space(n, deg_y, deg_x)
        c = np.zeros(sp.size)
        c[0] = value
        return cls(sp, c)

    @classmethod
    def from_base_series(cls, series: Sequence[float], n: int, deg_y: int, deg_x: int) -> "Jet":
        """Jet depending on the base variable only, from Taylor coefficients."""
        sp = space(n, deg_y, deg_x)
        c = np.zeros(sp.size)
        k = min(len(series), sp.nb)
        c[:k] = series[:k]
        return cls(sp, c)

    @property
    def n(self) -> int:
        return self.sp.n

    @property
    def deg_y(self) -> int:
        return self.sp.deg_y

    @property
    def deg_x(self) -> int:
        return self.sp.deg_x

    @property
    def value(self) -> float:
        return float(self.c[0])

    def coeffs(self) -> dict[tuple[tuple[int, ...], int], float]:
        """Map ``(fiber multi-index, base power) -> Taylor coefficient``."""
        sp = self.sp
        return {(m, p): float(self.c[f * sp.nb + p]) for f, m in enumerate(sp.fiber) for p in range(sp.nb)}

    def __repr__(self) -> str:
        nz = {k: v for k, v in self.coeffs().items() if v != 0.0}
        return f"Jet(n={self.n}, deg_y={self.deg_y}, deg_x={self.deg_x}, {nz})"

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.sp is not self.sp:
                raise JetError(
                    f"incompatible jets: {(self.n, self.deg_y, self.deg_x)} vs "
                    f"{(other.n, other.deg_y, other.deg_x)}"
                )
            return other
        c = np.zeros(self.sp.size)
        c[0] = float(other)
        return Jet(self.sp, c)

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.c.copy()
            c[0] += float(other)
            return Jet(self.sp, c)
        return Jet(self.sp, self.c + self._coerce(other).c)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet):
            c = self.c.copy()
            c[0] -= float(other)
            return Jet(self.sp, c)
        return Jet(self.sp, self.c - self._coerce(other).c)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(self.sp, -self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.sp, self.c * float(other))
        other = self._coerce(other)
        ia, ib, ic = self.sp.mul_table
        out = np.bincount(ic, weights=self.c[ia] * other.c[ib], minlength=self.sp.size)
        return Jet(self.sp, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.sp, self.c / float(other))
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def __pow__(self, exponent):
        if isinstance(exponent, Jet):
            raise JetError("only real-constant exponents are supported")
        e = float(exponent)
        if e.is_integer() and 0 <= e <= 8:
            out = Jet.constant(1.0, self.n, self.deg_y, self.deg_x)
            for _ in range(int(e)):
                out = out * self
            return out
        return self.pow_r(e)

    # composition ----------------------------------------------------------
    @property
    def order(self) -> int:
        """Nilpotency bound of the non-constant part."""
        return self.deg_y + self.deg_x

    def compose(self, derivs: Sequence[float]) -> "Jet":
        """Evaluate ``f(self)`` given ``f, f', f'', ...`` at the constant term."""
        m = self.order
        if len(derivs) < m + 1:
            raise JetError(f"composition needs {m + 1} derivatives, got {len(derivs)}")
        u = self - self.value
        u.c[0] = 0.0
        out = Jet.constant(derivs[m] / math.factorial(m), self.n, self.deg_y, self.deg_x)
        for k in range(m - 1, -1, -1):
            out = out * u + derivs[k] / math.factorial(k)
        return out

    def reciprocal(self) -> "Jet":
        a = self.value
        if a == 0.0:
            raise JetDomainError("division by a jet with zero constant term")
        d, f = [], 1.0 / a
        for k in range(self.order + 1):
            d.append(f)
            f *= -(k + 1) / a
        return self.compose(d)

    def pow_r(self, e: float) -> "Jet":
        a = self.value
        if a <= 0.0:
            raise JetDomainError(f"real power {e} of a jet with constant term {a} <= 0")
        d, coef = [], 1.0
        for k in range(self.order + 1):
            d.append(coef * a ** (e - k))
            coef *= e - k
        return self.compose(d)

    def sqrt(self) -> "Jet":
        if self.value <= 0.0:
            raise JetDomainError(f"sqrt of a jet with constant term {self.value} <= 0")
        return self.pow_r(0.5)

    def exp(self) -> "Jet":
        v = math.exp(self.value)
        return self.compose([v] * (self.order + 1))

    def sin(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        cyc = [s, c, -s, -c]
        return self.compose([cyc[k % 4] for k in range(self.order + 1)])

    def cos(self) -> "Jet":
        s, c = math.sin(self.value), math.cos(self.value)
        cyc = [c, -s, -c, s]
        return self.compose([cyc[k % 4] for k in range(self.order + 1)])

    # calculus -------------------------------------------------------------
    def extract(self, multi: Sequence[int], base_power: int = 0) -> float:
        """Partial derivative ``d^|multi| d^base_power`` at the expansion point."""
        multi = tuple(int(k) for k in multi)
        if len(multi) != self.n or min(multi) < 0 or sum(multi) > self.deg_y:
            raise JetError(f"fiber multi-index {multi} outside truncation deg_y={self.deg_y}")
        if not (0 <= base_power <= self.deg_x):
            raise JetError(f"base power {base_power} outside truncation deg_x={self.deg_x}")
        k = self.sp.flat(multi, base_power)
        return float(self.c[k] * self.sp.factorials[k])

    def d(self, axis: int) -> "Jet":
        """Fiber partial derivative; the result has ``deg_y - 1``."""
        if not (0 <= axis < self.n):
            raise JetError(f"fiber axis {axis} out of range for n={self.n}")
        if self.deg_y == 0:
            raise JetError("cannot differentiate a jet with deg_y = 0")
        src, dst, mult = self.sp.deriv_table(axis)
        low = space(self.n, self.deg_y - 1, self.deg_x)
        c = np.zeros(low.size)
        c[dst] = self.c[src] * mult
        return Jet(low, c)

    def base_coeff(self, p: int) -> "Jet":
        """Coefficient of ``t^p`` (Taylor-normalized) as a fiber-only jet."""
        if not (0 <= p <= self.deg_x):
            raise JetError(f"base power {p} outside truncation deg_x={self.deg_x}")
        low = space(self.n, self.deg_y, 0)
        return Jet(low, self.c[p :: self.sp.nb].copy())

    def truncate(self, deg_y: int | None = None, deg_x: int | None = None) -> "Jet":
        deg_y = self.deg_y if deg_y is None else deg_y
        deg_x = self.deg_x if deg_x is None else deg_x
        if deg_y > self.deg_y or deg_x > self.deg_x:
            raise JetError("truncate cannot raise the truncation order")
        tgt = space(self.n, deg_y, deg_x)
        nf = len(tgt.fiber)  # graded order makes the lower block a prefix
        c = self.c.reshape(-1, self.sp.nb)[:nf, : tgt.nb].ravel().copy()
        return Jet(tgt, c)

    def embed(self, deg_y: int, deg_x: int | None = None) -> "Jet":
        """Lift into a larger space; new coefficients are zero."""
        deg_x = self.deg_x if deg_x is None else deg_x
        tgt = space(self.n, deg_y, deg_x)
        if deg_y < self.deg_y or deg_x < self.deg_x:
            raise JetError("embed cannot lower the truncation order")
        c = np.zeros((len(tgt.fiber), tgt.nb))
        c[: len(self.sp.fiber), : self.sp.nb] = self.c.reshape(-1, self.sp.nb)
        return Jet(tgt, c.ravel())

    def gradient(self) -> np.ndarray:
        return np.array([self.extract(tuple(int(i == k) for i in range(self.n))) for k in range(self.n)])

    def hessian(self) -> np.ndarray:
        n = self.n
        H = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                m = [0] * n
                m[i] += 1
                m[j] += 1
                H[i, j] = H[j, i] = self.extract(m)
        return H

    def derivative_tensor(self, order: int) -> np.ndarray:
        """Symmetric array of all fiber partials of the given order at base power 0."""
        n = self.n
        T = np.empty((n,) * order)
        for idx in itertools.product(range(n), repeat=order):
            m = [0] * n
            for i in idx:
                m[i] += 1
            T[idx] = self.extract(m)
        return T


def seed_fiber(value: float, index: int, n: int, deg_y: int, deg_x: int) -> Jet:
    """Jet of the coordinate function ``y^index`` expanded at ``value``."""
    if not (0 <= index < n):
        raise JetError(f"fiber index {index} out of range for n={n}")
    j = Jet.constant(value, n, deg_y, deg_x)
    if deg_y >= 1:
        m = [0] * n
        m[index] = 1
        j.c[j.sp.flat(m, 0)] = 1.0
    return j


def seed_base(value: float, n: int, deg_y: int, deg_x: int, slope: float = 1.0) -> Jet:
    """Jet of ``value + slope * t`` in the base variable ``t``."""
    j = Jet.constant(value, n, deg_y, deg_x)
    if deg_x >= 1:
        j.c[1] = slope
    return j


def jet_arith(a: Jet, b: Jet | float, op: str) -> Jet:
    ops: dict[str, Callable] = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise JetError(f"unknown operation {op!r}")
    return ops[op]()


def jet_func(a: Jet, f: str, r: float | None = None) -> Jet:
    if f == "pow_r":
        if r is None:
            raise JetError("pow_r needs an exponent")
        return a.pow_r(r)
    if f not in ("sqrt", "exp", "sin", "cos"):
        raise JetError(f"unknown function {f!r}")
    return getattr(a, f)()


def univariate(value: float, order: int) -> Jet:
    """Identity jet of one variable, used for series in ``s``."""
    return seed_fiber(value, 0, 1, order, 0)


def series_derivs(j: Jet) -> list[float]:
    """All derivatives of a univariate jet at its expansion point."""
    return [j.extract((k,)) for k in range(j.deg_y + 1)]
