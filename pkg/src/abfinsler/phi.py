"""Profile functions phi(s) of (alpha, beta)-metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .jet import Jet, JetDomainError, series_derivs, univariate


class PhiDomainError(ValueError):
    """s lies outside the validity interval of a profile."""


@dataclass(frozen=True)
class PhiFamily:
    """phi(s) with exact derivatives of any order.

    ``series`` maps a jet ``s`` to the jet of ``phi(s)``; derivatives come
    from it by univariate jet arithmetic, so every order is exact.
    ``lo, hi`` bound the validity interval; ``half_space`` families
    (Kropina-like) are only defined for ``s > 0`` and their indicatrix
    contains no direction with ``beta <= 0``.
    """

    name: str
    params: tuple[tuple[str, float], ...]
    series: Callable[[Jet], Jet] = field(compare=False, repr=False)
    value_np: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    d1_np: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    lo: float = -math.inf
    hi: float = math.inf
    half_space: bool = False

    @property
    def b0(self) -> float:
        return self.hi

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def in_domain(self, s: float) -> bool:
        return self.lo < s < self.hi

    def check(self, s: float) -> None:
        if not self.in_domain(s):
            raise PhiDomainError(f"s = {s:.6g} outside validity interval ({self.lo:.6g}, {self.hi:.6g}) of {self.name}")

    def derivatives(self, s: float, order: int = 5) -> list[float]:
        """``[phi(s), phi'(s), ..., phi^(order)(s)]``."""
        self.check(s)
        try:
            return series_derivs(self.series(univariate(s, order)))
        except JetDomainError as exc:
            raise PhiDomainError(f"{self.name} at s = {s:.6g}: {exc}") from None

    def __call__(self, s: float) -> float:
        return self.derivatives(s, 0)[0]


def compose_phi(phi: PhiFamily, s: Jet) -> Jet:
    """Jet of ``phi(s)`` by truncated Taylor composition."""
    return s.compose(phi.derivatives(s.value, s.order))


def randers() -> PhiFamily:
    return PhiFamily(
        "randers", (), lambda s: 1.0 + s, lambda s: 1.0 + s, lambda s: np.ones_like(s), lo=-1.0, hi=1.0
    )


def riemannian() -> PhiFamily:
    return PhiFamily(
        "riemannian", (), lambda s: 0.0 * s + 1.0, lambda s: np.ones_like(s), lambda s: np.zeros_like(s)
    )


def kropina() -> PhiFamily:
    return PhiFamily(
        "kropina", (), lambda s: 1.0 / s, lambda s: 1.0 / s, lambda s: -1.0 / s**2, lo=0.0, half_space=True
    )


def matsumoto() -> PhiFamily:
    # strong convexity of 1/(1-s) holds for b < 1/2
    return PhiFamily(
        "matsumoto", (), lambda s: 1.0 / (1.0 - s), lambda s: 1.0 / (1.0 - s),
        lambda s: 1.0 / (1.0 - s) ** 2, lo=-0.5, hi=0.5,
    )


def randers_type(c1: float = 1.0, c2: float = 0.5, c3: float = 0.3) -> PhiFamily:
    """``c1 sqrt(1 + c2 s^2) + c3 s`` with ``c1 > 0``."""
    if not c1 > 0:
        raise ValueError(f"randers-type needs c1 > 0, got {c1}")
    # Randers regularity for c1 sqrt(a + c2 bb) + c3 beta: c3^2 b^2 < c1^2 (1 + c2 b^2)
    den = c3 * c3 - c1 * c1 * c2
    b0 = c1 / math.sqrt(den) if den > 0 else math.inf
    if c2 < 0:
        b0 = min(b0, 1.0 / math.sqrt(-c2))
    b0 = min(b0, 10.0)
    return PhiFamily(
        "randers-type",
        (("c1", c1), ("c2", c2), ("c3", c3)),
        lambda s: (s * s * c2 + 1.0).sqrt() * c1 + s * c3,
        lambda s: c1 * np.sqrt(1.0 + c2 * s * s) + c3 * s,
        lambda s: c1 * c2 * s / np.sqrt(1.0 + c2 * s * s) + c3,
        lo=-b0,
        hi=b0,
    )


def rk_change(c1: float = -0.5, c2: float = -1.0) -> PhiFamily:
    """``-1/(2 c1 s) + c2 s/(2 c1)``: a Randers change of a Kropina metric.

    Positivity on ``s > 0`` needs ``c1 < 0``; ``c2 > 0`` also caps ``s``
    below ``1/sqrt(c2)``.
    """
    if not c1 < 0:
        raise ValueError(f"rk-change needs c1 < 0 for phi > 0 on s > 0, got {c1}")
    hi = 1.0 / math.sqrt(c2) if c2 > 0 else math.inf
    return PhiFamily(
        "rk-change",
        (("c1", c1), ("c2", c2)),
        lambda s: (1.0 / s) * (-0.5 / c1) + s * (0.5 * c2 / c1),
        lambda s: -0.5 / (c1 * s) + 0.5 * c2 * s / c1,
        lambda s: 0.5 / (c1 * s * s) + 0.5 * c2 / c1,
        lo=0.0,
        hi=hi,
        half_space=True,
    )


FAMILIES: dict[str, Callable[..., PhiFamily]] = {
    "randers": randers,
    "riemannian": riemannian,
    "kropina": kropina,
    "matsumoto": matsumoto,
    "randers-type": randers_type,
    "rk-change": rk_change,
}


def make_phi(name: str, **params: float) -> PhiFamily:
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown phi family {name!r}; known: {sorted(FAMILIES)}") from None
    return factory(**params)
