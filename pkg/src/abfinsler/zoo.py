"""Built-in metric catalog with a validation gate.

Backgrounds: ``euclid`` (flat chart, constant beta) and ``hopf`` (round
S^3 in the stereographic chart ``a = 4 delta / (1+|x|^2)^2`` with the dual of
the unit Killing field ``q -> i q``, scaled by ``eps``). Every declared
property is checked numerically before an entry is handed out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .metric import MetricSpec, make_spec
from .phi import PhiFamily, make_phi
from .riemann import riemann_state

_R = "(1+x1^2+x2^2+x3^2)"
HOPF_A = [[f"4/{_R}^2" if i == j else "0" for j in range(3)] for i in range(3)]
HOPF_B = [
    f"2*(x1^2-x2^2-x3^2+1)/{_R}^2",
    f"4*(x1*x2-x3)/{_R}^2",
    f"4*(x1*x3+x2)/{_R}^2",
]
HOPF_BOX = [(-0.8, 0.8)] * 3


class ZooError(ValueError):
    pass


class ValidationError(ZooError):
    def __init__(self, entry_id: str, table: dict):
        bad = {k: v for k, v in table.items() if not v["ok"]}
        super().__init__(f"zoo entry {entry_id!r} failed validation: {bad}")
        self.table = table


# declared properties: name -> (residual function of a RiemannState, bound, kind)
# kind "max" means residual <= bound, "min" means residual >= bound
def _killing(st):
    return float(np.max(np.abs(st.r)))


def _sj(st):
    return float(np.max(np.abs(st.s_vec)))


def _db2(st):
    # d_k b^2 = 2 b^i b_{i|k} for the Levi-Civita connection
    return float(np.max(np.abs(2 * st.b_up @ st.nabla_b)))


def _parallel(st):
    return float(np.max(np.abs(st.nabla_b)))


def _s_nonzero(st):
    return float(np.max(np.abs(st.s)))


PROPERTIES: dict[str, tuple[Callable, float, str]] = {
    "killing": (_killing, 1e-9, "max"),
    "s_vec_zero": (_sj, 1e-9, "max"),
    "constant_length": (_db2, 1e-9, "max"),
    "parallel": (_parallel, 1e-12, "max"),
    "s_nonzero": (_s_nonzero, 0.1, "min"),
}


@dataclass(frozen=True)
class ZooEntry:
    id: str
    description: str
    builder: Callable[..., MetricSpec] = field(repr=False)
    defaults: dict = field(default_factory=dict)
    declared: tuple[str, ...] = ()
    expected: dict = field(default_factory=dict)


def _euclid(n: int, b: float, phi: PhiFamily, id: str, params: dict) -> MetricSpec:
    if not 2 <= n <= 4:
        raise ZooError(f"euclid background needs 2 <= n <= 4, got {n}")
    n = int(n)
    a = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
    bv = [repr(float(b))] + ["0"] * (n - 1)
    return make_spec(n, a, bv, phi, [(-1.0, 1.0)] * n, id, params)


def _hopf(eps: float, phi: PhiFamily, id: str, params: dict) -> MetricSpec:
    if eps <= 0:
        raise ZooError(f"Hopf strength eps must be positive, got {eps}")
    bv = HOPF_B if eps == 1.0 else [f"{eps!r}*{t}" for t in HOPF_B]
    return make_spec(3, HOPF_A, bv, phi, HOPF_BOX, id, params)


def _check_b(phi: PhiFamily, b: float):
    if b <= 0:
        raise ZooError(f"b must be positive, got {b}")
    if not b < phi.hi:
        raise ZooError(f"b = {b} must stay below b0 = {phi.hi} for {phi.name}")


def _bg(background: str, strength: float, n: int, phi: PhiFamily, id: str, params: dict) -> MetricSpec:
    _check_b(phi, strength)
    if background == "euclid":
        return _euclid(n, strength, phi, id, params)
    if background == "hopf":
        return _hopf(strength, phi, id, params)
    raise ZooError(f"unknown background {background!r}")


HOPF_PROPS = ("killing", "s_vec_zero", "constant_length", "s_nonzero")
EUCLID_PROPS = ("parallel",)

CATALOG: dict[str, ZooEntry] = {}


def _register(entry: ZooEntry):
    CATALOG[entry.id] = entry


_register(ZooEntry(
    "euclid-randers", "Euclidean alpha, constant beta, phi = 1 + s (Berwald)",
    lambda b=0.3, n=3: _bg("euclid", b, n, make_phi("randers"), "euclid-randers", {"b": b, "n": n}),
    {"b": 0.3, "n": 3}, EUCLID_PROPS, {"berwald": True, "c_reducible": True},
))
_register(ZooEntry(
    "euclid-kropina", "Euclidean alpha, constant beta, phi = 1/s (Berwald)",
    lambda b=0.5, n=3: _bg("euclid", b, n, make_phi("kropina"), "euclid-kropina", {"b": b, "n": n}),
    {"b": 0.5, "n": 3}, EUCLID_PROPS, {"berwald": True, "c_reducible": True},
))
_register(ZooEntry(
    "euclid-matsumoto", "Euclidean alpha, constant beta, phi = 1/(1-s) (Berwald)",
    lambda b=0.3, n=3: _bg("euclid", b, n, make_phi("matsumoto"), "euclid-matsumoto", {"b": b, "n": n}),
    {"b": 0.3, "n": 3}, EUCLID_PROPS, {"berwald": True, "c_reducible": False},
))
_register(ZooEntry(
    "hopf-randers", "round S^3 with scaled Hopf form, phi = 1 + s",
    lambda eps=0.4: _bg("hopf", eps, 3, make_phi("randers"), "hopf-randers", {"eps": eps}),
    {"eps": 0.4}, HOPF_PROPS, {"berwald": False, "c_reducible": True},
))
_register(ZooEntry(
    "hopf-kropina", "round S^3 with unit Hopf form, phi = 1/s",
    lambda eps=1.0: _bg("hopf", eps, 3, make_phi("kropina"), "hopf-kropina", {"eps": eps}),
    {"eps": 1.0}, HOPF_PROPS, {"berwald": False, "c_reducible": True},
))
_register(ZooEntry(
    "hopf-matsumoto", "round S^3 with scaled Hopf form, phi = 1/(1-s)",
    lambda eps=0.4: _bg("hopf", eps, 3, make_phi("matsumoto"), "hopf-matsumoto", {"eps": eps}),
    {"eps": 0.4}, HOPF_PROPS, {"berwald": False, "c_reducible": False},
))
_register(ZooEntry(
    "randers-type", "phi = c1 sqrt(1 + c2 s^2) + c3 s on a chosen background",
    lambda c1=1.0, c2=0.5, c3=0.3, background="hopf", b=0.4, n=3: _bg(
        background, b, n, make_phi("randers-type", c1=c1, c2=c2, c3=c3), "randers-type",
        {"c1": c1, "c2": c2, "c3": c3, "background": background, "b": b, "n": n},
    ),
    {"c1": 1.0, "c2": 0.5, "c3": 0.3, "background": "hopf", "b": 0.4, "n": 3}, HOPF_PROPS,
    {"c_reducible": True},
))
_register(ZooEntry(
    "rk-change", "phi = -1/(2 c1 s) + c2 s/(2 c1), a Randers change of Kropina",
    lambda c1=-0.5, c2=-1.0, background="hopf", b=1.0, n=3: _rk(c1, c2, background, b, n),
    {"c1": -0.5, "c2": -1.0, "background": "hopf", "b": 1.0, "n": 3}, HOPF_PROPS,
    {"c_reducible": True},
))


def _rk(c1, c2, background, b, n):
    phi = make_phi("rk-change", c1=c1, c2=c2)
    params = {"c1": c1, "c2": c2, "background": background, "b": b, "n": n}
    return _bg(background, b, n, phi, "rk-change", params)


def zoo_list() -> list[ZooEntry]:
    return list(CATALOG.values())


def entry(id: str) -> ZooEntry:
    try:
        return CATALOG[id]
    except KeyError:
        raise ZooError(f"unknown zoo id {id!r}; known: {sorted(CATALOG)}") from None


def declared_properties(id: str, params: dict | None = None) -> tuple[str, ...]:
    e = entry(id)
    p = {**e.defaults, **(params or {})}
    if p.get("background") == "euclid":
        return EUCLID_PROPS
    return e.declared


def zoo_get(id: str, validate: bool = True, **params) -> MetricSpec:
    """Build a catalog metric; ``validate`` runs the validation gate first."""
    e = entry(id)
    unknown = set(params) - set(e.defaults)
    if unknown:
        raise ZooError(f"unknown parameters for {id}: {sorted(unknown)}")
    try:
        spec = e.builder(**params)
    except ZooError:
        raise
    except ValueError as exc:
        raise ZooError(str(exc)) from None
    spec.declared = declared_properties(id, params)
    if validate:
        validate_entry(spec)
    return spec


def validation_points(spec: MetricSpec, count: int = 100, seed: int = 12345) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in spec.box])
    hi = np.array([b[1] for b in spec.box])
    return lo + (hi - lo) * rng.random((count, spec.n))


_validated: dict = {}


def validate_entry(spec: MetricSpec, properties: tuple[str, ...] | None = None, count: int = 100, strict: bool = True) -> dict:
    """Certify declared properties at ``count`` chart points.

    Returns ``{property: {"residual", "bound", "kind", "ok"}}``; raises
    :class:`ValidationError` on any failure when ``strict``.
    """
    props = properties if properties is not None else getattr(spec, "declared", ())
    key = (id(spec), props, count)
    if key in _validated:
        return _validated[key]
    states = [riemann_state(spec, x) for x in validation_points(spec, count)]
    table = {}
    for p in props:
        fn, bound, kind = PROPERTIES[p]
        vals = [fn(st) for st in states]
        res = max(vals) if kind == "max" else min(vals)
        ok = res <= bound if kind == "max" else res >= bound
        table[p] = {"residual": res, "bound": bound, "kind": kind, "ok": bool(ok)}
    if strict and not all(v["ok"] for v in table.values()):
        raise ValidationError(spec.id, table)
    _validated[key] = table
    return table
