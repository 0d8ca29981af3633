"""Reducibility predicates, structure fits and the theorem consistency check."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import __version__
from .alphabeta import (
    Frame,
    ab_scalars,
    frame,
    jbar_cf,
    landsberg_cf,
    mean_cartan_cf,
    mean_landsberg_cf,
    spray_cf,
)
from .finsler import PointState, point_state, sym3
from .metric import DomainError, MetricSpec
from .phi import PhiDomainError
from .riemann import riemann_state
from .volume import QuadratureError

SCHEMA_VERSION = "1.0"
HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
CONSISTENT, VIOLATION = "CONSISTENT", "VIOLATION"


@dataclass(frozen=True)
class Tolerances:
    eps_tensor: float = 1e-8
    eps_S: float = 1e-6
    eps_fit: float = 1e-8
    nonzero_floor: float = 1e-3

    def __post_init__(self):
        for name in ("eps_tensor", "eps_S", "eps_fit"):
            if not 0 < getattr(self, name) < self.nonzero_floor:
                raise ValueError(f"need 0 < {name} < nonzero_floor")

    def verdict(self, residual: float, bound: float | None = None) -> str:
        bound = self.eps_tensor if bound is None else bound
        if residual <= bound:
            return HOLDS
        if residual >= self.nonzero_floor:
            return FAILS
        return INCONCLUSIVE


# sampling -------------------------------------------------------------------

S_MARGIN = 0.95        # reject |s| >= 0.95 b0
HALF_SPACE_MARGIN = 0.02  # keeps 1/s-type profiles away from the beta = 0 pole
EDGE_MARGIN = 0.999    # reject s^2 >= (0.999 b)^2 where h_i degenerates


@dataclass
class Sample:
    x: np.ndarray
    y: np.ndarray
    ps: PointState
    fr: Frame


@dataclass
class SampleSet:
    samples: list[Sample]
    seed: int
    requested: int
    rejected: int
    reasons: dict = field(default_factory=dict)


def _admissible(spec: MetricSpec, s: float, b: float) -> str | None:
    phi = spec.phi
    if phi.half_space:
        if s <= max(phi.lo, 0.0) + HALF_SPACE_MARGIN * b:
            return "half-space margin"
    elif math.isfinite(phi.hi) and abs(s) >= S_MARGIN * phi.hi:
        return "|s| >= 0.95 b0"
    if s * s >= (EDGE_MARGIN * b) ** 2:
        return "s^2 near b^2"
    return None


def draw_samples(
    spec: MetricSpec,
    count: int,
    seed: int = 0,
    directions_per_point: int = 1,
    max_attempts: int | None = None,
) -> SampleSet:
    """x uniform in the chart box, y uniform on the alpha-unit sphere, then F(x, y) = 1.

    Each x receives ``directions_per_point`` accepted directions. Half-space
    profiles draw y on the hemisphere beta > 0. Guard violations are
    rejected and redrawn at the same x; rejection counts are kept per reason.
    """
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in spec.box])
    hi = np.array([b[1] for b in spec.box])
    out: list[Sample] = []
    rejected = 0
    reasons: dict[str, int] = {}
    max_attempts = max_attempts or 20 * count + 100
    attempts = 0
    while len(out) < count:
        x = lo + (hi - lo) * rng.random(spec.n)
        try:
            st = riemann_state(spec, x)
        except DomainError as exc:
            attempts += 1
            rejected += 1
            reasons[exc.guard] = reasons.get(exc.guard, 0) + 1
            if attempts >= max_attempts:
                raise RuntimeError(f"sampler exhausted after {attempts} attempts ({reasons})") from None
            continue
        Lc = np.linalg.cholesky(st.a)
        b = math.sqrt(st.b_norm_sq)
        here = 0
        while here < directions_per_point and len(out) < count:
            if attempts >= max_attempts:
                raise RuntimeError(f"sampler exhausted after {attempts} attempts ({reasons})")
            attempts += 1
            z = rng.standard_normal(spec.n)
            y = np.linalg.solve(Lc.T, z / np.linalg.norm(z))
            if spec.phi.half_space and st.b @ y < 0:
                y = -y
            s = float(st.b @ y)
            why = _admissible(spec, s, b)
            if why is None:
                try:
                    ab_scalars(spec.phi, s, st.b_norm_sq, spec.n)
                    y = y / spec.F(x, y)
                    ps = point_state(spec, x, y)
                    fr = frame(spec, x, y, st)
                except (DomainError, PhiDomainError) as exc:
                    why = getattr(exc, "guard", "phi-domain")
            if why is not None:
                rejected += 1
                reasons[why] = reasons.get(why, 0) + 1
                continue
            out.append(Sample(x, y, ps, fr))
            here += 1
    return SampleSet(out, seed, count, rejected, reasons)


# per-point fits ---------------------------------------------------------------

class FitUndefined(ValueError):
    pass


def inner(ps: PointState, A: np.ndarray, B: np.ndarray) -> float:
    gi = ps.g_inv
    U = A
    for ax in range(A.ndim):
        U = np.moveaxis(np.tensordot(gi, U, axes=([1], [ax])), 0, ax)
    return float(np.sum(U * B))


def predicate_residuals(ps: PointState) -> dict[str, float]:
    nC, nL = ps.norm(ps.C), ps.norm(ps.L)
    return {
        "riemannian": nC,
        "berwald": ps.norm_mixed(ps.B),
        "landsberg": nL,
        "weakly_landsberg": ps.norm(ps.J),
        "c_reducible": ps.norm(ps.M) / (1 + nC),
        "p_reducible": ps.norm(ps.PRED) / (1 + nL),
    }


@dataclass(frozen=True)
class SemiCFit:
    p: float
    q: float
    residual: float
    degenerate: bool = False


def semi_c_fit(ps: PointState, tol: Tolerances = Tolerances()) -> SemiCFit:
    """Least-squares p in C = p sym(h I)/(n+1) + (1-p) I I I / |I|^2."""
    I2 = inner(ps, ps.I, ps.I)
    if I2 <= tol.eps_tensor:
        raise FitUndefined(f"Riemannian point: |I|^2 = {I2:.3e}")
    n = ps.n
    A = sym3(ps.I, ps.h) / (n + 1)
    B = np.einsum("i,j,k->ijk", ps.I, ps.I, ps.I) / I2
    D = A - B
    dd = inner(ps, D, D)
    degenerate = dd <= 1e-24 * (1 + inner(ps, A, A))
    p = 1.0 if degenerate else inner(ps, ps.C - B, D) / dd
    R = ps.C - p * A - (1 - p) * B
    return SemiCFit(p, 1 - p, ps.norm(R) / (1 + ps.norm(ps.C)), degenerate)


@dataclass(frozen=True)
class GPRFit:
    lam: float
    a: np.ndarray
    residual: float
    m_degenerate: bool


def gpr_fit(ps: PointState, tol: Tolerances = Tolerances()) -> GPRFit:
    """lambda by projecting PRED on M; a_i = (J_i - lambda I_i)/(n+1).

    With a_i fixed this way, ``a_i y^i = 0`` automatically.
    """
    n = ps.n
    nM = ps.norm(ps.M) / (1 + ps.norm(ps.C))
    degenerate = nM <= tol.eps_tensor
    lam = 0.0 if degenerate else inner(ps, ps.PRED, ps.M) / inner(ps, ps.M, ps.M)
    a = (ps.J - lam * ps.I) / (n + 1)
    R = ps.L - lam * ps.C - sym3(a, ps.h)
    return GPRFit(lam, a, ps.norm(R) / (1 + ps.norm(ps.L)), degenerate)


# scans ---------------------------------------------------------------------------

def _stats(vals: Sequence[float]) -> dict:
    v = np.asarray(vals, float)
    if v.size == 0:
        return {"count": 0}
    return {"count": int(v.size), "min": float(v.min()), "max": float(v.max()), "mean": float(v.mean())}


MIN_SAMPLES = 10


def predicate_scan(spec: MetricSpec, ss: SampleSet, tol: Tolerances = Tolerances()) -> dict:
    rows = [predicate_residuals(s.ps) for s in ss.samples]
    out = {}
    for name in ("riemannian", "berwald", "landsberg", "weakly_landsberg", "c_reducible", "p_reducible"):
        vals = [r[name] for r in rows]
        mx = max(vals) if vals else math.nan
        verdict = tol.verdict(mx) if len(vals) >= MIN_SAMPLES else INCONCLUSIVE
        entry = {"max_residual": mx, "min_residual": min(vals) if vals else math.nan, "verdict": verdict}
        if len(vals) < MIN_SAMPLES:
            entry["diagnostic"] = f"only {len(vals)} admissible samples (< {MIN_SAMPLES})"
        out[name] = entry
    return out


def semi_c_scan(ss: SampleSet, tol: Tolerances = Tolerances()) -> dict:
    fits, undefined = [], 0
    for s in ss.samples:
        try:
            fits.append(semi_c_fit(s.ps, tol))
        except FitUndefined:
            undefined += 1
    res = [f.residual for f in fits]
    mx = max(res) if res else math.nan
    return {
        "max_residual": mx,
        "verdict": tol.verdict(mx, tol.eps_fit) if res else INCONCLUSIVE,
        "p": _stats([f.p for f in fits]),
        "max_abs_p_plus_q_minus_1": max((abs(f.p + f.q - 1) for f in fits), default=0.0),
        "undefined_points": undefined,
        "degenerate_points": sum(f.degenerate for f in fits),
    }


def gpr_scan(ss: SampleSet, tol: Tolerances = Tolerances()) -> dict:
    fits = [gpr_fit(s.ps, tol) for s in ss.samples]
    res = np.array([f.residual for f in fits])
    mx = float(res.max()) if res.size else math.nan
    return {
        "max_residual": mx,
        "min_residual": float(res.min()) if res.size else math.nan,
        "fraction_above_floor": float(np.mean(res >= tol.nonzero_floor)) if res.size else math.nan,
        "verdict": tol.verdict(mx, tol.eps_fit) if res.size else INCONCLUSIVE,
        "lambda": _stats([f.lam for f in fits]),
        "m_degenerate_points": int(sum(f.m_degenerate for f in fits)),
        "residuals": res.tolist(),
    }


def s_scan(spec: MetricSpec, ss: SampleSet, tol: Tolerances = Tolerances()) -> dict:
    """max |S|, isotropic fit S = (n+1) c F and its residual."""
    Ss, Fs, excluded = [], [], []
    for smp in ss.samples:
        try:
            Ss.append(smp.ps.S)
            Fs.append(smp.ps.F)
        except QuadratureError as exc:
            excluded.append({"x": smp.x.tolist(), "discrepancy": exc.discrepancy})
    n = spec.n
    S, F = np.array(Ss), np.array(Fs)
    if S.size == 0:
        return {"max_abs_S": math.nan, "c": math.nan, "isotropy_residual": math.nan,
                "verdict": INCONCLUSIVE, "excluded": excluded}
    c = float(S @ F / ((n + 1) * (F @ F)))
    iso = float(np.max(np.abs(S - (n + 1) * c * F)))
    mx = float(np.max(np.abs(S)))
    verdict = tol.verdict(mx, tol.eps_S)
    if excluded and verdict == HOLDS:
        verdict = INCONCLUSIVE
    return {"max_abs_S": mx, "c": c, "isotropy_residual": iso, "verdict": verdict, "excluded": excluded}


def cs0_check(spec: MetricSpec, xs: Sequence[Sequence[float]], s_grid: int = 9) -> dict:
    """Residuals of the two beta-conditions for isotropic S-curvature."""
    n = spec.n
    rb, sb, ra, eps_vals, flagged = [], [], [], [], []
    phis, ws = [], []
    for x in xs:
        st = riemann_state(spec, x)
        b2 = st.b_norm_sq
        if b2 < 1e-12:
            flagged.append(list(map(float, x)))
            continue
        rb.append(float(np.max(np.abs(st.r))))
        sb.append(float(np.max(np.abs(st.s_vec))))
        eps = float(np.trace(st.a_inv @ st.r)) / (b2 * (n - 1))
        eps_vals.append(eps)
        ra.append(float(np.max(np.abs(st.r - eps * (b2 * st.a - np.outer(st.b, st.b))))))
        b = math.sqrt(b2)
        lo = max(spec.phi.lo, -b) if not spec.phi.half_space else 0.0
        hi = min(spec.phi.hi, b)
        for s in np.linspace(lo, hi, s_grid + 2)[1:-1]:
            try:
                sc = ab_scalars(spec.phi, float(s), b2, n)
            except (DomainError, PhiDomainError):
                continue
            phis.append(sc.Phi)
            ws.append(2 * (n + 1) * sc.phi * sc.Delta**2 / (b2 - s * s))
    Phi, W = np.array(phis), np.array(ws)
    if W.size:
        k = float(-(Phi @ W) / (W @ W))
        phi_res = float(np.max(np.abs(Phi + k * W)) / (1 + np.max(np.abs(Phi))))
    else:
        k, phi_res = math.nan, math.nan
    return {
        "case_b": {"max_r": max(rb, default=math.nan), "max_s_vec": max(sb, default=math.nan)},
        "case_a": {
            "epsilon": _stats(eps_vals),
            "max_r_residual": max(ra, default=math.nan),
            "max_s_vec": max(sb, default=math.nan),
            "k": k,
            "phi_condition_residual": phi_res,
        },
        "degenerate_beta_points": flagged,
    }


def _gnorm_vec(ps: PointState, v: np.ndarray, upper: bool) -> float:
    M = ps.g if upper else ps.g_inv
    return math.sqrt(max(float(v @ M @ v), 0.0))


def crosscheck_sample(smp: Sample) -> dict:
    """Normalized discrepancies between the closed forms and the definition path."""
    spec, x, y, ps, fr = smp.ps.spec, smp.x, smp.y, smp.ps, smp.fr
    G = spray_cf(spec, x, y, fr)
    J = mean_landsberg_cf(spec, x, y, fr)
    L = landsberg_cf(spec, x, y, fr)
    I = mean_cartan_cf(spec, x, y, fr)
    jb = jbar_cf(spec, x, y, fr)
    return {
        "spray": _gnorm_vec(ps, G - ps.G, True) / (1 + _gnorm_vec(ps, ps.G, True)),
        "mean_landsberg": _gnorm_vec(ps, J - ps.J, False) / (1 + _gnorm_vec(ps, ps.J, False)),
        "landsberg": ps.norm(L - ps.L) / (1 + ps.norm(ps.L)),
        "mean_cartan": _gnorm_vec(ps, I - ps.I, False) / (1 + _gnorm_vec(ps, ps.I, False)),
        "jbar_internal": abs(jb - float(fr.st.b_up @ J)) / (1 + abs(jb)),
        "rho1_s_plus_rho2": abs(fr.sc.rho1 * fr.sc.s + fr.sc.rho2),
    }


CROSSCHECK_BOUNDS = {
    "spray": 1e-8,
    "mean_landsberg": 1e-7,
    "landsberg": 1e-7,
    "mean_cartan": 1e-8,
    "jbar_internal": 1e-10,
    "rho1_s_plus_rho2": 1e-12,
}


def crosscheck(spec: MetricSpec, ss: SampleSet) -> dict:
    rows = [crosscheck_sample(s) for s in ss.samples]
    table = {}
    for k, bound in CROSSCHECK_BOUNDS.items():
        mx = max((r[k] for r in rows), default=math.nan)
        table[k] = {"max_discrepancy": mx, "bound": bound, "ok": bool(mx <= bound)}
    return table


def theorem_check(spec: MetricSpec, ss: SampleSet, tol: Tolerances = Tolerances(),
                  preds: dict | None = None, gpr: dict | None = None, sres: dict | None = None) -> dict:
    """Premises (generalized P-reducible, S = 0) against conclusions (Berwald or C-reducible)."""
    preds = preds or predicate_scan(spec, ss, tol)
    gpr = gpr or gpr_scan(ss, tol)
    sres = sres or s_scan(spec, ss, tol)
    prem = {"generalized_p_reducible": gpr["verdict"], "vanishing_S": sres["verdict"]}
    concl = {"berwald": preds["berwald"]["verdict"], "c_reducible": preds["c_reducible"]["verdict"]}
    table = {
        "generalized_p_reducible": gpr["max_residual"],
        "vanishing_S": sres["max_abs_S"],
        "berwald": preds["berwald"]["max_residual"],
        "c_reducible": preds["c_reducible"]["max_residual"],
    }
    if FAILS in prem.values():
        outcome = CONSISTENT
        why = "a premise fails: " + ", ".join(k for k, v in prem.items() if v == FAILS)
    elif HOLDS in concl.values():
        outcome = CONSISTENT
        why = "conclusion holds: " + ", ".join(k for k, v in concl.items() if v == HOLDS)
    elif all(v == HOLDS for v in prem.values()) and all(v == FAILS for v in concl.values()):
        outcome = VIOLATION
        why = "premises hold but the metric is neither Berwald nor C-reducible"
    else:
        outcome = INCONCLUSIVE.upper()
        why = "inconclusive verdicts among premises or conclusions"
    return {"outcome": outcome, "explanation": why, "premises": prem, "conclusions": concl, "residuals": table}


def classify_metric(spec: MetricSpec, samples: int = 200, seed: int = 0, tol: Tolerances = Tolerances()) -> dict:
    """Full ClassificationReport as a JSON-ready dict."""
    ss = draw_samples(spec, samples, seed)
    preds = predicate_scan(spec, ss, tol)
    semi = semi_c_scan(ss, tol)
    gpr = gpr_scan(ss, tol)
    sres = s_scan(spec, ss, tol)
    cs0 = cs0_check(spec, [s.x for s in ss.samples[:20]])
    thm = theorem_check(spec, ss, tol, preds, gpr, sres)
    xc = crosscheck(spec, ss)
    gpr_out = {k: v for k, v in gpr.items() if k != "residuals"}
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "metric": spec.describe(),
        "sampling": {
            "seed": seed,
            "samples": len(ss.samples),
            "rejected": ss.rejected,
            "rejection_reasons": dict(sorted(ss.reasons.items())),
            "box": [list(b) for b in spec.box],
        },
        "tolerances": asdict(tol),
        "predicates": preds,
        "fits": {
            "semi_c": semi,
            "generalized_p_reducible": gpr_out,
            "isotropic_S": {k: sres[k] for k in ("max_abs_S", "c", "isotropy_residual", "verdict")},
            "cs0": cs0,
        },
        "s_curvature_excluded": sres["excluded"],
        "theorem": thm,
        "crosscheck": xc,
    }
