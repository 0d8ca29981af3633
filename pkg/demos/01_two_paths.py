"""Compute the same tensors two ways at one point and compare.

The definition path differentiates jets of F^2; the closed forms use only
alpha, beta, their covariant derivatives and scalar functions of s.
"""

import numpy as np

from abfinsler import zoo_get
from abfinsler.alphabeta import frame, landsberg_cf, mean_cartan_cf, mean_landsberg_cf, spray_cf
from abfinsler.finsler import point_state

spec = zoo_get("hopf-matsumoto")
x = np.array([0.2, -0.1, 0.3])
y = np.array([1.0, 0.4, -0.2])

ps = point_state(spec, x, y)
fr = frame(spec, x, y)
print(f"metric {spec.id} {spec.params}, x = {x}, y = {y}")
print(f"F = {ps.F:.12g}, s = beta/alpha = {fr.sc.s:.6g}, b^2 = {fr.sc.b_sq:.6g}\n")

pairs = {
    "spray G^i": (ps.G, spray_cf(spec, x, y, fr)),
    "mean Cartan I_i": (ps.I, mean_cartan_cf(spec, x, y, fr)),
    "mean Landsberg J_i": (ps.J, mean_landsberg_cf(spec, x, y, fr)),
    "Landsberg L_ijk": (ps.L, landsberg_cf(spec, x, y, fr)),
}
for name, (d, c) in pairs.items():
    rel = np.abs(d - c).max() / (1 + np.abs(d).max())
    print(f"{name:20s} max entry {np.abs(d).max():.4e}   relative gap {rel:.1e}")
