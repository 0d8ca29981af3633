"""S-curvature with and without a Killing form of constant length.

On the Hopf background S vanishes for any profile phi. A rotating
1-form on flat space is not Killing, and S no longer vanishes; for the
Randers profile it matches the classical formula
S = (n+1) (e_00/(2F) - s_0 - rho_0), with rho = ln sqrt(1 - b^2).
"""

import numpy as np

from abfinsler import make_spec, make_phi, point_state, riemann_state, zoo_get

for id_ in ("hopf-randers", "hopf-kropina", "hopf-matsumoto"):
    spec = zoo_get(id_)
    ps = point_state(spec, [0.3, -0.2, 0.1], [0.6, 1.0, 0.5])
    print(f"{id_:16s} S = {ps.S: .2e}  (quadrature discrepancy {ps.volume.discrepancy:.1e})")

spec = make_spec(2, [["1"], ["0", "1"]], ["0.2 + 0.1*x2", "0.1*x1"], make_phi("randers"), id="rotating")
x, y = np.array([0.3, -0.2]), np.array([0.8, 0.6])
ps, st = point_state(spec, x, y), riemann_state(spec, x)
e = st.r + np.outer(st.b, st.s_vec) + np.outer(st.s_vec, st.b)
rho0 = -(st.b_up @ st.nabla_b) @ y / (1 - st.b_norm_sq)
formula = 3 * (y @ e @ y / (2 * ps.F) - st.s_vec @ y - rho0)
print(f"\nrotating Randers: S = {ps.S:.10f}, classical formula {formula:.10f}")
