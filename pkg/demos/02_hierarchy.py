"""Where each catalog metric sits in the reducibility hierarchy."""

from abfinsler import zoo_get, zoo_list
from abfinsler.classify import draw_samples, gpr_scan, predicate_scan, s_scan

COLUMNS = ["riemannian", "berwald", "landsberg", "weakly_landsberg", "c_reducible", "p_reducible"]

print(f"{'entry':18s}" + "".join(f"{c[:12]:>14s}" for c in COLUMNS) + f"{'gen-P':>10s}{'S=0':>8s}")
for e in zoo_list():
    spec = zoo_get(e.id)
    ss = draw_samples(spec, 60, seed=1)
    preds = predicate_scan(spec, ss)
    gpr = gpr_scan(ss)
    s = s_scan(spec, ss)
    row = "".join(f"{preds[c]['verdict']:>14s}" for c in COLUMNS)
    print(f"{e.id:18s}{row}{gpr['verdict']:>10s}{s['verdict']:>8s}")
