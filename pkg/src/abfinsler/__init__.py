"""Numerical Finsler geometry of (alpha, beta)-metrics."""

__version__ = "0.1.0"

from .jet import Jet, seed_fiber, seed_base, jet_arith, jet_func  # noqa: E402
from .phi import PhiFamily, compose_phi, make_phi  # noqa: E402
from .metric import MetricSpec, make_spec, DomainError  # noqa: E402
from .riemann import riemann_state, rs_contractions  # noqa: E402
from .finsler import point_state, PointState  # noqa: E402
from .alphabeta import ab_scalars, spray_cf, mean_landsberg_cf, jbar_cf, landsberg_cf, mean_cartan_cf, lemma_residuals  # noqa: E402
from .zoo import zoo_get, zoo_list, validate_entry  # noqa: E402
from .classify import Tolerances, classify_metric, theorem_check, draw_samples  # noqa: E402
