"""Edgeworth and extreme-value approximations for inhomogeneous quadratic tests."""
from .edgeworth import (
    EdgeworthDist,
    beta_clt,
    beta_edgeworth,
    clt_cdf,
    edgeworth_cdf,
    edgeworth_pdf,
    edgeworth_sf,
    hermite,
    std_normal_cdf,
    std_normal_pdf,
)
from .evt import EvtParams, QuantileError, alpha_edgeworth, alpha_evt, evt_params, inverse_cdf
from .metrics import CurveTable, cvm_distance, cvm_distance_normalized
from .moments import (
    GaussianSpec,
    MomentSet,
    QuadraticForm,
    gaussian_raw_moment,
    standardized_coefficients,
    y_moments,
    z_moment_multinomial,
    z_moments_closed_form,
)
from .tcd import (
    ChangeScenario,
    McEstimate,
    bound_curves,
    fma_statistic,
    llr_coefficients,
    mc_pfa,
    mc_pmd,
    roc_table,
    simulate_stopping_time,
)

__version__ = "0.1.0"
