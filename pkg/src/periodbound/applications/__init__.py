"""Period bounds for reaction-diffusion, Lotka-Volterra and 2D Navier-Stokes."""

from periodbound.applications.lotka_volterra import (
    LotkaVolterraParams,
    LvPeriodBound,
    lv_linf_lipschitz,
    lv_lipschitz,
    lv_period_bound,
)
from periodbound.applications.navier_stokes import (
    NseField,
    grashof_number,
    nse_bilinear,
    nse_lipschitz_ratio,
    nse_period_bound,
)
from periodbound.applications.reaction_diffusion import ReactionDiffusionGrowth, RdAlpha, rd_alpha

__all__ = [
    "LotkaVolterraParams",
    "LvPeriodBound",
    "NseField",
    "RdAlpha",
    "ReactionDiffusionGrowth",
    "grashof_number",
    "lv_linf_lipschitz",
    "lv_lipschitz",
    "lv_period_bound",
    "nse_bilinear",
    "nse_lipschitz_ratio",
    "nse_period_bound",
    "rd_alpha",
]
