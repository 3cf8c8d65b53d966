"""Exact Bayesian win and runoff probabilities for two-round elections.

Poll counts feed a Dirichlet-multinomial posterior; the Gamma
representation of the Dirichlet turns every rank event (outright first
round win, pair reaching the runoff, head-to-head win) into a single
one-dimensional integral evaluated by adaptive quadrature, with a Monte
Carlo oracle available for verification.
"""

from .election import ElectionReport, ScenarioTable, full_report, p_elected, p_no_first_round_winner, pair_key
from .model import (
    CategoryLayout,
    DirichletPosterior,
    PollObservation,
    Round,
    gamma_representation,
    noninformative_prior,
    posterior_mean,
    scale_forward,
    scenario_layout,
    update,
)
from .numerics import (
    DEFAULT_QUADRATURE,
    DomainError,
    GammaMarginal,
    QuadratureError,
    QuadratureSpec,
    gamma_cdf,
    gamma_log_pdf,
    gamma_pdf,
    gamma_quantile,
    gamma_sf,
    integrate,
    log_gamma,
)
from .oracle import OracleEstimate, mc_beats, mc_majority, mc_pair_top2, sample_gamma, zscore
from .polls import (
    PollFileError,
    RawPollRecord,
    StoreEntry,
    layout_from_record,
    load_poll_file,
    load_store,
    save_store,
    to_observation,
)
from .rank import PairVsField, log_cdf_max, log_pdf_min, prob_beats, prob_majority, prob_pair_top2

__version__ = "0.1.0"

__all__ = [
    "CategoryLayout",
    "DEFAULT_QUADRATURE",
    "DirichletPosterior",
    "DomainError",
    "ElectionReport",
    "GammaMarginal",
    "OracleEstimate",
    "PairVsField",
    "PollFileError",
    "PollObservation",
    "QuadratureError",
    "QuadratureSpec",
    "RawPollRecord",
    "Round",
    "ScenarioTable",
    "StoreEntry",
    "full_report",
    "gamma_cdf",
    "gamma_log_pdf",
    "gamma_pdf",
    "gamma_quantile",
    "gamma_representation",
    "gamma_sf",
    "integrate",
    "layout_from_record",
    "load_poll_file",
    "load_store",
    "log_cdf_max",
    "log_gamma",
    "log_pdf_min",
    "mc_beats",
    "mc_majority",
    "mc_pair_top2",
    "noninformative_prior",
    "p_elected",
    "p_no_first_round_winner",
    "pair_key",
    "posterior_mean",
    "prob_beats",
    "prob_majority",
    "prob_pair_top2",
    "sample_gamma",
    "save_store",
    "scale_forward",
    "scenario_layout",
    "to_observation",
    "update",
    "zscore",
]
