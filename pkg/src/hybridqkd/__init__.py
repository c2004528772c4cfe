"""Hybrid DV/CV quantum key distribution: simulation, rates, and planning."""

from .channel import ChannelParams, cv_propagate, cv_propagate_quadratures, db_to_transmittance
from .core import (RandomSource, binary_entropy, g_entropy, symplectic_eigenvalues,
                   symplectic_eigenvalues_direct)
from .encoder import (QPSK_SYMBOL_PHASES, CoherentSymbol, EncoderMode, JonesState,
                      dv_symbol, phase_state, pol_state, qpsk_symbol)
from .estimation import (EstimationReport, QberReport, estimate_channel,
                         estimate_covariance, estimate_qber, recover_global_phase)
from .harness import (CvExperimentConfig, CvExperimentResult, DvExperimentConfig,
                      DvExperimentResult, run_cv_experiment, run_dv_experiment)
from .planner import (CvLinkProfile, DvLinkProfile, LinkMode, ModeAssignment, QLink,
                      assign_modes, best_mode, best_path, link_rate)
from .rates import (CvRateInput, DvRateInput, RateReport, holevo_lc,
                    mutual_information_lc, skr_cv_asymptotic, skr_dv_finite)
from .receivers import (Basis, HetParams, SpadParams, calibrate_snu, clearance_db,
                        heterodyne_measure, heterodyne_measure_quadratures, spad_measure)

__version__ = "0.1.0"

__all__ = [
    "Basis", "ChannelParams", "CoherentSymbol", "CvExperimentConfig",
    "CvExperimentResult", "CvLinkProfile", "CvRateInput", "DvExperimentConfig",
    "DvExperimentResult", "DvLinkProfile", "DvRateInput", "EncoderMode",
    "EstimationReport", "HetParams", "JonesState", "LinkMode", "ModeAssignment",
    "QLink", "QPSK_SYMBOL_PHASES", "QberReport", "RandomSource", "RateReport",
    "SpadParams", "assign_modes", "best_mode", "best_path", "binary_entropy",
    "calibrate_snu", "clearance_db", "cv_propagate", "cv_propagate_quadratures",
    "db_to_transmittance", "dv_symbol", "estimate_channel", "estimate_covariance",
    "estimate_qber", "g_entropy", "heterodyne_measure",
    "heterodyne_measure_quadratures", "holevo_lc", "link_rate",
    "mutual_information_lc", "phase_state", "pol_state", "qpsk_symbol",
    "recover_global_phase", "run_cv_experiment", "run_dv_experiment",
    "skr_cv_asymptotic", "skr_dv_finite", "spad_measure", "symplectic_eigenvalues",
    "symplectic_eigenvalues_direct",
]
