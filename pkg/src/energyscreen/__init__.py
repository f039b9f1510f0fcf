"""Energy-distance feature screening and classification for two-class data.

Screening comes in three flavours: marginal (``mars_screen``), matched pairs
(``pairs_screen``) and a mixed version that tests each matched pair with
resampling (``mixs_screen``). A screened set feeds the dissimilarity-based
classifier in :mod:`energyscreen.classify`.

Set ``ENERGYSCREEN_NO_NUMBA=1`` before import to run the pure-numpy kernels.
"""

__version__ = "0.1.0"

from ._backend import backend_name, set_backend, use_numba
from .classify import (DiscriminantModel, discriminant_score, discriminant_scores,
                       fit_discriminant, misclassification_rate, predict, predict_many)
from .data import TwoClassSample
from .energy import (marginal_energy, marginal_energy_profile, pair_energy,
                     pair_energy_matrix)
from .exceptions import (ConfigurationError, CsvParseError, DataError, EnergyScreenError,
                         PreconditionError)
from .kernels import GAMMA1, GAMMA2, GAMMA3, GammaKernel, get_kernel
from .matching import build_weight_matrix, min_weight_perfect_matching
from .mixs import Verdict, classify_pair, mixs_screen, resample_pvalues
from .pairs import pairs_screen
from .replicate import ReplicationConfig, noise_ratio_table, run_replications
from .screening import (ScreenConfig, ScreenedSet, estimate_signal_count, mars_screen,
                        max_consecutive_noise_ratio)
from .simulate import ExampleSpec, generate, true_signals

__all__ = [
    "__version__", "backend_name", "set_backend", "use_numba",
    "DiscriminantModel", "discriminant_score", "discriminant_scores", "fit_discriminant",
    "misclassification_rate", "predict", "predict_many", "TwoClassSample",
    "marginal_energy", "marginal_energy_profile", "pair_energy", "pair_energy_matrix",
    "ConfigurationError", "CsvParseError", "DataError", "EnergyScreenError",
    "PreconditionError", "GAMMA1", "GAMMA2", "GAMMA3", "GammaKernel", "get_kernel",
    "build_weight_matrix", "min_weight_perfect_matching", "Verdict", "classify_pair",
    "mixs_screen", "resample_pvalues", "pairs_screen", "ReplicationConfig",
    "noise_ratio_table", "run_replications", "ScreenConfig", "ScreenedSet",
    "estimate_signal_count", "mars_screen", "max_consecutive_noise_ratio", "ExampleSpec",
    "generate", "true_signals",
]
