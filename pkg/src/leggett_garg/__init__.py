"""Leggett-Garg inequality for oscillating neutral kaons and neutrinos."""

from .constants import CONSTANTS, Constants
from .errors import ConditioningError, NumericalError, OutsideWindowError, ParameterError
from .lgi import LGI_BOUND, QUANTUM_BOUND, LgiEvaluation
from .params import (
    KaonParams,
    NeutrinoParams,
    TimeQuad,
    kamland_params,
    kaon_phase_per_tau_s,
    make_kaon_params,
    neutrino_phase,
    reference_kaon_params,
)

__version__ = "0.1.0"
