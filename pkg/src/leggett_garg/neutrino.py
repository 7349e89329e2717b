"""
Two-flavor (nu_e, nu_mu) vacuum oscillation and its Leggett-Garg quantity.

The measurement variable is L/E in km/MeV. Neutrinos do not decay, so
correlators need no survival conditioning and depend only on the separation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .lgi import LgiEvaluation
from .params import NeutrinoParams, TimeQuad, neutrino_phase

__all__ = [
    "Flavor",
    "NeutrinoLgiPoint",
    "NeutrinoMax",
    "transition_prob",
    "single_prob",
    "joint_prob",
    "correlator",
    "c_of_phase",
    "lgi_c",
    "lgi_c_from_correlators",
    "lgi_c_quad",
    "lgi_c_gaps",
    "analytic_max",
    "OPTIMAL_PHASE",
    "PHASE_PERIOD",
]

OPTIMAL_PHASE = math.pi / 8
PHASE_PERIOD = math.pi


class Flavor(enum.Enum):
    """Flavor eigenstate; the enum value is the dichotomic outcome Q."""

    NU_E = 1
    NU_MU = -1

    @property
    def q(self) -> int:
        return self.value


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def transition_prob(params: NeutrinoParams, flip: bool, l_over_e):
    """P(nu_e -> nu_mu) if ``flip`` else P(nu_e -> nu_e), at the given L/E."""
    phase = neutrino_phase(params, l_over_e)
    p_flip = params.sin2_2theta * np.sin(phase) ** 2
    return _out(p_flip if flip else 1.0 - p_flip)


def single_prob(params: NeutrinoParams, src: Flavor, dst: Flavor, l_over_e):
    """Flavor-resolved probability; vacuum oscillation is symmetric in the pair."""
    return transition_prob(params, src is not dst, l_over_e)


def joint_prob(params: NeutrinoParams, a: Flavor, b: Flavor, t1, t2):
    """Find ``a`` at t1 then ``b`` at t2 for an initial nu_e (L/E units)."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(t2 < t1):
        raise ParameterError("joint probability needs t1 <= t2")
    first = single_prob(params, Flavor.NU_E, a, t1)
    return _out(first * single_prob(params, a, b, t2 - t1))


def correlator(params: NeutrinoParams, delta_loe):
    """<Q Q> for two measurements separated by ``delta_loe``."""
    phase = neutrino_phase(params, delta_loe)
    return _out(1.0 - 2.0 * params.sin2_2theta * np.sin(phase) ** 2)


def c_of_phase(sin2_2theta, phase):
    """Equal-spacing C as a function of the per-gap phase."""
    phase = np.asarray(phase, dtype=float)
    bracket = 3.0 * np.sin(phase) ** 2 - np.sin(3.0 * phase) ** 2
    return _out(2.0 - 2.0 * sin2_2theta * bracket)


@dataclass(frozen=True)
class NeutrinoLgiPoint:
    l_over_e: object
    phase: object
    c_value: object


def lgi_c(params: NeutrinoParams, delta_loe) -> NeutrinoLgiPoint:
    """Equal-spacing C at gap ``delta_loe`` (km/MeV)."""
    phase = neutrino_phase(params, delta_loe)
    return NeutrinoLgiPoint(
        l_over_e=_out(delta_loe), phase=phase, c_value=c_of_phase(params.sin2_2theta, phase)
    )


def lgi_c_from_correlators(params: NeutrinoParams, delta_loe):
    """The same C assembled as 3 c(delta) - c(3 delta)."""
    delta = np.asarray(delta_loe, dtype=float)
    return _out(3.0 * correlator(params, delta) - correlator(params, 3.0 * delta))


def lgi_c_gaps(params: NeutrinoParams, t1, g12, g23, g34) -> LgiEvaluation:
    g12, g23, g34 = (np.asarray(g, dtype=float) for g in (g12, g23, g34))
    return LgiEvaluation(
        c12=correlator(params, g12),
        c23=correlator(params, g23),
        c34=correlator(params, g34),
        c14=correlator(params, g12 + g23 + g34),
        point={"t1": t1, "gaps": (g12, g23, g34)},
    )


def lgi_c_quad(params: NeutrinoParams, quad: TimeQuad) -> LgiEvaluation:
    """C for a general quad of L/E values."""
    ev = lgi_c_gaps(params, quad.t1, *quad.gaps)
    return LgiEvaluation(ev.c12, ev.c23, ev.c34, ev.c14, point=quad)


@dataclass(frozen=True)
class NeutrinoMax:
    c_max: float
    phase_star: float
    period: float
    l_over_e_star: float


def analytic_max(params: NeutrinoParams) -> NeutrinoMax:
    """
    Closed-form maximum of C over the per-gap phase.

    3 sin^2(x) - sin^2(3x) reaches its minimum 1 - sqrt(2) first at x = pi/8,
    so C_max = 2 + 2 (sqrt(2) - 1) sin^2(2 theta). C has period pi in the phase.
    """
    c_max = 2.0 + 2.0 * (math.sqrt(2.0) - 1.0) * params.sin2_2theta
    per_loe = params.constants.osc_coefficient_km_per_mev() * params.delta_m2_ev2
    return NeutrinoMax(
        c_max=c_max,
        phase_star=OPTIMAL_PHASE,
        period=PHASE_PERIOD,
        l_over_e_star=OPTIMAL_PHASE / per_loe,
    )
