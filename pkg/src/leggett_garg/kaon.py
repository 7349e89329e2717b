"""
Closed-form neutral kaon oscillation with CP violation and decay.

All times are in units of the short lifetime tau_S. The beam is a pure K0 at
t = 0. Every function broadcasts over numpy arrays of times and returns plain
floats for scalar input.

Temporal correlators are conditioned on the kaon surviving both strangeness
measurements: the four joint probabilities are normalized by their sum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConditioningError, OutsideWindowError, ParameterError
from .lgi import LgiEvaluation
from .params import KaonParams, TimeQuad

__all__ = [
    "SUPPORTED_WINDOW",
    "DENOMINATOR_FLOOR",
    "Strangeness",
    "KaonCorrelator",
    "single_prob",
    "joint_prob",
    "survival_prob",
    "correlator",
    "correlator_gap",
    "correlator_closed_form",
    "lgi_c",
    "lgi_c_gaps",
    "lgi_c_equal_spacing",
]

SUPPORTED_WINDOW = 50.0
DENOMINATOR_FLOOR = 1e-300


class Strangeness(enum.Enum):
    """Strangeness eigenstate; the enum value is the dichotomic outcome Q."""

    K0 = 1
    K0BAR = -1

    @property
    def q(self) -> int:
        return self.value


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _check_times(*times) -> None:
    for t in times:
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ParameterError("times must be finite and >= 0")
        if np.any(t > SUPPORTED_WINDOW):
            raise OutsideWindowError(
                f"time {float(np.max(t)):g} tau_S beyond the supported window "
                f"of {SUPPORTED_WINDOW:g} tau_S"
            )


def _brackets(params: KaonParams, t):
    """The K0 survival and unweighted K0 -> K0bar brackets (each already /4)."""
    t = np.asarray(t, dtype=float)
    decays = np.exp(-params.rate_l * t) + np.exp(-params.rate_s * t)
    interference = 2.0 * np.exp(-params.rate * t) * np.cos(params.omega * t)
    return 0.25 * (decays + interference), 0.25 * (decays - interference)


def _single(params: KaonParams, src: Strangeness, dst: Strangeness, t):
    same, flip = _brackets(params, t)
    if src is dst:
        return same
    r = params.transition_ratio
    return r * flip if src is Strangeness.K0 else flip / r


def single_prob(params: KaonParams, src: Strangeness, dst: Strangeness, t):
    """
    Probability of finding ``dst`` at time ``t`` starting from pure ``src``.

    K0 -> K0bar carries |1-eps|^2/|1+eps|^2 and K0bar -> K0 its reciprocal;
    both survival channels share the same bracket.
    """
    _check_times(t)
    return _scalar_or_array(_single(params, src, dst, t))


def _joint_gap(params, a, b, t1, delta):
    return _single(params, Strangeness.K0, a, t1) * _single(params, a, b, delta)


def joint_prob(params: KaonParams, a: Strangeness, b: Strangeness, t1, t2):
    """Probability of finding ``a`` at ``t1`` and then ``b`` at ``t2``."""
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if np.any(t2 < t1):
        raise ParameterError("joint probability needs t1 <= t2")
    _check_times(t1, t2)
    return _scalar_or_array(_joint_gap(params, a, b, t1, t2 - t1))


def survival_prob(params: KaonParams, t1, t2):
    """Probability that both measurements find an undecayed kaon."""
    return sum(joint_prob(params, a, b, t1, t2) for a in Strangeness for b in Strangeness)


@dataclass(frozen=True)
class KaonCorrelator:
    start_time: Any
    end_time: Any
    value: Any
    numerator: Any
    denominator: Any


def _ratio(t_a, delta, num, den) -> KaonCorrelator:
    if np.any(np.asarray(den) < DENOMINATOR_FLOOR):
        raise ConditioningError(
            "survival probability below floor; both kaons have almost surely decayed"
        )
    return KaonCorrelator(
        start_time=_scalar_or_array(t_a),
        end_time=_scalar_or_array(np.asarray(t_a) + delta),
        value=_scalar_or_array(num / den),
        numerator=_scalar_or_array(num),
        denominator=_scalar_or_array(den),
    )


def correlator_gap(params: KaonParams, t_a, delta) -> KaonCorrelator:
    """Correlator between t_a and t_a + delta, from the four joint probabilities."""
    t_a = np.asarray(t_a, dtype=float)
    delta = np.asarray(delta, dtype=float)
    _check_times(t_a, delta, t_a + delta)
    num = 0.0
    den = 0.0
    for a in Strangeness:
        for b in Strangeness:
            p = _joint_gap(params, a, b, t_a, delta)
            num = num + a.q * b.q * p
            den = den + p
    return _ratio(t_a, delta, num, den)


def correlator(params: KaonParams, t_a, t_b) -> KaonCorrelator:
    """<Q(t_a) Q(t_b)> conditioned on survival, for 0 <= t_a <= t_b."""
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    if np.any(t_b < t_a):
        raise ParameterError("correlator needs t_a <= t_b")
    return correlator_gap(params, t_a, t_b - t_a)


def correlator_closed_form(params: KaonParams, t_a, t_b) -> KaonCorrelator:
    """Same correlator, written out as a single numerator/denominator expression."""
    t1 = np.asarray(t_a, dtype=float)
    t2 = np.asarray(t_b, dtype=float)
    if np.any(t2 < t1):
        raise ParameterError("correlator needs t_a <= t_b")
    _check_times(t1, t2)
    gl, gs, g, w = params.rate_l, params.rate_s, params.rate, params.omega
    n = 1.0 + params.eps_abs**2
    re = params.eps_re
    d = t2 - t1
    first = np.exp(-gl * t1) + np.exp(-gs * t1)
    second = np.exp(-gl * d) + np.exp(-gs * d)
    num = 0.5 * n * first * np.exp(-g * d) * np.cos(w * d) + re * np.exp(-g * t1) * second * np.cos(
        w * t1
    )
    den = 0.25 * n * first * second + 2.0 * re * np.exp(-g * t2) * np.cos(w * t1) * np.cos(w * d)
    return _ratio(t1, d, num, den)


def lgi_c_gaps(params: KaonParams, t1, g12, g23, g34) -> LgiEvaluation:
    """C for the quad (t1, t1+g12, t1+g12+g23, ...), broadcasting over arrays."""
    t1, g12, g23, g34 = (np.asarray(x, dtype=float) for x in (t1, g12, g23, g34))
    t2 = t1 + g12
    t3 = t2 + g23
    return LgiEvaluation(
        c12=correlator_gap(params, t1, g12).value,
        c23=correlator_gap(params, t2, g23).value,
        c34=correlator_gap(params, t3, g34).value,
        c14=correlator_gap(params, t1, g12 + g23 + g34).value,
        point={"t1": t1, "gaps": (g12, g23, g34)},
    )


def lgi_c(params: KaonParams, quad: TimeQuad) -> LgiEvaluation:
    ev = lgi_c_gaps(params, quad.t1, *quad.gaps)
    return LgiEvaluation(ev.c12, ev.c23, ev.c34, ev.c14, point=quad)


def lgi_c_equal_spacing(params: KaonParams, t1, dt) -> LgiEvaluation:
    """C on equally spaced quads t1, t1+dt, t1+2dt, t1+3dt (dt > 0)."""
    dt_arr = np.asarray(dt, dtype=float)
    if np.any(dt_arr <= 0):
        raise ParameterError("equal spacing needs dt > 0")
    if np.ndim(t1) == 0 and dt_arr.ndim == 0:
        return lgi_c(params, TimeQuad.equal_spacing(float(t1), float(dt)))
    ev = lgi_c_gaps(params, t1, dt_arr, dt_arr, dt_arr)
    return LgiEvaluation(ev.c12, ev.c23, ev.c34, ev.c14, point={"t1": t1, "dt": dt})
