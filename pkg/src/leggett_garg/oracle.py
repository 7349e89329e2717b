"""
Amplitude-level two-state evolution with projective collapse.

This module is an independent check on the closed forms in ``kaon`` and
``neutrino``: it never uses a transcribed probability formula. A state is
propagated as M diag(exp(-i lambda t)) M^-1 in the measurement basis, where
the columns of M are the (possibly non-orthogonal) evolution eigenstates.

Basis index 0 is the Q = +1 outcome (K0, nu_e), index 1 is Q = -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, ParameterError
from .params import KaonParams, NeutrinoParams

__all__ = [
    "TwoStateModel",
    "StateVector",
    "kaon_model",
    "neutrino_model",
    "evolve",
    "collapse",
    "oracle_joint",
    "oracle_correlator",
    "outcome_index",
]

_OUTCOME_Q = (1, -1)


def outcome_index(outcome) -> int:
    """Accept a basis index or any enum-like label carrying ``q`` = +/-1."""
    if isinstance(outcome, (int, np.integer)) and outcome in (0, 1):
        return int(outcome)
    q = getattr(outcome, "q", None)
    if q == 1:
        return 0
    if q == -1:
        return 1
    raise ParameterError(f"not a basis outcome: {outcome!r}")


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2,):
            raise ParameterError(f"state needs two amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, index: int) -> StateVector:
        amps = np.zeros(2, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def prob(self, outcome) -> float:
        return float(abs(self.amplitudes[outcome_index(outcome)]) ** 2)


@dataclass(frozen=True)
class TwoStateModel:
    """
    mixing : columns are evolution eigenstates in the measurement basis
    eigenvalues : complex; real part energy, imaginary part -width/2 (hbar = 1
        in whatever time unit the caller uses)
    """

    mixing: np.ndarray
    eigenvalues: np.ndarray
    initial: int = 0

    def __post_init__(self):
        m = np.asarray(self.mixing, dtype=complex)
        lam = np.asarray(self.eigenvalues, dtype=complex)
        if m.shape != (2, 2) or lam.shape != (2,):
            raise ParameterError("need a 2x2 mixing matrix and two eigenvalues")
        if abs(np.linalg.det(m)) <= 1e-12:
            raise ParameterError("mixing matrix is singular")
        object.__setattr__(self, "mixing", m)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "_inverse", np.linalg.inv(m))

    @property
    def inverse(self) -> np.ndarray:
        return self._inverse

    def initial_state(self) -> StateVector:
        return StateVector.basis(self.initial)

    def propagator(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.eigenvalues * t)
        return self.mixing @ np.diag(phases) @ self._inverse

    def eigenstate_overlap(self) -> complex:
        """<col0|col1>, e.g. <K_L|K_S>."""
        return complex(np.vdot(self.mixing[:, 0], self.mixing[:, 1]))


def kaon_model(params: KaonParams, im_sign: int = 1) -> TwoStateModel:
    """
    K_L, K_S as columns over (K0, K0bar), time in units of tau_S.

    K_{L,S} = [(1 + eps) K0 +/- (1 - eps) K0bar] / sqrt(2 (1 + |eps|^2)).
    """
    eps = complex(params.eps_re, math.copysign(params.eps_im, im_sign))
    norm = math.sqrt(2.0 * (1.0 + abs(eps) ** 2))
    p = (1.0 + eps) / norm
    q = (1.0 - eps) / norm
    mixing = np.array([[p, p], [q, -q]], dtype=complex)
    # lambda = m - i gamma/2 with m_S as the energy zero; in tau_S units
    # gamma_S tau_S / hbar is 1 by construction.
    hbar = params.constants.hbar_mev_s
    lam_l = params.delta_m * params.tau_s / hbar - 0.5j * params.gamma_l * params.tau_s / hbar
    lam_s = -0.5j * params.gamma_s * params.tau_s / hbar
    return TwoStateModel(mixing, np.array([lam_l, lam_s]))


def neutrino_model(params: NeutrinoParams) -> TwoStateModel:
    """
    nu_1, nu_2 as columns over (nu_e, nu_mu), "time" measured in L/E (km/MeV).

    nu_1 = cos(theta) nu_mu - sin(theta) nu_e, nu_2 = sin(theta) nu_mu + cos(theta) nu_e.
    E_2 - E_1 = dm^2 c^4 / 2E, which in L/E units is twice the phase coefficient.
    """
    c, s = math.cos(params.theta_rad), math.sin(params.theta_rad)
    mixing = np.array([[-s, c], [c, s]], dtype=complex)
    split = 2.0 * params.constants.osc_coefficient_km_per_mev() * params.delta_m2_ev2
    return TwoStateModel(mixing, np.array([0.0, split], dtype=complex))


def _check_t(t) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ParameterError(f"evolution time must be finite and >= 0, got {t}")
    return t


def evolve(model: TwoStateModel, state: StateVector, t: float) -> StateVector:
    t = _check_t(t)
    if t == 0:
        return StateVector(state.amplitudes.copy())
    return StateVector(model.propagator(t) @ state.amplitudes)


def collapse(state: StateVector, outcome) -> tuple[float, StateVector]:
    """Projective measurement: (probability of ``outcome``, collapsed unit state)."""
    index = outcome_index(outcome)
    return state.prob(index), StateVector.basis(index)


def oracle_joint(model: TwoStateModel, a, b, t1: float, t2: float) -> float:
    """Evolve to t1, collapse on a, evolve to t2, collapse on b."""
    t1, t2 = _check_t(t1), _check_t(t2)
    if t2 < t1:
        raise ParameterError("oracle joint needs t1 <= t2")
    p1, collapsed = collapse(evolve(model, model.initial_state(), t1), a)
    p2, _ = collapse(evolve(model, collapsed, t2 - t1), b)
    return p1 * p2


def oracle_correlator(model: TwoStateModel, t_a: float, t_b: float) -> float:
    num = 0.0
    den = 0.0
    for a in (0, 1):
        for b in (0, 1):
            p = oracle_joint(model, a, b, t_a, t_b)
            num += _OUTCOME_Q[a] * _OUTCOME_Q[b] * p
            den += p
    if den <= 0.0:
        raise ConditioningError("no surviving two-measurement histories")
    return num / den
