"""
Validated parameter sets for oscillating kaons and neutrinos, measurement
time quadruples, and the JSON config representation.

Kaon times are dimensionless multiples of the short lifetime tau_S throughout
the package. Neutrino "times" are baseline over energy, L/E in km/MeV.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .constants import CONSTANTS, Constants
from .errors import ParameterError

__all__ = [
    "KaonParams",
    "NeutrinoParams",
    "TimeQuad",
    "make_kaon_params",
    "reference_kaon_params",
    "kamland_params",
    "kaon_phase_per_tau_s",
    "neutrino_phase",
    "params_to_config",
    "params_from_config",
    "load_config",
    "dump_config",
]

# Values used for the kaon and KamLAND results being reproduced.
REFERENCE_TAU_S = 0.8958e-10
REFERENCE_TAU_L = 0.5084e-7
REFERENCE_DELTA_M = 3.843e-12
REFERENCE_EPS_ABS = 2.232e-3
REFERENCE_EPS_RE = 1.596e-3
KAMLAND_DELTA_M2 = 7.58e-5
KAMLAND_TAN2_THETA = 0.56
# Only L/E enters any observable; a typical reactor energy.
DEFAULT_ENERGY_MEV = 4.0


@dataclass(frozen=True)
class KaonParams:
    """
    Neutral kaon parameters.

    Parameters
    ----------
    tau_s, tau_l : float
        Short and long lifetimes in seconds.
    delta_m : float
        Mass difference m_L - m_S in MeV.
    eps_abs, eps_re : float
        Modulus and real part of the CP violating parameter epsilon.
    cp_enabled : bool
        When False, epsilon is forced to zero whatever was passed.
    """

    tau_s: float
    tau_l: float
    delta_m: float
    eps_abs: float = 0.0
    eps_re: float = 0.0
    cp_enabled: bool = True
    constants: Constants = field(default=CONSTANTS, repr=False, compare=False)

    def __post_init__(self):
        for name in ("tau_s", "tau_l", "delta_m", "eps_abs", "eps_re"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
        if self.tau_s <= 0 or self.tau_l <= 0:
            raise ParameterError(
                f"lifetimes must be positive (tau_s={self.tau_s}, tau_l={self.tau_l})"
            )
        if self.tau_s >= self.tau_l:
            raise ParameterError(
                f"lifetimes out of order: tau_s={self.tau_s} must be < tau_l={self.tau_l}"
            )
        if self.delta_m < 0:
            raise ParameterError(f"delta_m must be >= 0, got {self.delta_m}")
        if not self.cp_enabled:
            object.__setattr__(self, "eps_abs", 0.0)
            object.__setattr__(self, "eps_re", 0.0)
        if not 0 <= self.eps_abs < 1:
            raise ParameterError(f"|eps| must lie in [0, 1), got {self.eps_abs}")
        if abs(self.eps_re) > self.eps_abs:
            raise ParameterError(
                f"|Re(eps)|={abs(self.eps_re)} exceeds |eps|={self.eps_abs}"
            )

    # Widths in MeV.
    @property
    def gamma_s(self) -> float:
        return self.constants.hbar_mev_s / self.tau_s

    @property
    def gamma_l(self) -> float:
        return self.constants.hbar_mev_s / self.tau_l

    @property
    def gamma(self) -> float:
        return 0.5 * (self.gamma_s + self.gamma_l)

    # Rates and frequency per tau_S, the internal time unit.
    @property
    def rate_s(self) -> float:
        return 1.0

    @property
    def rate_l(self) -> float:
        return self.tau_s / self.tau_l

    @property
    def rate(self) -> float:
        return 0.5 * (self.rate_s + self.rate_l)

    @property
    def omega(self) -> float:
        return kaon_phase_per_tau_s(self)

    @property
    def eps_im(self) -> float:
        # Only |eps|^2 and Re(eps) reach the observables; the sign is a convention.
        return math.sqrt(max(self.eps_abs**2 - self.eps_re**2, 0.0))

    @property
    def eps(self) -> complex:
        return complex(self.eps_re, self.eps_im)

    @property
    def transition_ratio(self) -> float:
        """|1 - eps|^2 / |1 + eps|^2, the K0 -> K0bar prefactor."""
        n = 1.0 + self.eps_abs**2
        return (n - 2.0 * self.eps_re) / (n + 2.0 * self.eps_re)

    def with_eps_abs(self, eps_abs: float) -> KaonParams:
        """Rescale |eps| keeping Re(eps)/|eps| at its current value."""
        if self.eps_abs == 0:
            raise ParameterError("cannot rescale epsilon when |eps| = 0")
        return replace(self, eps_abs=eps_abs, eps_re=self.eps_re * eps_abs / self.eps_abs)

    def with_cp(self, enabled: bool) -> KaonParams:
        return replace(self, cp_enabled=enabled)


def make_kaon_params(tau_s, tau_l, delta_m, eps_abs, eps_re, cp_enabled=True) -> KaonParams:
    return KaonParams(
        tau_s=float(tau_s),
        tau_l=float(tau_l),
        delta_m=float(delta_m),
        eps_abs=float(eps_abs),
        eps_re=float(eps_re),
        cp_enabled=bool(cp_enabled),
    )


def reference_kaon_params(cp_enabled: bool = True) -> KaonParams:
    return make_kaon_params(
        REFERENCE_TAU_S, REFERENCE_TAU_L, REFERENCE_DELTA_M, REFERENCE_EPS_ABS, REFERENCE_EPS_RE, cp_enabled
    )


def kaon_phase_per_tau_s(params: KaonParams) -> float:
    """Oscillation phase delta_m * tau_S / hbar accumulated per short lifetime."""
    return params.delta_m * params.tau_s / params.constants.hbar_mev_s


@dataclass(frozen=True)
class NeutrinoParams:
    """
    Two-flavor neutrino parameters.

    ``delta_m2_ev2`` is dm^2 c^4 in eV^2, ``theta_rad`` the mixing angle and
    ``energy_mev`` the mean beam energy.
    """

    delta_m2_ev2: float
    theta_rad: float
    energy_mev: float = DEFAULT_ENERGY_MEV
    constants: Constants = field(default=CONSTANTS, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.delta_m2_ev2) and self.delta_m2_ev2 > 0):
            raise ParameterError(f"delta_m2_ev2 must be > 0, got {self.delta_m2_ev2}")
        if not (math.isfinite(self.theta_rad) and 0 <= self.theta_rad <= math.pi / 2):
            raise ParameterError(f"theta_rad must lie in [0, pi/2], got {self.theta_rad}")
        if not (math.isfinite(self.energy_mev) and self.energy_mev > 0):
            raise ParameterError(f"energy_mev must be > 0, got {self.energy_mev}")

    @classmethod
    def from_tan2(cls, delta_m2_ev2, tan2_theta, energy_mev=DEFAULT_ENERGY_MEV):
        if not tan2_theta >= 0:
            raise ParameterError(f"tan^2(theta) must be >= 0, got {tan2_theta}")
        return cls(float(delta_m2_ev2), math.atan(math.sqrt(tan2_theta)), float(energy_mev))

    @property
    def tan2_theta(self) -> float:
        return math.tan(self.theta_rad) ** 2

    @property
    def sin2_2theta(self) -> float:
        return math.sin(2.0 * self.theta_rad) ** 2

    def with_theta(self, theta_rad: float) -> NeutrinoParams:
        return replace(self, theta_rad=theta_rad)

    def l_over_e_to_seconds(self, l_over_e):
        """Flight time for a baseline given as L/E (km/MeV) at this beam energy."""
        baseline_m = np.asarray(l_over_e, dtype=float) * self.energy_mev * 1e3
        return baseline_m / self.constants.c_m_per_s


def kamland_params(energy_mev: float = DEFAULT_ENERGY_MEV) -> NeutrinoParams:
    return NeutrinoParams.from_tan2(KAMLAND_DELTA_M2, KAMLAND_TAN2_THETA, energy_mev)


def neutrino_phase(params: NeutrinoParams, l_over_e):
    """
    Oscillation phase dm^2 c^4 L / (4 hbar c E) for L/E in km/MeV.

    Accepts scalars or arrays; negative L/E is rejected.
    """
    loe = np.asarray(l_over_e, dtype=float)
    if np.any(loe < 0) or not np.all(np.isfinite(loe)):
        raise ParameterError("L/E must be finite and non-negative")
    phase = params.constants.osc_coefficient_km_per_mev() * params.delta_m2_ev2 * loe
    return float(phase) if phase.ndim == 0 else phase


@dataclass(frozen=True)
class TimeQuad:
    """
    Four ordered measurement times t1 <= t2 <= t3 <= t4.

    The three gaps are stored alongside the times so that separations are
    exact for equally spaced quads rather than recovered by subtraction.
    """

    t1: float
    t2: float
    t3: float
    t4: float
    gaps: tuple = field(default=None, compare=False)

    def __post_init__(self):
        times = (self.t1, self.t2, self.t3, self.t4)
        if not all(math.isfinite(t) and t >= 0 for t in times):
            raise ParameterError(f"times must be finite and >= 0, got {times}")
        if not (self.t1 <= self.t2 <= self.t3 <= self.t4):
            raise ParameterError(f"times must be ordered t1<=t2<=t3<=t4, got {times}")
        if self.gaps is None:
            object.__setattr__(
                self, "gaps", (self.t2 - self.t1, self.t3 - self.t2, self.t4 - self.t3)
            )

    @classmethod
    def from_gaps(cls, t1: float, g12: float, g23: float, g34: float) -> TimeQuad:
        if min(g12, g23, g34) < 0:
            raise ParameterError(f"gaps must be >= 0, got {(g12, g23, g34)}")
        t2 = t1 + g12
        t3 = t2 + g23
        return cls(t1, t2, t3, t3 + g34, gaps=(g12, g23, g34))

    @classmethod
    def equal_spacing(cls, t1: float, dt: float) -> TimeQuad:
        return cls.from_gaps(t1, dt, dt, dt)

    @property
    def times(self) -> tuple:
        return (self.t1, self.t2, self.t3, self.t4)

    def pairs(self) -> tuple:
        """(start, separation) for C12, C23, C34 and C14, in that order."""
        g12, g23, g34 = self.gaps
        return (
            (self.t1, g12),
            (self.t2, g23),
            (self.t3, g34),
            (self.t1, g12 + g23 + g34),
        )


# -- config ---------------------------------------------------------------

_KAON_KEYS = ("tau_s", "tau_l", "delta_m", "eps_abs", "eps_re", "cp_enabled")
_NEUTRINO_KEYS = ("delta_m2_ev2", "theta_rad", "tan2_theta", "energy_mev")


def check_keys(section: str, data: dict, allowed) -> None:
    if not isinstance(data, dict):
        raise ParameterError(f"config section {section!r} must be an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ParameterError(f"unknown keys in {section!r}: {', '.join(unknown)}")


def kaon_params_from_dict(data: dict, base: KaonParams | None = None) -> KaonParams:
    check_keys("kaon", data, _KAON_KEYS)
    base = base or reference_kaon_params()
    merged = {k: getattr(base, k) for k in _KAON_KEYS}
    merged.update(data)
    try:
        return make_kaon_params(**merged)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"invalid kaon parameters: {exc}") from exc


def neutrino_params_from_dict(data: dict, base: NeutrinoParams | None = None) -> NeutrinoParams:
    check_keys("neutrino", data, _NEUTRINO_KEYS)
    if "theta_rad" in data and "tan2_theta" in data:
        raise ParameterError("give either theta_rad or tan2_theta, not both")
    base = base or kamland_params()
    try:
        dm2 = float(data.get("delta_m2_ev2", base.delta_m2_ev2))
        energy = float(data.get("energy_mev", base.energy_mev))
        if "tan2_theta" in data:
            return NeutrinoParams.from_tan2(dm2, float(data["tan2_theta"]), energy)
        return NeutrinoParams(dm2, float(data.get("theta_rad", base.theta_rad)), energy)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"invalid neutrino parameters: {exc}") from exc


def params_to_config(kaon: KaonParams | None = None, neutrino: NeutrinoParams | None = None) -> dict:
    out: dict[str, Any] = {}
    if kaon is not None:
        out["kaon"] = {k: getattr(kaon, k) for k in _KAON_KEYS}
    if neutrino is not None:
        out["neutrino"] = {
            "delta_m2_ev2": neutrino.delta_m2_ev2,
            "theta_rad": neutrino.theta_rad,
            "energy_mev": neutrino.energy_mev,
        }
    return out


def params_from_config(config: dict, extra_sections=()) -> tuple[KaonParams, NeutrinoParams]:
    """Build both parameter sets from a config mapping; missing sections use defaults."""
    check_keys("<top level>", config, ("kaon", "neutrino", *extra_sections))
    kaon = kaon_params_from_dict(config.get("kaon", {}))
    neutrino = neutrino_params_from_dict(config.get("neutrino", {}))
    return kaon, neutrino


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParameterError("config must be a JSON object")
    return data


def dump_config(config: dict, path=None) -> str:
    text = json.dumps(config, indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
