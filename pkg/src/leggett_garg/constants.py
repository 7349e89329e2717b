"""
Physical constants and unit bridges.

The reduced Planck constant in MeV s is the single source of truth for every
phase and decay rate in the package. The tabulated hbar*c value is kept only
as an independent cross-check of the derived neutrino phase coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Constants", "CONSTANTS"]

FM_PER_M = 1e15
EV_PER_MEV = 1e6
M_PER_KM = 1e3


@dataclass(frozen=True)
class Constants:
    """Base constants (value, unit in the field name)."""

    hbar_mev_s: float = 6.58212e-22
    hbar_c_mev_fm: float = 197.327
    c_m_per_s: float = 2.99792458e8

    @property
    def hbar_c_ev_m(self) -> float:
        """hbar*c in eV m, composed from hbar and c."""
        return self.hbar_mev_s * EV_PER_MEV * self.c_m_per_s

    @property
    def hbar_c_ev_m_tabulated(self) -> float:
        """hbar*c in eV m, from the tabulated MeV fm value."""
        return self.hbar_c_mev_fm * EV_PER_MEV / FM_PER_M

    def osc_coefficient(self, tabulated: bool = False) -> float:
        """
        Neutrino phase per (eV^2 km / GeV).

        phase = coefficient * dm2[eV^2] * L[km] / E[GeV], the familiar ~1.267.
        Equivalent to L in m and E in MeV.
        """
        hbar_c = self.hbar_c_ev_m_tabulated if tabulated else self.hbar_c_ev_m
        # L[km] -> m, E[GeV] -> eV
        return M_PER_KM / (4.0 * hbar_c * 1e9)

    def osc_coefficient_km_per_mev(self, tabulated: bool = False) -> float:
        """Neutrino phase per (eV^2 km / MeV)."""
        return 1e3 * self.osc_coefficient(tabulated=tabulated)


CONSTANTS = Constants()
