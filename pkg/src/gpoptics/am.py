"""Azimuthal mode spectra, winding numbers and per-photon angular momentum.

Angular momentum is paraxial and per photon, in units of hbar: spin from
the circular power balance, orbital from the power-weighted mean azimuthal
index of each circular channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels
from .conventions import SPIN, check_component, opposite
from .errors import EmptyComponent, GeometryMismatch, NearZeroAmplitude, Undersampled, ZeroPower
from .field import FieldGrid

__all__ = [
    "OAMSpectrum",
    "AMReport",
    "HolonomyReport",
    "azimuthal_spectrum",
    "winding_number",
    "loop_winding",
    "am_report",
    "holonomy_check",
    "AM_SCHEMA_VERSION",
]

AM_SCHEMA_VERSION = 1

# relative power below which a circular channel counts as absent
_EMPTY_FRACTION = 1e-24
# in-band spectrum entries below this are not listed
_POWER_FLOOR = 1e-15


@dataclass(frozen=True, eq=False)
class OAMSpectrum:
    """Radius-integrated azimuthal mode powers of one circular channel.

    `l` and `p` cover the whole DFT range [-n_phi/2, n_phi/2); `powers`
    lists the band |l| <= `band`, and `residual` is the power outside it,
    which is where branch-cut leakage of discontinuous fields ends up.
    """

    component: str
    l: np.ndarray
    p: np.ndarray
    band: int
    component_power: float

    @property
    def powers(self) -> dict:
        sel = (np.abs(self.l) <= self.band) & (self.p >= _POWER_FLOOR)
        return {int(k): float(v) for k, v in zip(self.l[sel], self.p[sel])}

    @property
    def residual(self) -> float:
        return float(self.p[np.abs(self.l) > self.band].sum())

    @property
    def mean_l(self) -> float:
        return float(np.dot(self.l, self.p))

    @property
    def dominant(self) -> int:
        return int(self.l[np.argmax(self.p)])

    def power_at(self, l: int) -> float:
        hit = np.flatnonzero(self.l == l)
        return float(self.p[hit[0]]) if hit.size else 0.0

    def to_dict(self) -> dict:
        return {
            "schema": "gpoptics.oam_spectrum",
            "schema_version": AM_SCHEMA_VERSION,
            "component": self.component,
            "band": self.band,
            "component_power": self.component_power,
            "mean_l": self.mean_l,
            "powers": {str(k): v for k, v in sorted(self.powers.items())},
            "residual": self.residual,
        }


@dataclass(frozen=True)
class AMReport:
    spin_per_photon: float
    oam_per_photon: float
    total_per_photon: float
    components: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "gpoptics.am_report",
            "schema_version": AM_SCHEMA_VERSION,
            "spin_per_photon": self.spin_per_photon,
            "oam_per_photon": self.oam_per_photon,
            "total_per_photon": self.total_per_photon,
            "components": {
                k: {"power_fraction": v[0], "mean_l": v[1]} for k, v in sorted(self.components.items())
            },
        }


@dataclass(frozen=True)
class HolonomyReport:
    delta_oam: float
    delta_spin: float
    delta_total: float
    gp_charge: float
    delta_oam_flipped: float
    input_component: str
    flipped_channel_present: bool
    branch_cut: bool
    tolerance: float

    @property
    def equivalence_holds(self) -> bool:
        return abs(self.delta_oam_flipped - self.gp_charge) < self.tolerance

    def to_dict(self) -> dict:
        return {
            "schema": "gpoptics.holonomy_check",
            "schema_version": AM_SCHEMA_VERSION,
            "delta_oam": self.delta_oam,
            "delta_spin": self.delta_spin,
            "delta_total": self.delta_total,
            "gp_charge": self.gp_charge,
            "delta_oam_flipped": self.delta_oam_flipped,
            "input_component": self.input_component,
            "flipped_channel_present": self.flipped_channel_present,
            "branch_cut": self.branch_cut,
            "tolerance": self.tolerance,
            "equivalence_holds": self.equivalence_holds,
        }


def _channel_powers(f: FieldGrid):
    g = f.geometry
    w = g.radial_weights()
    a_l, a_r = f.circular()
    p_l = float(np.dot(w, (np.abs(a_l) ** 2).sum(axis=1)) * g.dphi)
    p_r = float(np.dot(w, (np.abs(a_r) ** 2).sum(axis=1)) * g.dphi)
    return {"L": p_l, "R": p_r}


def azimuthal_spectrum(f: FieldGrid, component: str, band: int | None = None) -> OAMSpectrum:
    check_component(component)
    g = f.geometry
    powers = _channel_powers(f)
    total = powers["L"] + powers["R"]
    if powers[component] <= _EMPTY_FRACTION * total or powers[component] <= 0.0:
        raise EmptyComponent(f"circular component {component} carries no power")
    a = f.component(component)
    coeff = np.fft.fft(a, axis=1) / g.n_phi
    mode_power = 2 * np.pi * (g.radial_weights() @ (np.abs(coeff) ** 2))
    l = np.fft.fftfreq(g.n_phi, d=1.0 / g.n_phi).astype(int)
    order = np.argsort(l, kind="stable")
    l, mode_power = l[order], mode_power[order]
    p = mode_power / mode_power.sum()
    return OAMSpectrum(component, l, p, g.n_phi // 4 if band is None else int(band), float(powers[component]))


def loop_winding(values, branch_cut: bool | None = None):
    """Winding of complex samples around a closed loop, in 2*pi units.

    Returns ``(winding, cut)``. The closing step (last -> first sample) is
    treated as a branch cut when `branch_cut` is True, or, by default, when
    it departs from the phase rate of its neighbours; it is then replaced
    by that rate so fractional windings come out as real numbers.
    """
    a = np.asarray(values, dtype=complex)
    mag = np.abs(a)
    if mag.max() == 0 or mag.min() <= 1e-9 * mag.max():
        raise NearZeroAmplitude("amplitude vanishes on the loop; winding undefined")
    steps = _kernels.phase_steps(np.angle(a))
    interior = steps[:-1]
    big = np.flatnonzero(np.abs(interior) > np.pi / 2)
    if big.size:
        raise Undersampled(f"phase jumps by {interior[big[0]]:.3f} rad between samples {big[0]} and {big[0] + 1}")
    closing = steps[-1]
    predicted = 0.5 * (steps[-2] + steps[0])
    if branch_cut is None:
        variation = np.max(np.abs(np.diff(interior))) if interior.size > 1 else 0.0
        cut = abs(closing - predicted) > max(1e-2, 10.0 * variation)
    else:
        cut = bool(branch_cut)
    if cut:
        closing = predicted
    elif abs(closing) > np.pi / 2:
        raise Undersampled(f"phase jumps by {closing:.3f} rad across phi = 0")
    return float((interior.sum() + closing) / (2 * np.pi)), bool(cut)


def winding_number(f: FieldGrid, component: str, radius_index: int | None = None, branch_cut: bool | None = None) -> float:
    """Topological charge of a circular channel around the loop at
    `radius_index` (default: mid radius)."""
    check_component(component)
    i = f.geometry.mid_index() if radius_index is None else radius_index
    return loop_winding(f.component(component)[i], branch_cut)[0]


def am_report(f: FieldGrid) -> AMReport:
    powers = _channel_powers(f)
    total = powers["L"] + powers["R"]
    if not total > 0:
        raise ZeroPower("field carries no power")
    spin = (powers["L"] - powers["R"]) / total
    oam = 0.0
    parts = {}
    for c in ("L", "R"):
        frac = powers[c] / total
        if powers[c] <= _EMPTY_FRACTION * total:
            parts[c] = (frac, 0.0)
            continue
        mean_l = azimuthal_spectrum(f, c).mean_l
        parts[c] = (frac, mean_l)
        oam += frac * mean_l
    return AMReport(float(spin), float(oam), float(spin + oam), parts)


def holonomy_check(before: FieldGrid, after: FieldGrid, radius_index: int | None = None) -> HolonomyReport:
    """Compare angular momentum before/after an element with the geometric
    phase winding acquired by the spin-flipped channel.

    The geometric-phase charge is the winding of a_flipped(after) *
    conj(a_input(before)); the equivalence holds when it equals the OAM
    shift of that channel (1e-6, or 1e-2 across a branch cut).
    """
    if before.geometry != after.geometry:
        raise GeometryMismatch("before/after fields have different grids")
    rb, ra = am_report(before), am_report(after)
    pb, pa = _channel_powers(before), _channel_powers(after)
    c_in = "L" if pb["L"] >= pb["R"] else "R"
    c_flip = opposite(c_in)
    total_after = pa["L"] + pa["R"]
    present = pa[c_flip] > 1e-12 * total_after
    cut = False
    if present:
        i = before.geometry.mid_index() if radius_index is None else radius_index
        rel = after.component(c_flip)[i] * np.conj(before.component(c_in)[i])
        gp_charge, cut = loop_winding(rel)
        d_flip = ra.components[c_flip][1] - rb.components[c_in][1]
    else:
        gp_charge, d_flip = 0.0, 0.0
    return HolonomyReport(
        delta_oam=ra.oam_per_photon - rb.oam_per_photon,
        delta_spin=ra.spin_per_photon - rb.spin_per_photon,
        delta_total=ra.total_per_photon - rb.total_per_photon,
        gp_charge=float(gp_charge),
        delta_oam_flipped=float(d_flip),
        input_component=c_in,
        flipped_channel_present=bool(present),
        branch_cut=cut,
        tolerance=1e-2 if cut else 1e-6,
    )


def input_helicity(f: FieldGrid) -> int:
    """Spin sign of the dominant circular channel."""
    p = _channel_powers(f)
    return SPIN["L"] if p["L"] >= p["R"] else SPIN["R"]
