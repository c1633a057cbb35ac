"""Transverse vector fields sampled on an annular polar grid.

The grid excludes r = 0: the axis of a vortex is a phase singularity and
the phase-gradient map is undefined there. Azimuthal samples are uniform on
[0, 2*pi), with the branch cut of non-integer-q fields at phi = 0.
Lengths are in units of the beam waist.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import _kernels
from .conventions import ZERO_INTENSITY, component_of_helicity
from .errors import BadEps, BadGeometry, ZeroIntensityRegion
from .polarization import JonesVector, circular_components, jones_components

__all__ = [
    "GridGeometry",
    "FieldGrid",
    "Envelope",
    "BeamSpec",
    "KDeltaMap",
    "synthesize_beam",
    "apply_element_pointwise",
    "eq4_vector_vortex",
    "focal_field_model",
    "kdelta_map",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "FIELD_SCHEMA_VERSION",
]

FIELD_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GridGeometry:
    n_r: int = 64
    n_phi: int = 512
    r_max: float = 3.0
    r_min: float | None = None
    wavelength: float = 1.0

    def __post_init__(self):
        if self.r_min is None:
            object.__setattr__(self, "r_min", self.r_max / (2 * self.n_r) if self.n_r > 0 else 0.0)
        self.validate()

    def validate(self):
        if int(self.n_r) != self.n_r or self.n_r < 1:
            raise BadGeometry(f"n_r must be a positive integer, got {self.n_r!r}")
        if int(self.n_phi) != self.n_phi or self.n_phi < 16 or self.n_phi % 2:
            raise BadGeometry(f"n_phi must be an even integer >= 16, got {self.n_phi!r}")
        if not self.r_min > 0:
            raise BadGeometry(f"r_min must be > 0 (annular grid), got {self.r_min!r}")
        if not self.r_max > self.r_min and self.n_r > 1:
            raise BadGeometry(f"r_max must exceed r_min, got r_min={self.r_min!r}, r_max={self.r_max!r}")
        if not self.wavelength > 0:
            raise BadGeometry("wavelength must be > 0")

    @property
    def r(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_r)

    @property
    def phi(self) -> np.ndarray:
        return np.arange(self.n_phi) * (2 * np.pi / self.n_phi)

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / (self.n_r - 1) if self.n_r > 1 else 1.0

    @property
    def dphi(self) -> float:
        return 2 * np.pi / self.n_phi

    def radial_weights(self) -> np.ndarray:
        """Midpoint-rule weights r*dr."""
        return self.r * self.dr

    def mid_index(self) -> int:
        """Radius index closest to (r_min + r_max)/2."""
        return int(np.argmin(np.abs(self.r - 0.5 * (self.r_min + self.r_max))))

    def mesh(self):
        return np.meshgrid(self.r, self.phi, indexing="ij")

    def as_dict(self) -> dict:
        return {
            "n_r": int(self.n_r),
            "n_phi": int(self.n_phi),
            "r_min": float(self.r_min),
            "r_max": float(self.r_max),
            "wavelength": float(self.wavelength),
        }


class FieldGrid:
    """Jones vectors on a polar grid; `e` has shape (n_r, n_phi, 2).

    Instances are immutable: operations return new grids.
    """

    def __init__(self, geometry: GridGeometry, e):
        e = np.array(e, dtype=complex)
        if e.shape != (geometry.n_r, geometry.n_phi, 2):
            raise BadGeometry(f"field shape {e.shape} does not match geometry ({geometry.n_r}, {geometry.n_phi}, 2)")
        e.flags.writeable = False
        self.geometry = geometry
        self.e = e

    @classmethod
    def from_circular(cls, geometry, a_l, a_r) -> FieldGrid:
        ex, ey = jones_components(a_l, a_r)
        return cls(geometry, np.stack([ex, ey], axis=-1))

    @property
    def ex(self):
        return self.e[..., 0]

    @property
    def ey(self):
        return self.e[..., 1]

    @property
    def r(self):
        return self.geometry.r

    @property
    def phi(self):
        return self.geometry.phi

    def circular(self):
        """(a_l, a_r) arrays, each (n_r, n_phi)."""
        return circular_components(self.ex, self.ey)

    def component(self, name: str) -> np.ndarray:
        a_l, a_r = self.circular()
        return a_l if name == "L" else a_r

    def intensity(self) -> np.ndarray:
        return np.abs(self.ex) ** 2 + np.abs(self.ey) ** 2

    def power(self) -> float:
        """Total power sum_{r, phi} |E|^2 r dr dphi."""
        w = self.geometry.radial_weights()
        return float(np.sum(w * self.intensity().sum(axis=1)) * self.geometry.dphi)

    def sample(self, i_r: int, i_phi: int) -> JonesVector:
        return JonesVector(self.e[i_r, i_phi, 0], self.e[i_r, i_phi, 1])

    def map(self, fn) -> FieldGrid:
        return FieldGrid(self.geometry, fn(self.e))

    def __repr__(self):
        g = self.geometry
        return f"FieldGrid(n_r={g.n_r}, n_phi={g.n_phi}, r=[{g.r_min:g}, {g.r_max:g}])"


@dataclass(frozen=True)
class Envelope:
    """Radial amplitude profile: 'gaussian' (waist), 'ring' (r0, width) or
    'uniform'."""

    kind: str = "gaussian"
    waist: float = 1.0
    r0: float = 1.0
    width: float = 0.5

    def __post_init__(self):
        if self.kind not in ("gaussian", "ring", "uniform"):
            raise ValueError(f"unknown envelope {self.kind!r}")
        if self.kind == "gaussian" and not self.waist > 0:
            raise ValueError("waist must be > 0")
        if self.kind == "ring" and not self.width > 0:
            raise ValueError("width must be > 0")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-((r / self.waist) ** 2))
        if self.kind == "ring":
            return np.exp(-(((r - self.r0) / self.width) ** 2))
        return np.ones_like(r)

    def as_dict(self):
        if self.kind == "gaussian":
            return {"kind": "gaussian", "waist": self.waist}
        if self.kind == "ring":
            return {"kind": "ring", "r0": self.r0, "width": self.width}
        return {"kind": "uniform"}


def _polarization_vector(pol) -> np.ndarray:
    if isinstance(pol, str):
        from .conventions import KET_L, KET_R

        if pol == "L":
            return KET_L.copy()
        if pol == "R":
            return KET_R.copy()
        raise ValueError(f"polarization selector must be 'L' or 'R', got {pol!r}")
    return np.array([complex(pol.ex), complex(pol.ey)]) if isinstance(pol, JonesVector) else np.asarray(pol, complex)


@dataclass(frozen=True)
class BeamSpec:
    """Scalar vortex envelope(r) * exp(i l phi) times a global polarization.

    `polarization` is a JonesVector or the circular selector 'L' / 'R'.
    """

    envelope: Envelope = dc_field(default_factory=Envelope)
    charge: int = 0
    polarization: object = "L"

    def __post_init__(self):
        if int(self.charge) != self.charge:
            raise ValueError(f"vortex charge must be an integer, got {self.charge!r}")
        _polarization_vector(self.polarization)

    def polarization_vector(self) -> np.ndarray:
        return _polarization_vector(self.polarization)


def synthesize_beam(spec: BeamSpec, geometry: GridGeometry) -> FieldGrid:
    geometry.validate()
    rr, pp = geometry.mesh()
    scalar = spec.envelope(rr) * np.exp(1j * spec.charge * pp)
    return FieldGrid(geometry, scalar[..., None] * spec.polarization_vector())


def apply_element_pointwise(f: FieldGrid, element, threads: int | None = None) -> FieldGrid:
    """out(r, phi) = M(phi) . in(r, phi).

    `element` is a callable mapping the phi samples to an (n_phi, 2, 2)
    array (e.g. `elements.qplate_family`), a single JonesMatrix, or a
    (n_phi, 2, 2) array.
    """
    g = f.geometry
    if callable(element):
        m = np.asarray(element(g.phi), dtype=complex)
    else:
        m = np.asarray(element, dtype=complex)
    if m.shape == (2, 2):
        m = np.broadcast_to(m, (g.n_phi, 2, 2))
    if m.shape != (g.n_phi, 2, 2):
        raise BadGeometry(f"element family has shape {m.shape}, expected ({g.n_phi}, 2, 2)")
    m = np.ascontiguousarray(m)
    src = np.ascontiguousarray(f.e)
    out = np.empty_like(src)
    n = _kernels.thread_count() if threads is None else max(1, int(threads))
    n = min(n, g.n_r)
    if n <= 1:
        _kernels.apply_family(src, m, out, 0, g.n_r)
    else:
        # disjoint row blocks; result does not depend on scheduling
        bounds = np.linspace(0, g.n_r, n + 1).astype(int)
        with ThreadPoolExecutor(max_workers=n) as pool:
            list(pool.map(lambda k: _kernels.apply_family(src, m, out, int(bounds[k]), int(bounds[k + 1])), range(n)))
    return FieldGrid(g, out)


def eq4_vector_vortex(alpha: float, geometry: GridGeometry) -> FieldGrid:
    """Uniform-envelope vector vortex e^{-i(a+2phi)}|R> + e^{i(a+2phi)}|L>.

    Linearly polarized everywhere, with the polarization azimuth turning by
    2*phi around the axis.
    """
    geometry.validate()
    _, pp = geometry.mesh()
    arg = alpha + 2.0 * pp
    return FieldGrid.from_circular(geometry, np.exp(1j * arg), np.exp(-1j * arg))


def focal_field_model(input_helicity: int, eps: float, geometry: GridGeometry, envelope: Envelope | None = None) -> FieldGrid:
    """Parameterized stand-in for the focal field of a circularly polarized beam.

    Same-spin channel: sqrt(1 - eps^2) * envelope, no extra phase.
    Opposite-spin channel: eps * envelope * exp(2 i sigma_in phi).
    """
    geometry.validate()
    if not (0.0 <= eps < 1.0):
        raise BadEps(f"eps must lie in [0, 1), got {eps!r}")
    same = component_of_helicity(input_helicity)
    env = (envelope or Envelope())
    rr, pp = geometry.mesh()
    amp = env(rr)
    a_same = np.sqrt(1.0 - eps**2) * amp + 0j
    a_opp = eps * amp * np.exp(2j * input_helicity * pp)
    if same == "L":
        return FieldGrid.from_circular(geometry, a_same, a_opp)
    return FieldGrid.from_circular(geometry, a_opp, a_same)


@dataclass(frozen=True, eq=False)
class KDeltaMap:
    """Phase-gradient propagation vector on the grid (radians per length)."""

    k_r: np.ndarray
    k_phi: np.ndarray
    geometry: GridGeometry


def _phase_gradient(e: np.ndarray, geometry: GridGeometry):
    """Im(E^dagger dE)/|E|^2 along r and along the arc r*phi.

    `e` may be a vector field (..., 2) or scalar (n_r, n_phi).
    """
    vec = e.ndim == 3
    inten = (np.abs(e) ** 2).sum(axis=-1) if vec else np.abs(e) ** 2
    bad = np.argwhere(inten <= ZERO_INTENSITY)
    if bad.size:
        raise ZeroIntensityRegion(bad)
    # periodic central difference in phi
    d_phi = (np.roll(e, -1, axis=1) - np.roll(e, 1, axis=1)) / (2.0 * geometry.dphi)
    if geometry.n_r > 1:
        edge = 2 if geometry.n_r > 2 else 1
        d_r = np.gradient(e, geometry.dr, axis=0, edge_order=edge)
    else:
        d_r = np.zeros_like(e)
    prod_phi = np.conj(e) * d_phi
    prod_r = np.conj(e) * d_r
    if vec:
        prod_phi = prod_phi.sum(axis=-1)
        prod_r = prod_r.sum(axis=-1)
    k_r = prod_r.imag / inten
    k_phi = prod_phi.imag / (geometry.r[:, None] * inten)
    return k_r, k_phi


def kdelta_map(f: FieldGrid, component: str | None = None) -> KDeltaMap:
    """dδ = Im(E*.dE)/|E|^2 by central differences.

    With `component` = 'L' or 'R' the map of that circular channel alone is
    returned; by default the full vector field is used.
    """
    data = f.e if component is None else f.component(component)
    k_r, k_phi = _phase_gradient(np.asarray(data), f.geometry)
    return KDeltaMap(k_r, k_phi, f.geometry)


# ---- import / export ---------------------------------------------------------

CSV_HEADER = ["r", "phi", "re_ex", "im_ex", "re_ey", "im_ey"]


def write_csv(f: FieldGrid, path) -> Path:
    path = Path(path)
    rr, pp = f.geometry.mesh()
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for row in zip(rr.ravel(), pp.ravel(), f.ex.real.ravel(), f.ex.imag.ravel(), f.ey.real.ravel(), f.ey.imag.ravel()):
            w.writerow([repr(float(x)) for x in row])
    return path


def read_csv(path, wavelength: float = 1.0) -> FieldGrid:
    """Read a field written by `write_csv`; geometry is inferred from the
    r and phi columns (rows ordered radius-major)."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        data = np.array([[float(x) for x in row] for row in reader if row])
    r = np.unique(data[:, 0])
    n_r = len(r)
    n_phi = len(data) // n_r
    if n_r * n_phi != len(data):
        raise BadGeometry("CSV rows do not form a complete polar grid")
    geometry = GridGeometry(n_r=n_r, n_phi=n_phi, r_min=float(r[0]), r_max=float(r[-1]), wavelength=wavelength)
    e = np.empty((n_r, n_phi, 2), dtype=complex)
    e[..., 0] = (data[:, 2] + 1j * data[:, 3]).reshape(n_r, n_phi)
    e[..., 1] = (data[:, 4] + 1j * data[:, 5]).reshape(n_r, n_phi)
    return FieldGrid(geometry, e)


def field_to_dict(f: FieldGrid, metadata: dict | None = None) -> dict:
    return {
        "format": "gpoptics.fieldgrid",
        "schema_version": FIELD_SCHEMA_VERSION,
        "geometry": f.geometry.as_dict(),
        "metadata": metadata or {},
        "data": {
            "re_ex": f.ex.real.tolist(),
            "im_ex": f.ex.imag.tolist(),
            "re_ey": f.ey.real.tolist(),
            "im_ey": f.ey.imag.tolist(),
        },
    }


def field_from_dict(doc: dict) -> FieldGrid:
    if doc.get("format") != "gpoptics.fieldgrid":
        raise ValueError("not a gpoptics field document")
    if doc.get("schema_version") != FIELD_SCHEMA_VERSION:
        raise ValueError(f"unsupported field schema_version {doc.get('schema_version')!r}")
    geometry = GridGeometry(**doc["geometry"])
    d = doc["data"]
    e = np.stack(
        [np.array(d["re_ex"]) + 1j * np.array(d["im_ex"]), np.array(d["re_ey"]) + 1j * np.array(d["im_ey"])],
        axis=-1,
    )
    return FieldGrid(geometry, e)


def write_json(f: FieldGrid, path, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(field_to_dict(f, metadata)))
    return path


def read_json(path) -> FieldGrid:
    return field_from_dict(json.loads(Path(path).read_text()))
