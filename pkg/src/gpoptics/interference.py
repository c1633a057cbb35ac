"""Interference read-out of topological charge.

A field is superposed with a reference beam and the copolarized intensity
recorded. `charge_from_pattern` recovers the charge from an untilted
reference with wavefront curvature (spiral fringes); `fork_charge` does so
from a tilted reference (forked fringes) by carrier demodulation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .am import loop_winding
from .errors import AmbiguousPattern, GeometryMismatch
from .field import BeamSpec, FieldGrid, GridGeometry, synthesize_beam

__all__ = [
    "IntensityPattern",
    "ReferenceInfo",
    "superpose",
    "charge_from_pattern",
    "fork_charge",
    "rasterize",
    "write_pgm",
    "write_pattern_csv",
]


@dataclass(frozen=True)
class ReferenceInfo:
    charge: int = 0
    relative_phase: float = 0.0
    tilt: float = 0.0
    curvature: float = 0.0

    def as_dict(self):
        return {
            "charge": self.charge,
            "relative_phase": self.relative_phase,
            "tilt": self.tilt,
            "curvature": self.curvature,
        }


@dataclass(frozen=True, eq=False)
class IntensityPattern:
    geometry: GridGeometry
    values: np.ndarray
    reference: ReferenceInfo = dc_field(default_factory=ReferenceInfo)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.geometry.n_r, self.geometry.n_phi):
            raise GeometryMismatch("pattern shape does not match geometry")
        if np.any(v < 0):
            raise ValueError("intensities must be non-negative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def reference_field(reference: BeamSpec, geometry: GridGeometry, relative_phase=0.0, tilt=0.0, curvature=0.0) -> FieldGrid:
    """Reference beam with phase exp(i(psi + 2 pi tilt x / (2 r_max) + curvature r^2))."""
    base = synthesize_beam(reference, geometry)
    rr, pp = geometry.mesh()
    x = rr * np.cos(pp)
    phase = relative_phase + 2 * np.pi * tilt * x / (2 * geometry.r_max) + curvature * rr**2
    return FieldGrid(geometry, base.e * np.exp(1j * phase)[..., None])


def superpose(
    f: FieldGrid,
    reference: BeamSpec,
    relative_phase: float = 0.0,
    tilt: float = 0.0,
    curvature: float = 0.0,
) -> IntensityPattern:
    """Copolarized intensity |p^dagger (E_f + E_ref)|^2, p the unit reference
    polarization. `tilt` is in fringe cycles across the aperture diameter,
    `curvature` in radians per unit r^2."""
    g = f.geometry
    ref = reference_field(reference, g, relative_phase, tilt, curvature)
    p = reference.polarization_vector()
    p = p / np.linalg.norm(p)
    proj = (f.e + ref.e) @ p.conj()
    info = ReferenceInfo(int(reference.charge), float(relative_phase), float(tilt), float(curvature))
    return IntensityPattern(g, np.abs(proj) ** 2, info)


def _fringe_coefficients(trace):
    c = np.fft.rfft(trace) / len(trace)
    return c


def charge_from_pattern(p: IntensityPattern, reference: ReferenceInfo | None = None) -> int:
    """Signed charge of a single centred vortex read from spiral fringes.

    The fringe order |l - l_ref| is the dominant azimuthal frequency of the
    intensity on the mid-radius circle. Its sign follows from the sense in
    which the fringes turn between two nearby radii, which needs a
    reference with nonzero wavefront curvature.
    """
    ref = p.reference if reference is None else reference
    g = p.geometry
    mid = g.mid_index()
    c = _fringe_coefficients(p.values[mid])
    mag = np.abs(c[1:])
    dc = abs(c[0])
    if mag.size == 0 or mag.max() <= 1e-9 * max(dc, 1e-300):
        return int(ref.charge)
    order = np.argsort(mag)[::-1]
    k = int(order[0]) + 1
    if mag.size > 1 and mag[order[1]] * 2.0 >= mag[order[0]]:
        raise AmbiguousPattern(
            f"no single dominant fringe frequency (bins {k} and {int(order[1]) + 1} are comparable)"
        )
    if ref.curvature == 0.0:
        raise AmbiguousPattern("fringe handedness needs a reference with wavefront curvature")
    # probe radii close enough that the fringes turn by less than pi/2
    r = g.r
    span = np.pi / (4.0 * abs(ref.curvature) * max(r[mid], 1e-12))
    di = int(np.clip(np.floor(span / (2.0 * g.dr)), 1, max(1, min(mid, g.n_r - 1 - mid))))
    i1, i2 = mid - di, mid + di
    if i1 < 0 or i2 >= g.n_r or i1 == i2:
        raise AmbiguousPattern("grid too coarse to compare fringe positions at two radii")
    c1 = _fringe_coefficients(p.values[i1])[k]
    c2 = _fringe_coefficients(p.values[i2])[k]
    turn = np.angle(c2 * np.conj(c1))
    if abs(turn) < 1e-12:
        raise AmbiguousPattern("fringes do not turn with radius")
    sign = -int(np.sign(turn * ref.curvature))
    return int(ref.charge) + sign * k


def rasterize(p: IntensityPattern, size: int | None = None, values=None) -> np.ndarray:
    """Bilinear resampling of polar samples onto a size x size Cartesian
    grid spanning [-r_max, r_max]^2 (rows run from +y to -y). Pixels
    outside r_max are 0; the central hole takes the r_min ring values."""
    g = p.geometry
    data = p.values if values is None else values
    size = size or 2 * g.n_r + 1
    axis = np.linspace(-g.r_max, g.r_max, size)
    xx, yy = np.meshgrid(axis, axis[::-1])
    rr = np.hypot(xx, yy)
    pp = np.mod(np.arctan2(yy, xx), 2 * np.pi)
    fr = np.clip((rr - g.r_min) / g.dr, 0, g.n_r - 1) if g.n_r > 1 else np.zeros_like(rr)
    i0 = np.minimum(np.floor(fr).astype(int), max(g.n_r - 2, 0))
    i1 = np.minimum(i0 + 1, g.n_r - 1)
    tr = fr - i0
    fp = pp / g.dphi
    j0 = np.floor(fp).astype(int) % g.n_phi
    j1 = (j0 + 1) % g.n_phi
    tp = fp - np.floor(fp)
    out = (
        (1 - tr) * (1 - tp) * data[i0, j0]
        + (1 - tr) * tp * data[i0, j1]
        + tr * (1 - tp) * data[i1, j0]
        + tr * tp * data[i1, j1]
    )
    out = np.where(rr <= g.r_max, out, 0.0)
    return out


def fork_charge(p: IntensityPattern, reference: ReferenceInfo | None = None, size: int = 256) -> int:
    """Charge from a forked-fringe pattern (tilted reference).

    Isolates the fringe carrier sideband in the 2-D spectrum, shifts it to
    zero frequency and counts the phase winding of the demodulated signal
    around the mid-radius circle. The carrier must sit well clear of the
    vortex bandwidth: on the default grid about 20 or more fringe cycles
    across the aperture for |l| <= 6.
    """
    ref = p.reference if reference is None else reference
    if ref.tilt == 0:
        raise AmbiguousPattern("fork analysis needs a tilted reference")
    g = p.geometry
    img = rasterize(p, size)
    axis = np.linspace(-g.r_max, g.r_max, size)
    dx = axis[1] - axis[0]
    spec = np.fft.fftshift(np.fft.fft2(img - img.mean()))
    fx = np.fft.fftshift(np.fft.fftfreq(size, d=dx))
    fy = fx[::-1]  # rows run from +y to -y
    carrier = ref.tilt / (2 * g.r_max)
    # the cross term E_f conj(E_ref) sits at -carrier along x
    fxx, fyy = np.meshgrid(fx, fy)
    radius = 0.5 * abs(carrier)
    mask = np.hypot(fxx + carrier, fyy) < radius
    side = np.fft.ifft2(np.fft.ifftshift(spec * mask))
    xx, yy = np.meshgrid(axis, axis[::-1])
    demod = side * np.exp(2j * np.pi * carrier * xx)
    # sample the demodulated field on a circle, nearest pixel
    r_probe = 0.5 * (g.r_min + g.r_max) * 0.6
    t = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    col = np.clip(np.rint((r_probe * np.cos(t) + g.r_max) / dx).astype(int), 0, size - 1)
    row = np.clip(np.rint((g.r_max - r_probe * np.sin(t)) / dx).astype(int), 0, size - 1)
    w, _ = loop_winding(demod[row, col], branch_cut=False)
    return int(ref.charge) + int(round(w))


def write_pgm(p: IntensityPattern, path, bits: int = 8, plain: bool = False, size: int | None = None) -> tuple[Path, Path]:
    """Write the rasterized pattern as PGM plus a sidecar JSON recording the
    max-value normalization. Returns (pgm_path, sidecar_path)."""
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    path = Path(path)
    img = rasterize(p, size)
    maxval = 255 if bits == 8 else 65535
    scale = float(img.max())
    q = np.zeros(img.shape, dtype=np.int64) if scale <= 0 else np.rint(img / scale * maxval).astype(np.int64)
    h, w = q.shape
    if plain:
        lines = [f"P2\n{w} {h}\n{maxval}\n"]
        lines += [" ".join(map(str, row)) + "\n" for row in q]
        path.write_text("".join(lines))
    else:
        dtype = ">u1" if bits == 8 else ">u2"
        with path.open("wb") as fh:
            fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
            fh.write(q.astype(dtype).tobytes())
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "schema": "gpoptics.pgm_sidecar",
                "schema_version": 1,
                "file": path.name,
                "format": "P2" if plain else "P5",
                "bits": bits,
                "maxval": maxval,
                "width": w,
                "height": h,
                "normalization": "max",
                "scale": scale,
                "extent": [-p.geometry.r_max, p.geometry.r_max],
                "reference": p.reference.as_dict(),
            },
            indent=2,
            sort_keys=True,
        )
    )
    return path, sidecar


def read_pgm(path) -> np.ndarray:
    """Read P2 or P5 files written by `write_pgm`."""
    raw = Path(path).read_bytes()
    magic = raw[:2]
    if magic == b"P2":
        tokens = raw.decode("ascii").split()
        w, h, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
        return np.array(tokens[4:], dtype=np.int64).reshape(h, w)
    if magic == b"P5":
        head, rest = raw.split(b"\n", 3)[:3], raw.split(b"\n", 3)[3]
        w, h = map(int, head[1].split())
        maxval = int(head[2])
        dtype = ">u1" if maxval < 256 else ">u2"
        return np.frombuffer(rest, dtype=dtype).reshape(h, w).astype(np.int64)
    raise ValueError("not a PGM file")


def write_pattern_csv(p: IntensityPattern, path) -> Path:
    path = Path(path)
    rr, pp = p.geometry.mesh()
    rows = ["r,phi,intensity"]
    rows += [f"{a!r},{b!r},{c!r}" for a, b, c in zip(rr.ravel().tolist(), pp.ravel().tolist(), p.values.ravel().tolist())]
    path.write_text("\n".join(rows) + "\n")
    return path
