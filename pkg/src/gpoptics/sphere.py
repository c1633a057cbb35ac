"""Paths on the unit sphere, signed solid angles, parallel transport and
the two geometric phases (spin-redirection and Pancharatnam).

Solid angles are accumulated triangle by triangle and never reduced
modulo 4*pi, so a loop traversed twice reports twice the area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .conventions import wrap_phase
from .errors import AntipodalPoints, DegeneratePath, FrameMismatch, OpenPath
from .polarization import CircularAmplitudes

__all__ = [
    "UnitVector3",
    "SpherePath",
    "TransportedFrame",
    "path_solid_angle",
    "parallel_transport",
    "holonomy_phase",
    "srp_phase",
    "apply_srp",
    "pancharatnam_triangle_phase",
    "azimuthal_cycle_solid_angle",
    "geodesic_triangle_solid_angle",
    "latitude_circle",
    "great_circle",
    "random_geodesic_path",
]

_UNIT_TOL = 1e-12
_ANTIPODAL_MARGIN = 1e-6


def _as_unit(v, tol=_UNIT_TOL) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > tol:
        raise ValueError(f"expected a unit vector, got norm {norm!r}")
    return a


@dataclass(frozen=True)
class UnitVector3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        _as_unit((self.x, self.y, self.z))

    @classmethod
    def normalized(cls, v) -> UnitVector3:
        a = np.asarray(v, dtype=float)
        a = a / np.linalg.norm(a)
        return cls(*map(float, a))

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype or float)


class SpherePath:
    """Ordered vertices on the unit sphere joined by minor geodesic arcs.

    For closed paths the closing arc (last -> first) is implied; a repeated
    final vertex equal to the first is dropped.
    """

    def __init__(self, vertices, closed: bool = True):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or len(v) == 0:
            raise ValueError("vertices must be an (N, 3) array with N >= 1")
        norms = np.linalg.norm(v, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > _UNIT_TOL)
        if bad.size:
            raise ValueError(f"vertex {bad[0]} is not a unit vector (norm {norms[bad[0]]!r})")
        if closed and len(v) > 1 and np.allclose(v[0], v[-1], rtol=0, atol=1e-12):
            v = v[:-1]
        self.vertices = v
        self.vertices.flags.writeable = False
        self.closed = bool(closed)
        self._check_arcs()

    def _check_arcs(self):
        v = self.vertices
        if len(v) < 2:
            return
        nxt = np.roll(v, -1, axis=0) if self.closed else v[1:]
        cur = v if self.closed else v[:-1]
        angles = np.arccos(np.clip(np.einsum("ij,ij->i", cur, nxt), -1.0, 1.0))
        bad = np.flatnonzero(angles >= np.pi - _ANTIPODAL_MARGIN)
        if bad.size:
            i = int(bad[0])
            raise DegeneratePath(
                f"vertices {i} and {(i + 1) % len(v)} are (nearly) antipodal; the geodesic between them is ambiguous"
            )

    def __len__(self):
        return len(self.vertices)

    def reversed(self) -> SpherePath:
        return SpherePath(self.vertices[::-1], closed=self.closed)

    def __repr__(self):
        return f"SpherePath(n={len(self)}, closed={self.closed})"


@dataclass(frozen=True)
class TransportedFrame:
    """Propagation direction `kappa` with transverse complex polarization
    `epsilon` (unit norm) and helicity label +1/-1."""

    kappa: tuple
    epsilon: tuple
    helicity: int = 1

    def __post_init__(self):
        k = _as_unit(self.kappa)
        e = np.asarray(self.epsilon, dtype=complex)
        if e.shape != (3,):
            raise ValueError("epsilon must be a complex 3-vector")
        if abs(np.linalg.norm(e) - 1.0) > 1e-10:
            raise ValueError("epsilon must have unit norm")
        if abs(np.dot(k, e)) > 1e-10:
            raise ValueError("epsilon must be transverse to kappa")
        if self.helicity not in (1, -1):
            raise ValueError("helicity must be +1 or -1")
        object.__setattr__(self, "kappa", tuple(map(float, k)))
        object.__setattr__(self, "epsilon", tuple(map(complex, e)))

    @property
    def k(self) -> np.ndarray:
        return np.array(self.kappa)

    @property
    def e(self) -> np.ndarray:
        return np.array(self.epsilon)

    @staticmethod
    def transverse_basis(kappa):
        """Right-handed (e1, e2) with e1 x e2 = kappa; (x, y) for kappa = +z."""
        k = _as_unit(kappa)
        ref = np.array([0.0, 0.0, 1.0]) if abs(k[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
        if abs(k[2]) >= 0.9:
            # continuous with (x, y) at +z
            e2 = np.cross(k, np.array([1.0, 0.0, 0.0]))
            e2 /= np.linalg.norm(e2)
            e1 = np.cross(e2, k)
        else:
            e1 = np.cross(ref, k)
            e1 /= np.linalg.norm(e1)
            e2 = np.cross(k, e1)
        return e1, e2

    @classmethod
    def circular(cls, kappa, helicity: int = 1) -> TransportedFrame:
        """Circular polarization of the given helicity: (e1 + i h e2)/sqrt(2)."""
        e1, e2 = cls.transverse_basis(kappa)
        eps = (e1 + 1j * helicity * e2) / np.sqrt(2.0)
        return cls(tuple(np.asarray(kappa, dtype=float)), tuple(eps), helicity)

    @classmethod
    def linear(cls, kappa, angle: float = 0.0, helicity: int = 1) -> TransportedFrame:
        e1, e2 = cls.transverse_basis(kappa)
        eps = np.cos(angle) * e1 + np.sin(angle) * e2
        return cls(tuple(np.asarray(kappa, dtype=float)), tuple(eps.astype(complex)), helicity)


def path_solid_angle(p: SpherePath) -> float:
    """Signed, unwrapped solid angle enclosed by a closed path.

    Fan triangulation from the first vertex, each triangle by the
    arctangent form of the spherical excess. Positive for counterclockwise
    circulation seen from outside the sphere.
    """
    if not p.closed:
        raise OpenPath("solid angle requires a closed path")
    if len(p) < 3:
        return 0.0
    omega, bad = _kernels.fan_solid_angle(p.vertices)
    if bad >= 0:
        raise DegeneratePath(f"fan triangle at vertex {bad} is degenerate (antipodal vertices)")
    return float(omega)


def geodesic_triangle_solid_angle(a, b, c) -> float:
    """Signed solid angle of the geodesic triangle (a, b, c)."""
    pts = [np.asarray(x, dtype=float) for x in (a, b, c)]
    for i, j in ((0, 1), (1, 2), (2, 0)):
        if np.dot(pts[i], pts[j]) <= -1.0 + 1e-12:
            raise AntipodalPoints(f"points {i} and {j} are antipodal")
    omega, bad = _kernels.fan_solid_angle(np.array(pts))
    if bad >= 0:
        raise AntipodalPoints("degenerate triangle")
    return float(omega)


def parallel_transport(frame: TransportedFrame, p: SpherePath) -> TransportedFrame:
    """Carry `frame` along `p`, segment by segment, by the minimal rotation
    taking each vertex to the next. Closed paths return to the first vertex."""
    k0 = p.vertices[0]
    if np.linalg.norm(frame.k - k0) > 1e-9:
        raise FrameMismatch("frame.kappa must equal the first vertex of the path")
    eps = _kernels.transport(frame.e, p.vertices, p.closed)
    kappa = p.vertices[0] if p.closed else p.vertices[-1]
    # rotations are exact up to rounding; renormalize so invariants hold at 1e-10
    eps = eps - np.dot(kappa, eps) * kappa
    eps /= np.linalg.norm(eps)
    return TransportedFrame(tuple(kappa), tuple(eps), frame.helicity)


def holonomy_phase(p: SpherePath, helicity: int = 1) -> float:
    """Phase in (-pi, pi] picked up by a circular frame transported around `p`."""
    frame = TransportedFrame.circular(p.vertices[0], helicity)
    out = parallel_transport(frame, p)
    return float(np.angle(np.vdot(frame.e, out.e)))


def srp_phase(omega: float, helicity: int) -> float:
    """Spin-redirection phase of a helicity-`helicity` wave whose direction
    traces a loop of signed solid angle `omega`.

    Equals the holonomy of the transported circular frame, -helicity*omega:
    the two circular states pick up equal and opposite phases. Not wrapped.
    """
    if helicity not in (1, -1):
        raise ValueError("helicity must be +1 or -1")
    return -helicity * float(omega)


def apply_srp(state: CircularAmplitudes, omega: float) -> CircularAmplitudes:
    """Spin-redirection rotation: a_l gains +omega, a_r gains -omega.

    With |L> = (1, i)/sqrt(2) this equals the transport holonomy of a loop
    whose `path_solid_angle` is -omega, and turns linear polarization by
    -omega.
    """
    return CircularAmplitudes(state.a_l * np.exp(1j * omega), state.a_r * np.exp(-1j * omega))


def pancharatnam_triangle_phase(a, b, c) -> float:
    """Geometric phase of the geodesic triangle (a, b, c) on the Poincare sphere.

    Returns half the signed solid angle, which is the loop sum of
    Pancharatnam connections arg<1|2> + arg<2|3> + arg<3|1> of the states
    at a, b, c. A state carried around the loop with in-phase steps comes
    back multiplied by exp(-i * this).
    """
    return 0.5 * geodesic_triangle_solid_angle(a, b, c)


def azimuthal_cycle_solid_angle(phi):
    """Solid angle swept at azimuth phi in the vector-vortex construction:
    grows linearly, 0 at phi = 0 and 4*pi at phi = 2*pi (no wrapping)."""
    if np.ndim(phi) == 0:
        return 2.0 * float(phi)
    return 2.0 * np.asarray(phi, dtype=float)


# ---- path constructors -------------------------------------------------------


def great_circle(n: int, normal=(0.0, 0.0, 1.0)) -> SpherePath:
    """Great circle traversed counterclockwise about `normal`."""
    nrm = _as_unit(normal, tol=1e-9)
    e1, e2 = TransportedFrame.transverse_basis(nrm)
    t = np.arange(n) * (2 * np.pi / n)
    return SpherePath(np.outer(np.cos(t), e1) + np.outer(np.sin(t), e2))


def latitude_circle(n: int, polar_angle: float, turns: int = 1) -> SpherePath:
    """Circle of constant polar angle about +z, sampled at n points per turn."""
    t = np.arange(n * turns) * (2 * np.pi / n)
    st, ct = np.sin(polar_angle), np.cos(polar_angle)
    v = np.column_stack([st * np.cos(t), st * np.sin(t), np.full_like(t, ct)])
    v /= np.linalg.norm(v, axis=1)[:, None]
    return SpherePath(v)


def random_geodesic_path(rng: np.random.Generator, n_vertices: int, spread: float = 1.0) -> SpherePath:
    """Random closed polygon around a random centre; arcs stay below pi/2."""
    centre = rng.normal(size=3)
    centre /= np.linalg.norm(centre)
    e1, e2 = TransportedFrame.transverse_basis(centre)
    angles = np.sort(rng.uniform(0, 2 * np.pi, n_vertices))
    if rng.random() < 0.5:
        angles = angles[::-1]
    radii = rng.uniform(0.1, spread * 0.7, n_vertices)
    v = (
        np.cos(radii)[:, None] * centre
        + np.sin(radii)[:, None] * (np.outer(np.cos(angles), e1) + np.outer(np.sin(angles), e2))
    )
    v /= np.linalg.norm(v, axis=1)[:, None]
    return SpherePath(v)


def wrapped_difference(a: float, b: float) -> float:
    """(a - b) folded into (-pi, pi]."""
    return wrap_phase(a - b)
