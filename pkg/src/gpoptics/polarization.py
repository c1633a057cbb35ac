"""Jones vectors, the circular basis, Stokes/Poincare mapping and the
Pancharatnam connection."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .conventions import NORM_TOL, SQRT2, ZERO_INTENSITY
from .errors import OrthogonalStates, ZeroIntensity

__all__ = [
    "JonesVector",
    "CircularAmplitudes",
    "StokesVector",
    "PoincarePoint",
    "to_circular",
    "from_circular",
    "circular_components",
    "jones_components",
    "stokes_of",
    "poincare_of",
    "pancharatnam_connection",
    "jones_from_poincare",
    "LINEAR_X",
    "LINEAR_Y",
    "LINEAR_45",
    "LEFT",
    "RIGHT",
]


@dataclass(frozen=True)
class JonesVector:
    """Transverse field (ex, ey) at a point."""

    ex: complex
    ey: complex

    def __post_init__(self):
        object.__setattr__(self, "ex", complex(self.ex))
        object.__setattr__(self, "ey", complex(self.ey))

    @classmethod
    def from_array(cls, a) -> JonesVector:
        a = np.asarray(a, dtype=complex)
        if a.shape != (2,):
            raise ValueError(f"expected shape (2,), got {a.shape}")
        return cls(a[0], a[1])

    def __array__(self, dtype=None, copy=None):
        return np.array([self.ex, self.ey], dtype=dtype or complex)

    @property
    def intensity(self) -> float:
        return abs(self.ex) ** 2 + abs(self.ey) ** 2

    @property
    def is_normalized(self) -> bool:
        return abs(self.intensity - 1.0) <= NORM_TOL

    def normalized(self) -> JonesVector:
        if self.intensity <= ZERO_INTENSITY:
            raise ZeroIntensity("cannot normalize a zero field")
        s = 1.0 / np.sqrt(self.intensity)
        return JonesVector(self.ex * s, self.ey * s)

    def scaled(self, c: complex) -> JonesVector:
        return JonesVector(self.ex * c, self.ey * c)

    def vdot(self, other: JonesVector) -> complex:
        """Hermitian inner product self^dagger . other."""
        return self.ex.conjugate() * other.ex + self.ey.conjugate() * other.ey


@dataclass(frozen=True)
class CircularAmplitudes:
    """Coefficients of |L> and |R>."""

    a_l: complex
    a_r: complex

    def __post_init__(self):
        object.__setattr__(self, "a_l", complex(self.a_l))
        object.__setattr__(self, "a_r", complex(self.a_r))


@dataclass(frozen=True)
class StokesVector:
    s0: float
    s1: float
    s2: float
    s3: float

    @property
    def degree_of_polarization(self) -> float:
        if self.s0 == 0:
            return 0.0
        return float(np.sqrt(self.s1**2 + self.s2**2 + self.s3**2) / self.s0)


@dataclass(frozen=True)
class PoincarePoint:
    """Unit vector (s1, s2, s3)/s0 on the Poincare sphere."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"Poincare point must have unit norm, got |n| = {norm!r}")

    @property
    def n(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype or float)


LINEAR_X = JonesVector(1, 0)
LINEAR_Y = JonesVector(0, 1)
LINEAR_45 = JonesVector(1 / SQRT2, 1 / SQRT2)
LEFT = JonesVector(1 / SQRT2, 1j / SQRT2)
RIGHT = JonesVector(1 / SQRT2, -1j / SQRT2)


def circular_components(ex, ey):
    """Array version of `to_circular`: returns (a_l, a_r)."""
    ex = np.asarray(ex, dtype=complex)
    ey = np.asarray(ey, dtype=complex)
    return (ex - 1j * ey) / SQRT2, (ex + 1j * ey) / SQRT2


def jones_components(a_l, a_r):
    """Array version of `from_circular`: returns (ex, ey)."""
    a_l = np.asarray(a_l, dtype=complex)
    a_r = np.asarray(a_r, dtype=complex)
    return (a_l + a_r) / SQRT2, 1j * (a_l - a_r) / SQRT2


def to_circular(v: JonesVector) -> CircularAmplitudes:
    """Decompose `v` as a_l |L> + a_r |R>."""
    s = 1 / SQRT2
    return CircularAmplitudes((v.ex - 1j * v.ey) * s, (v.ex + 1j * v.ey) * s)


def from_circular(c: CircularAmplitudes) -> JonesVector:
    s = 1 / SQRT2
    return JonesVector((c.a_l + c.a_r) * s, 1j * (c.a_l - c.a_r) * s)


def stokes_of(v: JonesVector) -> StokesVector:
    cross = v.ex.conjugate() * v.ey
    return StokesVector(
        s0=abs(v.ex) ** 2 + abs(v.ey) ** 2,
        s1=abs(v.ex) ** 2 - abs(v.ey) ** 2,
        s2=2.0 * cross.real,
        s3=2.0 * cross.imag,
    )


def poincare_of(v: JonesVector) -> PoincarePoint:
    """Map a pure state to the Poincare sphere; |L> sits at the north pole."""
    s = stokes_of(v)
    if s.s0 <= ZERO_INTENSITY:
        raise ZeroIntensity("Poincare point undefined for zero intensity")
    n = np.array([s.s1, s.s2, s.s3]) / s.s0
    # remove rounding drift so the unit-norm invariant holds to 1e-12
    n /= np.linalg.norm(n)
    return PoincarePoint(*map(float, n))


def pancharatnam_connection(e1: JonesVector, e2: JonesVector, eps_orth: float | None = None) -> float:
    """Phase difference arg(e1^dagger . e2) in (-pi, pi].

    Raises OrthogonalStates when |e1^dagger . e2| <= eps_orth, which defaults
    to 1e-9 * sqrt(I1 * I2).
    """
    overlap = e1.vdot(e2)
    if eps_orth is None:
        eps_orth = 1e-9 * np.sqrt(e1.intensity * e2.intensity)
    if abs(overlap) <= eps_orth:
        raise OrthogonalStates("Pancharatnam connection undefined for orthogonal states")
    phase = cmath.phase(overlap)
    # cmath.phase returns [-pi, pi]; fold -pi onto pi
    return np.pi if phase == -np.pi else phase


def jones_from_poincare(n, phase: float = 0.0) -> JonesVector:
    """A unit-intensity state whose Poincare point is `n`.

    Inverse of `poincare_of` up to the global phase, which is fixed so that
    ex is real and non-negative (then multiplied by exp(i*phase)).
    """
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    theta = np.arccos(np.clip(n[0], -1.0, 1.0))
    azim = np.arctan2(n[2], n[1])
    g = np.exp(1j * phase)
    return JonesVector(np.cos(theta / 2) * g, np.sin(theta / 2) * np.exp(1j * azim) * g)
