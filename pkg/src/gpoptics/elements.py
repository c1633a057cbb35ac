"""Jones matrices: homogeneous retarders, the q-plate and a rotating
half-wave plate.

A q-plate is a half-wave plate whose fast axis sits at q*phi + alpha0;
a rotating HWP is a half-wave plate whose axis sits at omega*t + phase0.
Both go through `retarder_array`, so azimuth and time enter identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polarization import JonesVector

__all__ = [
    "JonesMatrix",
    "RetarderSpec",
    "QPlateSpec",
    "RotatingHWPSpec",
    "retarder_array",
    "retarder_matrix",
    "qplate_matrix_at",
    "qplate_family",
    "rotating_hwp_matrix",
    "apply",
    "IDENTITY",
]


@dataclass(frozen=True, eq=False)
class JonesMatrix:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"Jones matrix must be 2x2, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def __matmul__(self, other):
        if isinstance(other, JonesMatrix):
            return JonesMatrix(self.m @ other.m)
        if isinstance(other, JonesVector):
            return apply(self, other)
        return NotImplemented

    def __array__(self, dtype=None, copy=None):
        return np.array(self.m, dtype=dtype or complex)

    def unitarity_error(self) -> float:
        return float(np.linalg.norm(self.m.conj().T @ self.m - np.eye(2)))

    def __repr__(self):
        return f"JonesMatrix({self.m.tolist()!r})"


IDENTITY = JonesMatrix(np.eye(2))


@dataclass(frozen=True)
class RetarderSpec:
    """Linear retarder: `retardance` (pi for HWP, pi/2 for QWP) with the fast
    axis at `axis_angle` from x."""

    retardance: float
    axis_angle: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.retardance < 2 * np.pi):
            raise ValueError(f"retardance must lie in [0, 2pi), got {self.retardance!r}")


@dataclass(frozen=True)
class QPlateSpec:
    q: float
    alpha0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.q) and np.isfinite(self.alpha0)):
            raise ValueError("q and alpha0 must be finite")

    def axis_angle(self, phi):
        return self.q * np.asarray(phi, dtype=float) + self.alpha0


@dataclass(frozen=True)
class RotatingHWPSpec:
    angular_speed: float
    phase0: float = 0.0

    def axis_angle(self, t):
        return self.angular_speed * np.asarray(t, dtype=float) + self.phase0


def retarder_array(retardance, axis_angle) -> np.ndarray:
    """Stack of retarder matrices R(theta) diag(e^{-i d/2}, e^{i d/2}) R(-theta).

    Broadcasts over `axis_angle`; result shape is angle.shape + (2, 2).
    """
    theta = np.asarray(axis_angle, dtype=float)
    half = 0.5 * float(retardance)
    c2, s2 = np.cos(2 * theta), np.sin(2 * theta)
    ch, sh = np.cos(half), np.sin(half)
    # expanded product; avoids building three matrices per sample
    m = np.empty(theta.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = ch - 1j * sh * c2
    m[..., 0, 1] = -1j * sh * s2
    m[..., 1, 0] = -1j * sh * s2
    m[..., 1, 1] = ch + 1j * sh * c2
    return m


def retarder_matrix(spec: RetarderSpec) -> JonesMatrix:
    return JonesMatrix(retarder_array(spec.retardance, spec.axis_angle))


def qplate_matrix_at(spec: QPlateSpec, phi: float) -> JonesMatrix:
    return JonesMatrix(retarder_array(np.pi, spec.axis_angle(phi)))


def qplate_family(spec: QPlateSpec):
    """phi-array -> (n_phi, 2, 2) matrices; for `apply_element_pointwise`."""

    def family(phi):
        return retarder_array(np.pi, spec.axis_angle(phi))

    family.spec = spec
    return family


def rotating_hwp_matrix(spec: RotatingHWPSpec, t: float) -> JonesMatrix:
    return JonesMatrix(retarder_array(np.pi, spec.axis_angle(t)))


def apply(m: JonesMatrix, v: JonesVector) -> JonesVector:
    out = np.asarray(m.m) @ np.array([v.ex, v.ey])
    return JonesVector(out[0], out[1])
