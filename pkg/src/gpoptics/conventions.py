"""Handedness and sign conventions shared by every module.

One table, imported everywhere, so that all phases and charges are signed
consistently:

=====================  ===================================
|L>                    (1, i) / sqrt(2)   (x, y components)
|R>                    (1, -i) / sqrt(2)
spin of |L>            +1 hbar per photon
spin of |R>            -1 hbar per photon
Poincare point of |L>  (0, 0, +1)
retarder               R(theta) diag(e^{-i d/2}, e^{+i d/2}) R(-theta)
solid angle sign       positive for counterclockwise circulation
                       seen from outside the sphere
=====================  ===================================
"""

import numpy as np

SQRT2 = np.sqrt(2.0)

KET_L = np.array([1.0, 1.0j]) / SQRT2
KET_R = np.array([1.0, -1.0j]) / SQRT2

#: spin per photon in units of hbar, keyed by circular component label
SPIN = {"L": +1, "R": -1}

COMPONENTS = ("L", "R")

#: intensities at or below this are treated as exactly zero
ZERO_INTENSITY = 1e-300

#: tolerance for "normalized" Jones vectors
NORM_TOL = 1e-12


def component_of_helicity(helicity):
    """Circular component label ('L' or 'R') carrying spin `helicity`."""
    if helicity == 1:
        return "L"
    if helicity == -1:
        return "R"
    raise ValueError(f"helicity must be +1 or -1, got {helicity!r}")


def opposite(component):
    return "R" if component == "L" else "L"


def check_component(component):
    if component not in COMPONENTS:
        raise ValueError(f"component must be 'L' or 'R', got {component!r}")
    return component


def wrap_phase(phase):
    """Map phases into (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped
