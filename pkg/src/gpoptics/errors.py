"""Exception hierarchy.

Every error raised on purpose by the package derives from `GPOpticsError`,
which lets the CLI separate expected failures from internal bugs.
"""


class GPOpticsError(Exception):
    pass


class ZeroIntensity(GPOpticsError, ValueError):
    pass


class OrthogonalStates(GPOpticsError, ValueError):
    pass


class DegeneratePath(GPOpticsError, ValueError):
    pass


class OpenPath(GPOpticsError, ValueError):
    pass


class FrameMismatch(GPOpticsError, ValueError):
    pass


class AntipodalPoints(GPOpticsError, ValueError):
    pass


class BadGeometry(GPOpticsError, ValueError):
    pass


class BadEps(GPOpticsError, ValueError):
    pass


class ZeroIntensityRegion(GPOpticsError, ValueError):
    """Raised when the phase-gradient map hits samples with no intensity."""

    def __init__(self, indices):
        self.indices = [tuple(int(i) for i in idx) for idx in indices]
        shown = ", ".join(map(str, self.indices[:10]))
        more = "" if len(self.indices) <= 10 else f" (+{len(self.indices) - 10} more)"
        super().__init__(f"zero intensity at samples (i_r, i_phi): {shown}{more}")


class EmptyComponent(GPOpticsError, ValueError):
    pass


class Undersampled(GPOpticsError, ValueError):
    pass


class NearZeroAmplitude(GPOpticsError, ValueError):
    pass


class ZeroPower(GPOpticsError, ValueError):
    pass


class GeometryMismatch(GPOpticsError, ValueError):
    pass


class AmbiguousPattern(GPOpticsError, ValueError):
    pass


class ConfigError(GPOpticsError, ValueError):
    pass
