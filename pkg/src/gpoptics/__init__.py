"""Geometric phases in polarization optics: q-plates, vector vortices,
spin-redirection and Pancharatnam phases, and angular-momentum bookkeeping."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND  # noqa: E402
from .polarization import (  # noqa: E402
    CircularAmplitudes,
    JonesVector,
    PoincarePoint,
    StokesVector,
    from_circular,
    pancharatnam_connection,
    poincare_of,
    stokes_of,
    to_circular,
)
from .sphere import (  # noqa: E402
    SpherePath,
    TransportedFrame,
    UnitVector3,
    apply_srp,
    azimuthal_cycle_solid_angle,
    pancharatnam_triangle_phase,
    parallel_transport,
    path_solid_angle,
    srp_phase,
)
from .elements import (  # noqa: E402
    JonesMatrix,
    QPlateSpec,
    RetarderSpec,
    RotatingHWPSpec,
    apply,
    qplate_family,
    qplate_matrix_at,
    retarder_matrix,
    rotating_hwp_matrix,
)
from .field import (  # noqa: E402
    BeamSpec,
    Envelope,
    FieldGrid,
    GridGeometry,
    apply_element_pointwise,
    eq4_vector_vortex,
    focal_field_model,
    kdelta_map,
    synthesize_beam,
)
from .am import am_report, azimuthal_spectrum, holonomy_check, winding_number  # noqa: E402
from .interference import IntensityPattern, charge_from_pattern, fork_charge, superpose  # noqa: E402
