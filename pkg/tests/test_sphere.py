import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from gpoptics.errors import AntipodalPoints, DegeneratePath, FrameMismatch, OpenPath
from gpoptics.polarization import (
    LEFT,
    LINEAR_45,
    LINEAR_X,
    CircularAmplitudes,
    from_circular,
    pancharatnam_connection,
    poincare_of,
    to_circular,
)
from gpoptics.sphere import (
    SpherePath,
    TransportedFrame,
    apply_srp,
    azimuthal_cycle_solid_angle,
    great_circle,
    holonomy_phase,
    latitude_circle,
    pancharatnam_triangle_phase,
    parallel_transport,
    path_solid_angle,
    random_geodesic_path,
    srp_phase,
)

X, Y, Z = np.eye(3)
OCTANT = SpherePath([Z, X, Y])


def girard_area(v):
    """Area of a counterclockwise simple geodesic polygon from its interior
    angles (independent of the fan/arctangent route)."""
    n = len(v)
    total = 0.0
    for i in range(n):
        p, c, q = v[i - 1], v[i], v[(i + 1) % n]
        t_prev = p - np.dot(p, c) * c
        t_next = q - np.dot(q, c) * c
        ang = math.atan2(np.dot(c, np.cross(t_next, t_prev)), np.dot(t_next, t_prev)) % (2 * np.pi)
        total += ang
    return total - (n - 2) * np.pi


def rotation_oracle(vertices, eps):
    """Compose explicit minimal rotations with scipy."""
    e = np.array(eps, dtype=complex)
    v = list(vertices) + [vertices[0]]
    for a, b in zip(v[:-1], v[1:]):
        axis = np.cross(a, b)
        s = np.linalg.norm(axis)
        if s == 0:
            continue
        ang = math.atan2(s, np.dot(a, b))
        m = Rotation.from_rotvec(axis / s * ang).as_matrix()
        e = m @ e
    return e


def test_octant_and_reverse():
    assert path_solid_angle(OCTANT) == pytest.approx(np.pi / 2, abs=1e-12)
    assert path_solid_angle(OCTANT.reversed()) == pytest.approx(-np.pi / 2, abs=1e-12)


def test_repeated_closing_vertex_dropped():
    assert len(SpherePath([Z, X, Y, Z])) == 3


def test_great_circle_256():
    assert path_solid_angle(great_circle(256)) == pytest.approx(2 * np.pi, abs=1e-6)


def test_tilted_great_circle_reverses():
    p = great_circle(300, normal=np.array([1.0, 2.0, 2.0]) / 3.0)
    a, b = path_solid_angle(p), path_solid_angle(p.reversed())
    assert abs(abs(a) - 2 * np.pi) < 1e-9
    assert a + b == pytest.approx(0.0, abs=1e-9)


def test_open_path_rejected():
    with pytest.raises(OpenPath):
        path_solid_angle(SpherePath([Z, X, Y], closed=False))


def test_antipodal_neighbours_rejected():
    with pytest.raises(DegeneratePath):
        SpherePath([Z, X, -X])


def test_split_octant_additivity():
    m = (X + Y) / np.sqrt(2)
    a = path_solid_angle(SpherePath([Z, X, m]))
    b = path_solid_angle(SpherePath([Z, m, Y]))
    assert a + b == pytest.approx(path_solid_angle(OCTANT), abs=1e-12)


def simple_polygon(rng, n):
    """Star polygon whose angular gaps around its centre stay below pi, so
    every edge stays inside its lune and the polygon is simple."""
    centre = rng.normal(size=3)
    centre /= np.linalg.norm(centre)
    e1 = np.cross(centre, rng.normal(size=3))
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(centre, e1)
    angles = (np.arange(n) + rng.uniform(-0.3, 0.3, n)) * 2 * np.pi / n
    if rng.random() < 0.5:
        angles = angles[::-1]
    radii = rng.uniform(0.1, 1.2, n)
    v = np.cos(radii)[:, None] * centre + np.sin(radii)[:, None] * (
        np.outer(np.cos(angles), e1) + np.outer(np.sin(angles), e2)
    )
    return SpherePath(v)


def test_fan_matches_girard_on_random_polygons(rng):
    for _ in range(100):
        p = simple_polygon(rng, int(rng.integers(3, 9)))
        v = p.vertices
        omega = path_solid_angle(p)
        oracle = girard_area(v) if omega > 0 else -girard_area(v[::-1])
        assert omega == pytest.approx(oracle, abs=1e-9)
        assert omega + path_solid_angle(p.reversed()) == pytest.approx(0.0, abs=1e-9)


def test_double_loop_unwrapped():
    once = path_solid_angle(latitude_circle(64, 1.0))
    twice = path_solid_angle(latitude_circle(64, 1.0, turns=2))
    assert twice == pytest.approx(2 * once, rel=1e-12)


def test_unwrapped_angle_beyond_2pi():
    omega = path_solid_angle(latitude_circle(2048, 1.4, turns=2))
    assert omega > 2 * np.pi
    assert omega == pytest.approx(4 * np.pi * (1 - math.cos(1.4)), rel=1e-5)


def test_southern_cap_sign_follows_mean_direction():
    # circulating about +z below the equator is clockwise seen from -z
    omega = path_solid_angle(latitude_circle(2048, 2.5))
    assert omega == pytest.approx(-2 * np.pi * (1 - math.cos(np.pi - 2.5)), rel=1e-5)


def test_random_paths_reverse_to_zero(rng):
    for _ in range(50):
        p = random_geodesic_path(rng, 7)
        assert path_solid_angle(p) + path_solid_angle(p.reversed()) == pytest.approx(0.0, abs=1e-9)


def test_octant_transport_phase():
    frame = TransportedFrame.circular(Z, +1)
    out = parallel_transport(frame, OCTANT)
    oracle = rotation_oracle(OCTANT.vertices, frame.e)
    np.testing.assert_allclose(out.e, oracle, atol=1e-12)
    np.testing.assert_allclose(out.e, np.exp(-1j * np.pi / 2) * frame.e, atol=1e-12)
    assert holonomy_phase(OCTANT, +1) == pytest.approx(-np.pi / 2, abs=1e-12)


def test_trivial_path_transport():
    frame = TransportedFrame.circular(Z, -1)
    out = parallel_transport(frame, SpherePath([Z, Z, Z]))
    np.testing.assert_allclose(out.e, frame.e, atol=1e-15)


def test_great_circle_transport_linear():
    p = great_circle(1024, normal=X)
    frame = TransportedFrame.linear(p.vertices[0], 0.3)
    out = parallel_transport(frame, p)
    oracle = rotation_oracle(p.vertices, frame.e)
    np.testing.assert_allclose(out.e, oracle, atol=1e-10)
    np.testing.assert_allclose(out.e, frame.e, atol=1e-10)


def test_frame_mismatch():
    with pytest.raises(FrameMismatch):
        parallel_transport(TransportedFrame.circular(X), OCTANT)


def test_transport_preserves_transversality(rng):
    for _ in range(20):
        p = random_geodesic_path(rng, 6)
        out = parallel_transport(TransportedFrame.circular(p.vertices[0], 1), p)
        assert abs(np.dot(out.k, out.e)) < 1e-10
        assert abs(np.linalg.norm(out.e) - 1) < 1e-10


def test_transport_convergence_on_latitude_circle():
    theta = 0.7
    cap = 2 * np.pi * (1 - math.cos(theta))
    errs = []
    for n in (32, 64, 128, 256):
        ph = holonomy_phase(latitude_circle(n, theta), +1)
        errs.append(abs(math.remainder(ph - srp_phase(cap, +1), 2 * np.pi)))
    ratios = [a / b for a, b in zip(errs[:-1], errs[1:])]
    assert all(3.7 < r < 4.3 for r in ratios), ratios


def test_srp_phase_values():
    assert srp_phase(0.0, 1) == 0.0 and srp_phase(0.0, -1) == 0.0
    assert math.remainder(srp_phase(2 * np.pi, 1) - 2 * np.pi, 2 * np.pi) == pytest.approx(0.0, abs=1e-15)
    # equal and opposite for the two helicities
    assert srp_phase(0.7, 1) == -srp_phase(0.7, -1)
    assert srp_phase(np.pi / 2, -1) == pytest.approx(np.pi / 2)


def test_apply_srp_generalizes_linear_state():
    a, omega = 0.4, 1.1
    c = apply_srp(CircularAmplitudes(np.exp(1j * a), np.exp(-1j * a)), omega)
    assert abs(c.a_l - np.exp(1j * (a + omega))) < 1e-15
    assert abs(c.a_r - np.exp(-1j * (a + omega))) < 1e-15


def test_apply_srp_full_turn_identity():
    c = CircularAmplitudes(0.3 - 0.2j, 1.1j)
    c2 = apply_srp(c, 2 * np.pi)
    assert abs(c2.a_l - c.a_l) < 1e-15 and abs(c2.a_r - c.a_r) < 1e-15


def test_apply_srp_rotates_linear_x():
    v = from_circular(apply_srp(to_circular(LINEAR_X), np.pi / 4))
    t = -np.pi / 4
    rot = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]) @ [1, 0]
    np.testing.assert_allclose(np.array(v), rot, atol=1e-15)


def test_apply_srp_matches_transport_of_reversed_loop(rng):
    # SRP rotation by omega == holonomy of a loop with solid angle -omega
    for _ in range(20):
        p = random_geodesic_path(rng, 5)
        omega = path_solid_angle(p)
        c = apply_srp(CircularAmplitudes(1, 0), -omega)
        assert abs(np.angle(c.a_l) - holonomy_phase(p, +1)) < 1e-9


def test_apply_srp_composes(rng):
    c = CircularAmplitudes(0.3 + 0.4j, -0.2j)
    a, b = rng.uniform(-5, 5, 2)
    lhs = apply_srp(c, a + b)
    rhs = apply_srp(apply_srp(c, a), b)
    assert abs(lhs.a_l - rhs.a_l) < 1e-14 and abs(lhs.a_r - rhs.a_r) < 1e-14


def test_triangle_phase_octant_and_orientation():
    assert abs(pancharatnam_triangle_phase(X, Y, Z)) == pytest.approx(np.pi / 4)
    assert pancharatnam_triangle_phase(X, X, Z) == pytest.approx(0.0, abs=1e-15)
    assert pancharatnam_triangle_phase(Z, Y, X) == pytest.approx(-pancharatnam_triangle_phase(X, Y, Z))


def test_triangle_phase_antipodal():
    with pytest.raises(AntipodalPoints):
        pancharatnam_triangle_phase(X, -X, Z)


def test_nontransitivity_witness():
    states = [LINEAR_X, LINEAR_45, LEFT]
    loop = sum(pancharatnam_connection(states[i], states[(i + 1) % 3]) for i in range(3))
    assert abs(loop) > 0.1
    pts = [poincare_of(s) for s in states]
    assert loop == pytest.approx(pancharatnam_triangle_phase(*pts), abs=1e-12)


def test_azimuthal_cycle_solid_angle():
    assert azimuthal_cycle_solid_angle(0.0) == 0.0
    assert azimuthal_cycle_solid_angle(2 * np.pi) == 4 * np.pi
    assert azimuthal_cycle_solid_angle(np.pi / 2) == np.pi
    assert azimuthal_cycle_solid_angle(3 * np.pi) == 6 * np.pi
