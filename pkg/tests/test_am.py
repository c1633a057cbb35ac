import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpoptics.am import (
    am_report,
    azimuthal_spectrum,
    holonomy_check,
    input_helicity,
    loop_winding,
    winding_number,
)
from gpoptics.elements import QPlateSpec, qplate_family
from gpoptics.errors import EmptyComponent, GeometryMismatch, NearZeroAmplitude, Undersampled, ZeroPower
from gpoptics.field import (
    BeamSpec,
    Envelope,
    FieldGrid,
    GridGeometry,
    apply_element_pointwise,
    eq4_vector_vortex,
    focal_field_model,
    synthesize_beam,
)

G = GridGeometry(n_r=24, n_phi=512)


def beam(pol="L", l=0, env=None, g=G):
    return synthesize_beam(BeamSpec(env or Envelope("uniform"), l, pol), g)


def plate(f, q, a0=0.0):
    return apply_element_pointwise(f, qplate_family(QPlateSpec(q, a0)))


def cut_dft_powers(nu, n):
    """|c_l|^2 for samples of exp(i nu phi_k), phi_k = 2 pi k / n, by the
    closed-form geometric series."""
    l = np.arange(-n // 2, n // 2)
    d = nu - l
    num = 1 - np.exp(2j * np.pi * d)
    den = 1 - np.exp(1j * d * 2 * np.pi / n)
    on_bin = np.isclose(d, 0)
    c = np.where(on_bin, 1.0, num / (n * np.where(on_bin, 1.0, den)))
    return l, np.abs(c) ** 2


def test_uniform_left_spectrum():
    s = azimuthal_spectrum(beam("L"), "L")
    assert s.powers == {0: pytest.approx(1.0, abs=1e-12)}
    assert s.residual < 1e-20


def test_qplate_one_spectrum():
    s = azimuthal_spectrum(plate(beam("L"), 1.0), "R")
    assert s.power_at(2) >= 0.999
    assert s.dominant == 2


def test_half_integer_q_spectrum_matches_geometric_series():
    for q in (0.5, 0.75, 1.25):
        s = azimuthal_spectrum(plate(beam("L", env=Envelope("gaussian")), q), "R")
        l, p = cut_dft_powers(2 * q, G.n_phi)
        np.testing.assert_array_equal(s.l, l)
        np.testing.assert_allclose(s.p, p, atol=1e-12)
        if (2 * q) % 1:
            assert s.residual > 0


def test_q_three_quarter_split_around_one_and_a_half():
    s = azimuthal_spectrum(plate(beam("L"), 0.75), "R")
    top = sorted(s.powers.items(), key=lambda kv: -kv[1])[:2]
    assert {top[0][0], top[1][0]} == {1, 2}
    assert top[0][1] == pytest.approx(top[1][1], rel=1e-9)


def test_normalization_invariant(rng):
    fields = [
        plate(beam("L", 1, Envelope("gaussian")), 0.75),
        focal_field_model(-1, 0.3, G),
        eq4_vector_vortex(0.2, G),
        plate(beam("R", -3, Envelope("ring")), 1.5, 0.4),
    ]
    for f in fields:
        for c in ("L", "R"):
            try:
                s = azimuthal_spectrum(f, c)
            except EmptyComponent:
                continue
            total = sum(s.powers.values()) + s.residual
            # entries below the listing floor are the only other mass
            hidden = s.p[(np.abs(s.l) <= s.band) & (s.p < 1e-15)].sum()
            assert total + hidden == pytest.approx(1.0, abs=1e-9)


def test_empty_component():
    with pytest.raises(EmptyComponent):
        azimuthal_spectrum(beam("L"), "R")


def test_spectrum_serializes():
    doc = azimuthal_spectrum(plate(beam("L"), 0.75), "R").to_dict()
    assert json.loads(json.dumps(doc))["schema"] == "gpoptics.oam_spectrum"


def test_winding_examples():
    assert winding_number(beam("L", 3), "L") == pytest.approx(3, abs=1e-12)
    f = eq4_vector_vortex(0.0, G)
    assert winding_number(f, "L") == pytest.approx(2, abs=1e-12)
    assert winding_number(f, "R") == pytest.approx(-2, abs=1e-12)
    assert winding_number(plate(beam("L"), 0.75), "R") == pytest.approx(1.5, abs=1e-9)


def test_winding_matches_spectrum_argmax(rng):
    g = GridGeometry(n_r=4, n_phi=256)
    for _ in range(100):
        l = int(rng.integers(-8, 9))
        pol = "L" if rng.random() < 0.5 else "R"
        f = synthesize_beam(BeamSpec(Envelope("gaussian"), l, pol), g)
        w = winding_number(f, pol, 2)
        assert abs(w - l) < 1e-6
        assert azimuthal_spectrum(f, pol).dominant == round(w)


def test_undersampled():
    g = GridGeometry(n_r=4, n_phi=16)
    with pytest.raises(Undersampled):
        winding_number(synthesize_beam(BeamSpec(Envelope("uniform"), 5, "L"), g), "L")


def test_near_zero_amplitude():
    vals = np.exp(1j * np.linspace(0, 2 * np.pi, 64, endpoint=False))
    vals[10] = 0
    with pytest.raises(NearZeroAmplitude):
        loop_winding(vals)


def test_loop_winding_forced_cut():
    phi = np.arange(64) * 2 * np.pi / 64
    w, cut = loop_winding(np.exp(2j * phi), branch_cut=False)
    assert (w, cut) == (pytest.approx(2.0), False)
    w, cut = loop_winding(np.exp(1.5j * phi))
    assert cut and w == pytest.approx(1.5, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(nu=st.floats(-6, 6, allow_nan=False).filter(lambda x: abs(x - round(x)) > 0.05))
def test_fractional_winding_recovered(nu):
    phi = np.arange(512) * 2 * np.pi / 512
    w, cut = loop_winding(np.exp(1j * nu * phi))
    assert cut
    assert w == pytest.approx(nu, abs=1e-9)


def test_am_report_examples():
    r = am_report(beam("L"))
    assert (r.spin_per_photon, r.oam_per_photon, r.total_per_photon) == (1.0, 0.0, 1.0)
    r = am_report(plate(beam("L"), 1.0))
    assert r.spin_per_photon == pytest.approx(-1, abs=1e-12)
    assert r.oam_per_photon == pytest.approx(2, abs=1e-9)
    assert r.total_per_photon == pytest.approx(1, abs=1e-9)
    r = am_report(plate(beam("L"), 2.0))
    assert r.oam_per_photon == pytest.approx(4, abs=1e-9)
    assert r.total_per_photon == pytest.approx(3, abs=1e-9)
    assert r.total_per_photon == r.spin_per_photon + r.oam_per_photon


def test_zero_power():
    with pytest.raises(ZeroPower):
        am_report(FieldGrid(G, np.zeros((G.n_r, G.n_phi, 2))))


def test_report_invariant_under_phase_and_basis_rotation(rng):
    f = focal_field_model(1, 0.35, G, Envelope("gaussian"))
    base = am_report(f)
    for _ in range(5):
        g, b = np.exp(1j * rng.uniform(0, 2 * np.pi)), rng.uniform(0, np.pi)
        rot = np.array([[np.cos(b), -np.sin(b)], [np.sin(b), np.cos(b)]])
        f2 = FieldGrid(G, g * np.einsum("ij,rpj->rpi", rot, f.e))
        r = am_report(f2)
        assert r.total_per_photon == pytest.approx(base.total_per_photon, abs=1e-12)
        assert r.spin_per_photon == pytest.approx(base.spin_per_photon, abs=1e-12)


def test_conjugation_negates():
    f = plate(focal_field_model(1, 0.3, G), 0.5, 0.2)
    fc = FieldGrid(G, np.conj(f.e))
    a, b = am_report(f), am_report(fc)
    assert b.spin_per_photon == pytest.approx(-a.spin_per_photon, abs=1e-12)
    assert b.oam_per_photon == pytest.approx(-a.oam_per_photon, abs=1e-9)
    assert winding_number(fc, "L") == pytest.approx(-winding_number(f, "R"), abs=1e-9)


@pytest.mark.parametrize("q", [0.5, 1.0, 1.5, 2.0, -1.0])
@pytest.mark.parametrize("pol,l0", [("L", 0), ("R", 0), ("L", 2), ("R", -1)])
def test_hwp_family_flips_spin_and_shifts_oam(q, pol, l0):
    f = beam(pol, l0, Envelope("gaussian"))
    out = plate(f, q, 0.3)
    a, b = am_report(f), am_report(out)
    assert b.spin_per_photon == -a.spin_per_photon
    sigma = 1 if pol == "L" else -1
    flipped = "R" if pol == "L" else "L"
    assert b.components[flipped][1] - l0 == pytest.approx(2 * q * sigma, abs=1e-9)


def test_holonomy_identical():
    f = beam("L", 1, Envelope("gaussian"))
    h = holonomy_check(f, f)
    assert (h.delta_oam, h.delta_spin, h.delta_total) == (0.0, 0.0, 0.0)
    assert not h.flipped_channel_present


@pytest.mark.parametrize("pol,sigma", [("L", 1), ("R", -1)])
def test_holonomy_qplate_one(pol, sigma):
    f = beam(pol)
    h = holonomy_check(f, plate(f, 1.0))
    assert h.delta_oam == pytest.approx(2 * sigma, abs=1e-9)
    assert h.delta_spin == pytest.approx(-2 * sigma, abs=1e-12)
    assert abs(h.delta_total) < 1e-9
    assert h.gp_charge == pytest.approx(2 * sigma, abs=1e-9)
    assert h.equivalence_holds and not h.branch_cut


def test_holonomy_focal():
    eps = 0.2
    before = beam("L", 0, Envelope("gaussian"))
    after = focal_field_model(1, eps, G, Envelope("gaussian"))
    h = holonomy_check(before, after)
    assert h.gp_charge == pytest.approx(2, abs=1e-9)
    assert h.delta_oam_flipped == pytest.approx(2, abs=1e-9)
    assert h.delta_oam == pytest.approx(2 * eps**2, abs=1e-12)
    assert h.delta_spin == pytest.approx(-2 * eps**2, abs=1e-12)
    assert abs(h.delta_total) < 1e-12
    assert h.equivalence_holds


def test_holonomy_nonintegral_q():
    f = beam("L")
    h = holonomy_check(f, plate(f, 0.75))
    assert h.branch_cut and h.tolerance == 1e-2
    assert h.gp_charge == pytest.approx(1.5, abs=1e-9)
    assert h.equivalence_holds
    assert json.loads(json.dumps(h.to_dict()))["equivalence_holds"] is True


def test_holonomy_geometry_mismatch():
    with pytest.raises(GeometryMismatch):
        holonomy_check(beam("L"), beam("L", g=GridGeometry(n_r=8, n_phi=64)))


def test_input_helicity():
    assert input_helicity(beam("L")) == 1
    assert input_helicity(focal_field_model(-1, 0.4, G)) == -1
