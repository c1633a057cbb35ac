"""Scenario pipelines: synthesize -> apply -> analyze -> interfere.

Each scenario returns a JSON-ready report with a list of named assertions;
the run passes when every assertion does.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .am import am_report, azimuthal_spectrum, holonomy_check, loop_winding, winding_number
from .config import ScenarioConfig
from .conventions import KET_L, KET_R, component_of_helicity, opposite, wrap_phase
from .elements import QPlateSpec, RotatingHWPSpec, qplate_family, retarder_array
from .field import (
    BeamSpec,
    Envelope,
    GridGeometry,
    apply_element_pointwise,
    eq4_vector_vortex,
    focal_field_model,
    kdelta_map,
    synthesize_beam,
    write_csv,
    write_json,
)
from .interference import charge_from_pattern, superpose, write_pattern_csv, write_pgm
from .polarization import (
    CircularAmplitudes,
    from_circular,
    jones_from_poincare,
    pancharatnam_connection,
    poincare_of,
)
from .sphere import (
    SpherePath,
    azimuthal_cycle_solid_angle,
    apply_srp,
    holonomy_phase,
    pancharatnam_triangle_phase,
    path_solid_angle,
    random_geodesic_path,
    srp_phase,
)

REPORT_SCHEMA_VERSION = 1


class Checks:
    """Collects named assertions for a scenario report."""

    def __init__(self):
        self.items = []

    def close(self, name, value, expected, tol, modulo=None):
        value, expected = float(value), float(expected)
        err = value - expected
        if modulo is not None:
            err = math.remainder(err, modulo)
        ok = abs(err) <= tol
        self.items.append(
            {"name": name, "passed": bool(ok), "value": value, "expected": expected, "tolerance": tol, "error": abs(err)}
        )
        return ok

    def at_least(self, name, value, bound):
        ok = float(value) >= bound
        self.items.append({"name": name, "passed": bool(ok), "value": float(value), "minimum": bound})
        return ok

    def true(self, name, ok, detail=None):
        item = {"name": name, "passed": bool(ok)}
        if detail is not None:
            item["detail"] = detail
        self.items.append(item)
        return ok

    @property
    def passed(self):
        return all(i["passed"] for i in self.items)


def _geometry(cfg: ScenarioConfig) -> GridGeometry:
    return GridGeometry(**cfg.grid)


def _envelope(cfg: ScenarioConfig) -> Envelope:
    return Envelope(**cfg.envelope)


def _is_integer(x, tol=1e-12):
    return abs(x - round(x)) <= tol


class _Outputs:
    def __init__(self, out_dir: Path, digest: str):
        self.dir = out_dir
        self.digest = digest
        self.files = {}

    def path(self, key, stem, ext):
        name = f"{stem}_{self.digest}.{ext}"
        self.files[key] = name
        return self.dir / name

    def json(self, key, stem, doc):
        p = self.path(key, stem, "json")
        p.write_text(json.dumps(doc, indent=2, sort_keys=True))


def _write_field(out: _Outputs, f, stem):
    write_csv(f, out.path(f"{stem}_csv", stem, "csv"))
    write_json(f, out.path(f"{stem}_json", stem, "json"))


def _qplate(cfg, out, checks, results):
    g = _geometry(cfg)
    sigma = cfg.helicity
    c_in = component_of_helicity(sigma)
    c_flip = opposite(c_in)
    q = cfg.q
    beam = synthesize_beam(BeamSpec(_envelope(cfg), 0, c_in), g)
    plate = QPlateSpec(q, cfg.alpha0)
    after = apply_element_pointwise(beam, qplate_family(plate))
    expected = 2 * q * sigma
    integral = _is_integer(2 * q)

    spectrum = azimuthal_spectrum(after, c_flip)
    w = winding_number(after, c_flip)
    rep_before, rep_after = am_report(beam), am_report(after)
    hol = holonomy_check(beam, after)

    if integral:
        checks.at_least("flipped-channel power at l = 2q*sigma_in", spectrum.power_at(int(round(expected))), 0.999)
    checks.close("flipped-channel winding = 2q*sigma_in", w, expected, 1e-6 if _is_integer(q) else 1e-2)
    checks.true("charge sign follows input helicity", np.sign(w) == np.sign(expected))
    checks.close("output spin = -input spin", rep_after.spin_per_photon, -rep_before.spin_per_photon, 1e-9)
    # total changes by sigma_in * (2q - 2): zero only at q = 1
    checks.close(
        "delta total AM = sigma_in*(2q - 2)",
        hol.delta_total,
        sigma * (2 * q - 2),
        1e-9 if integral else 1e-2,
    )
    checks.true(
        "flipped-channel dOAM equals geometric-phase charge",
        hol.equivalence_holds,
        {"delta_oam_flipped": hol.delta_oam_flipped, "gp_charge": hol.gp_charge, "tolerance": hol.tolerance},
    )

    ref = cfg.reference
    pattern = superpose(
        after,
        BeamSpec(_envelope(cfg), 0, c_flip),
        relative_phase=ref["relative_phase"],
        tilt=ref["tilt"],
        curvature=ref["curvature"],
    )
    if integral and ref["tilt"] == 0 and ref["curvature"] != 0:
        charge = charge_from_pattern(pattern)
        checks.close("interference read-out charge", charge, round(expected), 0)
        results["pattern_charge"] = charge

    results.update(
        {
            "input_component": c_in,
            "flipped_component": c_flip,
            "winding_flipped": w,
            "expected_charge": expected,
            "spectrum_dominant_l": spectrum.dominant,
            "am_before": rep_before.to_dict(),
            "am_after": rep_after.to_dict(),
            "holonomy": hol.to_dict(),
        }
    )
    if out is not None:
        _write_field(out, after, "field")
        out.json("spectrum", "spectrum", spectrum.to_dict())
        out.json("am_report", "am", rep_after.to_dict())
        out.json("holonomy", "holonomy", hol.to_dict())
        _write_pattern(out, pattern)


def _write_pattern(out, pattern):
    pgm, side = write_pgm(pattern, out.path("pattern_pgm", "pattern", "pgm"))
    out.files["pattern_sidecar"] = side.name
    write_pattern_csv(pattern, out.path("pattern_csv", "pattern", "csv"))


def _eq4(cfg, out, checks, results):
    g = _geometry(cfg)
    alpha = cfg.alpha
    f = eq4_vector_vortex(alpha, g)
    w_l = winding_number(f, "L")
    w_r = winding_number(f, "R")
    checks.close("L-channel winding = +2", w_l, 2.0, 1e-6)
    checks.close("R-channel winding = -2", w_r, -2.0, 1e-6)

    eq2 = from_circular(CircularAmplitudes(np.exp(1j * alpha), np.exp(-1j * alpha)))
    s0 = f.sample(0, 0)
    err = max(abs(s0.ex - eq2.ex), abs(s0.ey - eq2.ey))
    checks.close("phi = 0 sample equals the linear state at alpha", err, 0.0, 1e-9)

    # each sample is the linear state carried through the SRP rotation with
    # solid angle 2*phi
    mid = g.mid_index()
    worst = 0.0
    for j in range(0, g.n_phi, max(1, g.n_phi // 16)):
        omega = azimuthal_cycle_solid_angle(g.phi[j])
        c = apply_srp(CircularAmplitudes(np.exp(1j * alpha), np.exp(-1j * alpha)), omega)
        v = from_circular(c)
        s = f.sample(mid, j)
        worst = max(worst, abs(s.ex - v.ex), abs(s.ey - v.ey))
    checks.close("samples follow the linear solid-angle law", worst, 0.0, 1e-9)
    checks.close("solid angle at phi = 2pi", azimuthal_cycle_solid_angle(2 * np.pi), 4 * np.pi, 0.0)

    k_full = kdelta_map(f)
    checks.close("full-vector k_delta azimuthal component", float(np.max(np.abs(k_full.k_phi))), 0.0, 1e-9)
    k_l = kdelta_map(f, "L")
    rel = float(np.max(np.abs(k_l.k_phi * g.r[:, None] / 2.0 - 1.0)))
    checks.close("L-channel k_phi = 2/r (relative error)", rel, 0.0, 1e-3)
    results.update({"alpha": alpha, "winding_L": w_l, "winding_R": w_r, "phi0_error": err, "kdelta_L_rel_error": rel})
    if out is not None:
        _write_field(out, f, "field")
        out.json("spectrum", "spectrum", {"L": azimuthal_spectrum(f, "L").to_dict(), "R": azimuthal_spectrum(f, "R").to_dict()})
        out.json("am_report", "am", am_report(f).to_dict())


def _focal(cfg, out, checks, results):
    g = _geometry(cfg)
    sigma = cfg.helicity
    c_in = component_of_helicity(sigma)
    c_flip = opposite(c_in)
    eps = cfg.eps
    env = _envelope(cfg)
    before = synthesize_beam(BeamSpec(env, 0, c_in), g)
    after = focal_field_model(sigma, eps, g, env)
    w_opp = winding_number(after, c_flip) if eps > 0 else 0.0
    w_same = winding_number(after, c_in)
    rep = am_report(after)
    hol = holonomy_check(before, after)
    frac = rep.components[c_flip][0]
    if eps > 0:
        checks.close("opposite-spin winding = 2*sigma_in", w_opp, 2 * sigma, 1e-6)
    checks.close("same-spin winding = 0", w_same, 0.0, 1e-6)
    checks.close("opposite-spin power fraction = eps^2", frac, eps**2, 1e-12)
    checks.close("flipped-channel dOAM = gp_charge", hol.delta_oam_flipped - hol.gp_charge, 0.0, 1e-6)
    checks.close("beam dOAM = 2*sigma_in*eps^2", hol.delta_oam, 2 * sigma * eps**2, 1e-9)
    checks.close("delta total AM = 0", hol.delta_total, 0.0, 1e-9)
    results.update(
        {
            "eps": eps,
            "winding_opposite": w_opp,
            "winding_same": w_same,
            "opposite_power_fraction": frac,
            "am_after": rep.to_dict(),
            "holonomy": hol.to_dict(),
        }
    )
    if out is not None:
        _write_field(out, after, "field")
        out.json("am_report", "am", rep.to_dict())
        out.json("holonomy", "holonomy", hol.to_dict())
        if eps > 0:
            out.json("spectrum", "spectrum", azimuthal_spectrum(after, c_flip).to_dict())
            ref = cfg.reference
            pattern = superpose(after, BeamSpec(env, 0, c_flip), ref["relative_phase"], ref["tilt"], ref["curvature"])
            _write_pattern(out, pattern)


def _sideband(series, periods):
    """Fraction of power per DFT bin, indexed by angular-frequency multiple
    of omega."""
    c = np.fft.fft(series)
    p = np.abs(c) ** 2
    p /= p.sum()
    k = np.fft.fftfreq(len(series), d=1.0 / len(series))
    return k / periods, p


def _rotating(cfg, out, checks, results):
    sigma = cfg.helicity
    c_in = component_of_helicity(sigma)
    c_flip = opposite(c_in)
    ket = {"L": KET_L, "R": KET_R}
    omega = cfg.omega
    n = cfg.samples * cfg.periods
    t = np.arange(n) * (2 * np.pi / abs(omega)) * cfg.periods / n
    hwp = RotatingHWPSpec(omega, 0.0)
    m = retarder_array(np.pi, hwp.axis_angle(t))
    amp = ket[c_flip].conj() @ (m @ ket[c_in]).T
    freq, p = _sideband(amp, cfg.periods)
    offset = freq * np.sign(omega)
    target = 2 * sigma
    hit = np.isclose(offset, target)
    share = float(p[hit].sum())
    dom = float(offset[np.argmax(p)])
    checks.at_least("flipped-channel power at offset 2*omega", share, 0.999)
    checks.close("dominant sideband (units of omega)", dom, target, 1e-12)
    results.update(
        {
            "omega": omega,
            "samples": n,
            "sideband_fraction": share,
            "dominant_offset_rad_per_s": dom * abs(omega),
            "expected_offset_rad_per_s": target * omega,
        }
    )
    if cfg.q is not None:
        # q-plate followed by the rotating HWP: handedness flips twice
        g = _geometry(cfg)
        qp = retarder_array(np.pi, QPlateSpec(cfg.q, cfg.alpha0).axis_angle(g.phi))
        after_qp = qp @ ket[c_in]
        ring = np.einsum("tab,jb->tja", m, after_qp) @ ket[c_in].conj()
        w, cut = loop_winding(ring[0])
        expected_w = 2 * cfg.q * sigma
        checks.close("q-plate + HWP azimuthal winding = 2q*sigma_in", w, expected_w, 1e-2 if cut else 1e-6)
        freq2, p2 = _sideband(ring[:, 0], cfg.periods)
        share2 = float(p2[np.isclose(freq2 * np.sign(omega), -target)].sum())
        checks.at_least("q-plate + HWP power at offset -2*omega", share2, 0.999)
        results.update({"composite_winding": w, "composite_sideband_fraction": share2, "composite_branch_cut": cut})
    if out is not None:
        rows = ["t,re,im"] + [f"{a!r},{b.real!r},{b.imag!r}" for a, b in zip(t.tolist(), amp.tolist())]
        out.path("series_csv", "series", "csv").write_text("\n".join(rows) + "\n")
        out.json(
            "spectrum",
            "sideband",
            {"offset_over_omega": offset.tolist(), "power_fraction": p.tolist()},
        )


def _custom_path(cfg, out, checks, results):
    sigma = cfg.helicity
    path = SpherePath(np.array(cfg.path) / np.linalg.norm(cfg.path, axis=1)[:, None])
    omega = path_solid_angle(path)
    srp = srp_phase(omega, sigma)
    trans = holonomy_phase(path, sigma)
    checks.close("transport phase = srp_phase(solid angle) mod 2pi", trans, srp, 1e-9, modulo=2 * np.pi)
    checks.close("|srp phase| = |solid angle|", abs(srp), abs(omega), 1e-12)
    results.update({"solid_angle": omega, "srp_phase": srp, "transport_phase": trans})
    if len(path) == 3:
        a, b, c = path.vertices
        pp = pancharatnam_triangle_phase(a, b, c)
        states = [jones_from_poincare(v) for v in (a, b, c)]
        loop = sum(pancharatnam_connection(states[i], states[(i + 1) % 3]) for i in range(3))
        checks.close("Pancharatnam loop sum = triangle phase mod 2pi", loop, pp, 1e-9, modulo=2 * np.pi)
        checks.close("|PP| = |solid angle|/2", abs(pp), abs(omega) / 2, 1e-12)
        results.update({"pancharatnam_phase": pp, "connection_loop_sum": wrap_phase(loop)})

    rng = np.random.default_rng(cfg.seed)
    worst_srp = 0.0
    for _ in range(cfg.random_paths):
        p = random_geodesic_path(rng, int(rng.integers(3, 7)))
        h = int(rng.choice([-1, 1]))
        err = abs(math.remainder(holonomy_phase(p, h) - srp_phase(path_solid_angle(p), h), 2 * np.pi))
        worst_srp = max(worst_srp, err)
    worst_pp = 0.0
    for _ in range(cfg.random_paths):
        pts = rng.normal(size=(3, 3))
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        states = [jones_from_poincare(v, rng.uniform(-np.pi, np.pi)) for v in pts]
        pts = np.array([poincare_of(s).n for s in states])
        loop = sum(pancharatnam_connection(states[i], states[(i + 1) % 3]) for i in range(3))
        err = abs(math.remainder(loop - pancharatnam_triangle_phase(*pts), 2 * np.pi))
        worst_pp = max(worst_pp, err)
    if cfg.random_paths:
        checks.close("random paths: transport = srp_phase", worst_srp, 0.0, 1e-6)
        checks.close("random triples: loop sum = triangle phase", worst_pp, 0.0, 1e-9)
    results.update({"random_paths": cfg.random_paths, "max_srp_error": worst_srp, "max_pp_error": worst_pp})
    if out is not None:
        out.json("geometry", "geometry", {"vertices": path.vertices.tolist(), **results})


_RUNNERS = {
    "qplate": _qplate,
    "eq4-vortex": _eq4,
    "focal-model": _focal,
    "rotating-hwp": _rotating,
    "custom-path-gp": _custom_path,
}


def run_scenario(cfg: ScenarioConfig, out_dir=None, write=True) -> dict:
    """Execute a scenario, write its artifacts and return the report."""
    digest = cfg.config_hash()
    out = None
    if write:
        d = Path(out_dir if out_dir is not None else cfg.output_dir)
        d.mkdir(parents=True, exist_ok=True)
        out = _Outputs(d, digest)
    checks = Checks()
    results = {}
    _RUNNERS[cfg.scenario](cfg, out, checks, results)
    report = {
        "schema": "gpoptics.scenario_report",
        "schema_version": REPORT_SCHEMA_VERSION,
        "gpoptics_version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "scenario": cfg.scenario,
        "config": cfg.effective(),
        "config_hash": digest,
        "results": results,
        "assertions": checks.items,
        "passed": checks.passed,
        "files": {},
    }
    if out is not None:
        report_name = f"report_{digest}.json"
        report["files"] = dict(sorted(out.files.items()))
        report["files"]["report"] = report_name
        (out.dir / report_name).write_text(dumps_report(report))
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
