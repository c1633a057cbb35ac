"""Scenario configuration: one JSON document, schema_version 1."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError

SCHEMA_VERSION = 1
SCENARIOS = ("qplate", "eq4-vortex", "focal-model", "rotating-hwp", "custom-path-gp")

OCTANT_PATH = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]

_TOP_KEYS = {
    "schema_version",
    "scenario",
    "q",
    "alpha0",
    "alpha",
    "eps",
    "omega",
    "input_polarization",
    "grid",
    "envelope",
    "reference",
    "samples",
    "periods",
    "path",
    "random_paths",
    "output_dir",
    "seed",
}
_GRID_KEYS = {"n_r", "n_phi", "r_min", "r_max", "wavelength"}
_ENVELOPE_KEYS = {"kind", "waist", "r0", "width"}
_REFERENCE_KEYS = {"curvature", "relative_phase", "tilt"}


@dataclass
class ScenarioConfig:
    scenario: str
    q: float | None = None
    alpha0: float = 0.0
    alpha: float = 0.0
    eps: float = 0.2
    omega: float = 1.0
    input_polarization: str = "L"
    grid: dict = field(default_factory=dict)
    envelope: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)
    samples: int = 256
    periods: int = 1
    path: list = field(default_factory=lambda: [list(v) for v in OCTANT_PATH])
    random_paths: int = 100
    output_dir: str = "gpoptics-out"
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def effective(self) -> dict:
        """Full config with defaults filled, as echoed in reports."""
        return asdict(self)

    def config_hash(self) -> str:
        """Short digest of the effective config (output_dir excluded)."""
        doc = {k: v for k, v in self.effective().items() if k != "output_dir"}
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    @property
    def helicity(self) -> int:
        return 1 if self.input_polarization == "L" else -1


def _number(value, where):
    """Float from a JSON number or a rational literal such as "1/2"."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{where}: expected a number or rational literal like \"1/2\", got {value!r}")


def _integer(value, where, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key {unknown[0]!r}" + (f" (and {unknown[1:]})" if len(unknown) > 1 else ""))


def parse_config(doc: dict) -> ScenarioConfig:
    _check_keys(doc, _TOP_KEYS, "config")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported value {version!r} (expected {SCHEMA_VERSION})")
    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: must be one of {', '.join(SCENARIOS)}; got {scenario!r}")
    cfg = ScenarioConfig(scenario=scenario)

    if "q" in doc and doc["q"] is not None:
        cfg.q = _number(doc["q"], "q")
    elif scenario == "qplate":
        cfg.q = 1.0
    for key in ("alpha0", "alpha", "eps", "omega"):
        if key in doc:
            setattr(cfg, key, _number(doc[key], key))
    if not (0.0 <= cfg.eps < 1.0):
        raise ConfigError(f"eps: must lie in [0, 1), got {cfg.eps!r}")
    if scenario == "rotating-hwp" and cfg.omega == 0.0:
        raise ConfigError("omega: must be nonzero for the rotating-hwp scenario")

    pol = doc.get("input_polarization", "L")
    if pol not in ("L", "R"):
        raise ConfigError(f"input_polarization: must be \"L\" or \"R\", got {pol!r}")
    cfg.input_polarization = pol

    grid = doc.get("grid", {})
    _check_keys(grid, _GRID_KEYS, "grid")
    n_r = _integer(grid.get("n_r", 64), "grid.n_r", 1)
    n_phi = _integer(grid.get("n_phi", 512), "grid.n_phi", 16)
    if n_phi % 2:
        raise ConfigError(f"grid.n_phi: must be even, got {n_phi}")
    r_max = _number(grid.get("r_max", 3.0), "grid.r_max")
    r_min = grid.get("r_min")
    r_min = r_max / (2 * n_r) if r_min is None else _number(r_min, "grid.r_min")
    if not (0.0 < r_min < r_max):
        raise ConfigError(f"grid.r_min: need 0 < r_min < r_max, got r_min={r_min!r}, r_max={r_max!r}")
    wavelength = _number(grid.get("wavelength", 1.0), "grid.wavelength")
    if wavelength <= 0:
        raise ConfigError("grid.wavelength: must be > 0")
    cfg.grid = {"n_r": n_r, "n_phi": n_phi, "r_min": r_min, "r_max": r_max, "wavelength": wavelength}

    env = doc.get("envelope", {})
    _check_keys(env, _ENVELOPE_KEYS, "envelope")
    kind = env.get("kind", "gaussian")
    if kind not in ("gaussian", "ring", "uniform"):
        raise ConfigError(f"envelope.kind: must be gaussian, ring or uniform, got {kind!r}")
    cfg.envelope = {"kind": kind}
    if kind == "gaussian":
        cfg.envelope["waist"] = _number(env.get("waist", 1.0), "envelope.waist")
        if cfg.envelope["waist"] <= 0:
            raise ConfigError("envelope.waist: must be > 0")
    elif kind == "ring":
        cfg.envelope["r0"] = _number(env.get("r0", 1.0), "envelope.r0")
        cfg.envelope["width"] = _number(env.get("width", 0.5), "envelope.width")
        if cfg.envelope["width"] <= 0:
            raise ConfigError("envelope.width: must be > 0")

    ref = doc.get("reference", {})
    _check_keys(ref, _REFERENCE_KEYS, "reference")
    cfg.reference = {
        "curvature": _number(ref.get("curvature", 0.5), "reference.curvature"),
        "relative_phase": _number(ref.get("relative_phase", 0.0), "reference.relative_phase"),
        "tilt": _number(ref.get("tilt", 0.0), "reference.tilt"),
    }

    cfg.samples = _integer(doc.get("samples", 256), "samples", 4)
    cfg.periods = _integer(doc.get("periods", 1), "periods", 1)
    cfg.random_paths = _integer(doc.get("random_paths", 100), "random_paths", 0)
    cfg.seed = _integer(doc.get("seed", 0), "seed", 0)

    if "path" in doc:
        path = doc["path"]
        if not isinstance(path, list) or len(path) < 3:
            raise ConfigError("path: expected a list of at least 3 [x, y, z] vertices")
        vertices = []
        for i, v in enumerate(path):
            if not isinstance(v, list) or len(v) != 3:
                raise ConfigError(f"path[{i}]: expected [x, y, z]")
            vertices.append([_number(c, f"path[{i}]") for c in v])
        cfg.path = vertices

    out = doc.get("output_dir", cfg.output_dir)
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir: expected a non-empty string")
    cfg.output_dir = out
    return cfg


def validate_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror or exc})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        return parse_config(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
