"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Each kernel is timed on the same inputs with both backends (best of
`--repeat` runs) and the outputs are checked for agreement.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import timeit

import numpy as np

from gpoptics import _pykernels
from gpoptics.elements import QPlateSpec, qplate_family
from gpoptics.sphere import TransportedFrame, great_circle, latitude_circle

try:
    from gpoptics import _ckernels
except ImportError:
    _ckernels = None


def _cases():
    rng = np.random.default_rng(0)
    for n in (1024, 16384):
        v = latitude_circle(n, 1.1).vertices
        yield f"fan_solid_angle n={n}", "fan_solid_angle", (v,)
    for n in (1024, 16384):
        p = great_circle(n, normal=np.array([0.0, 0.6, 0.8]))
        eps = TransportedFrame.circular(p.vertices[0], 1).e
        yield f"transport n={n}", "transport", (eps, p.vertices, True)
    for n in (512, 65536):
        theta = np.angle(np.exp(1j * (3 * np.arange(n) * 2 * np.pi / n + 0.01 * rng.normal(size=n))))
        yield f"phase_steps n={n}", "phase_steps", (theta,)
    for n_r, n_phi in ((64, 512), (256, 2048)):
        field = (rng.normal(size=(n_r, n_phi, 2)) + 1j * rng.normal(size=(n_r, n_phi, 2))).astype(complex)
        mats = np.ascontiguousarray(qplate_family(QPlateSpec(0.75))(np.arange(n_phi) * 2 * np.pi / n_phi))
        yield f"apply_family {n_r}x{n_phi}", "apply_family", (field, mats)


def _best(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=loops)) / loops


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a), np.asarray(b), rtol=1e-12, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results to this file")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation` first", file=sys.stderr)
        return 1

    rows = []
    print(f"{'kernel':<28}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}  agree")
    for label, name, inputs in _cases():
        py_fn, c_fn = getattr(_pykernels, name), getattr(_ckernels, name)
        t_py = _best(py_fn, inputs, args.repeat)
        t_c = _best(c_fn, inputs, args.repeat)
        ok = _agree(py_fn(*inputs), c_fn(*inputs))
        rows.append({"kernel": label, "python_s": t_py, "cython_s": t_c, "speedup": t_py / t_c, "agree": bool(ok)})
        print(f"{label:<28}{t_py:>14.3e}{t_c:>14.3e}{t_py / t_c:>9.1f}x  {'yes' if ok else 'NO'}")

    if args.json:
        meta = {"python": platform.python_version(), "numpy": np.__version__, "machine": platform.machine()}
        with open(args.json, "w") as fh:
            json.dump({"meta": meta, "results": rows}, fh, indent=2)
    return 0 if all(r["agree"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
