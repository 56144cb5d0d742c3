"""Smoke test for the pyqastate extension.

Build first with
    cargo build -p qastate-py --features extension-module --release
then run
    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import pyqastate

        return pyqastate
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libpyqastate.so", "libpyqastate.dylib", "pyqastate.dll"):
            path = ROOT / "target" / profile / name
            if path.exists():
                loader = importlib.machinery.ExtensionFileLoader("pyqastate", str(path))
                spec = importlib.util.spec_from_loader("pyqastate", loader)
                module = importlib.util.module_from_spec(spec)
                loader.exec_module(module)
                return module
    sys.exit("pyqastate not built; see the module docstring")


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def main():
    q = load()

    up = q.SpinState(0.5, (0, 0, 1), 0.5)
    assert up.to_json() == '{"j":0.5,"dir":[0,0,1],"h":0.5,"amplitudes":[[0,0],[1,0]]}'
    assert q.SpinState.from_json(up.to_json()).amplitudes == up.amplitudes

    s = q.SpinState(1.5, (0.6, 0, 0.8), -0.5)
    t = q.SpinState(1.5, (-0.6, 0, -0.8), 0.5)
    assert s.same_ray(t), "antipodal pair should share a ray"
    assert abs(s.transition_probability(s) - 1) < 1e-12
    o = q.SpinState(1.5, (0.6, 0, 0.8), -0.5, oracle=True)
    assert s.same_ray(o)
    assert len(q.state_catalog(1, [(0, 0, 1), (1, 0, 0)])) == 6

    r = 1 / math.sqrt(2)
    assert close(q.bloch_direction((r, 1j * r)), (0, -1, 0))
    rot = q.su2_to_so3(((-1, 0), (0, -1)))
    assert close([x for row in rot for x in row], [1, 0, 0, 0, 1, 0, 0, 0, 1])

    cg = q.coarse_grain([-1.0, 0.0, 1.0], {0: 1.0, 1: 0.0, 2: 1.0})
    assert cg.classes == [[1], [0, 2]]
    assert not q.is_maximally_accessible(cg.operator)
    assert q.is_maximally_accessible([[1, 0], [0, 2]])

    bad = q.SymmetryModel.bundled("bad_model")
    assert json.loads(bad.check())["verdict"] == "fail"
    good = q.SymmetryModel.bundled("two_variable")
    assert json.loads(good.check())["verdict"] == "pass"
    subjects = [r["subject"] for r in json.loads(good.assumptions())]
    assert subjects[:2] == ["assumption_1", "assumption_2"]
    assert json.loads(good.theorem1())["subject"] == "theorem1"

    assert json.loads(q.verify_spin(2, 20))["verdict"] == "pass"
    assert q.run_suite(0) == q.run_suite(0)

    try:
        q.SpinState(1, (0, 0, 1), 0.5)
    except ValueError as e:
        assert "0.5" in str(e) or "1/2" in str(e)
    else:
        raise AssertionError("half-integer answer for integer spin should fail")

    print("pyqastate smoke test passed")


if __name__ == "__main__":
    main()
