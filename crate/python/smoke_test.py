"""Smoke test for the nu_chord extension module.

Uses an installed ``nu_chord`` if there is one (``maturin develop`` in
crates/python); otherwise builds the extension with cargo and loads it
from a temporary directory.
"""

import importlib
import math
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("nu_chord")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "nu-chord-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = {"darwin": "libnu_chord_py.dylib", "win32": "nu_chord_py.dll"}.get(sys.platform, "libnu_chord_py.so")
    built = ROOT / "target" / "release" / lib
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="nu_chord_"))
    shutil.copy(built, tmp / f"nu_chord{suffix}")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("nu_chord")


def main():
    nc = load()

    p1 = nc.Plant.delay_plant(1.0)
    c = nc.Plant.delay_controller()
    for a in (0.8, 1.2, 1.4):
        d = nc.d_cr(p1, nc.Plant.delay_plant(a)).value
        expect = abs(a - 1) / math.sqrt(2 * (1 + a * a))
        assert abs(d - expect) < 1e-6, (a, d, expect)
        print(f"d_cr(p_1, p_{a}) = {d:.7f}  closed form {expect:.7f}")

    mu = nc.margin(p1, c)
    print(f"1/mu = {1 / mu.value:.6f}")
    assert 3.20 <= 1 / mu.value <= 3.25

    cert = nc.certify(p1, c, nc.Plant.delay_plant(1.2), direct_mu=True)
    print(cert)
    assert cert.stabilized and cert.bound_holds

    circle = nc.Instance("circle")
    q = nc.Plant.rational([1.0], [2.0, -1.0], circle)
    assert nc.d_cr(q, q).value == 0.0

    failed = [name for name, ok, _ in nc.selftest() if not ok]
    assert not failed, failed
    print("smoke test passed")


if __name__ == "__main__":
    main()
