"""
Files and the command line
==========================

Write a symbol to disk, quantize it with the ``qharmonic`` command and read
the operator back.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

import qharmonic as qh
from qharmonic.cli import run

grid = qh.PhaseGrid(256, 8.0)
work = Path(tempfile.mkdtemp())

proj = qh.build_symbol(grid, {"kind": "gaussian", "amplitude": 2.0, "width": 2**-0.5})
qh.io.write_symbol(work / "proj.qhagrid", proj)

# %%
# Same as: qharmonic quantize proj.qhagrid proj.qhaop
print("exit:", run(["quantize", str(work / "proj.qhagrid"), str(work / "proj.qhaop")]))
op = qh.io.read_operator(work / "proj.qhaop")
print("bit-exact:", np.array_equal(op.kernel, qh.weyl_quantize(proj).kernel))

# %%
run(["schatten", str(work / "proj.qhaop"), "--p", "1,2,inf", "--out", str(work / "norms.json")])
print(json.loads((work / "norms.json").read_text())["norms"])

# %%
# A small verification batch with its ratio table.
code = run(["verify", "--omega", "disc:2", "--p", "2,inf", "--samples", "4", "--N", "128",
            "--L", "8", "--out", str(work / "v.json"), "--csv", str(work / "v.csv")])
print("verify exit:", code)
print((work / "v.csv").read_text().splitlines()[:3])
