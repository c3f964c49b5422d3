# coding: utf-8

# # Using the command-line tool
#
# Everything above is also reachable from the shell via ``tvlam``.  This
# script writes a small image and drives the subcommands through ``main``.

import json
import tempfile
from pathlib import Path

import numpy as np

from tvlam.cli import main
from tvlam.formats import write_csv

work = Path(tempfile.mkdtemp())
rng = np.random.default_rng(3)
write_csv(work / "img.csv", rng.standard_normal((16, 16)))


# Threshold (bound, then exact).  JSON goes to stdout.

main(["lambda", str(work / "img.csv"), "--no-timing"])
main(["lambda", str(work / "img.csv"), "--exact", "--no-timing"])


# Denoise at half the bound and save the trace to a file.

code = main(["denoise", str(work / "img.csv"), "--lambda-rel", "0.5",
             "-o", str(work / "out.csv"), "--trace", str(work / "trace.json"), "--no-timing"])
print("exit code", code, json.loads((work / "trace.json").read_text())["iterations"], "iterations")


# Pseudo-inverse kernels for an 8x8 grid, one CSV per direction.

main(["kernels", "--shape", "8x8", "-o", str(work / "k")])
print(sorted(p.name for p in work.iterdir()))
