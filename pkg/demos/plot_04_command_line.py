"""
The command-line pipeline
=========================

Every stage writes files that the next one reads, plus a resolved config
next to its output. Here the stages run in-process through ``main``; from
a shell the same arguments follow ``lindblad-learn``.
"""

import json
import tempfile
from pathlib import Path

from lindblad_learn.cli import main

work = Path(tempfile.mkdtemp(prefix="lindblad_demo_"))
tiny = work / "tiny.json"
tiny.write_text(json.dumps({"d_model": 16, "n_heads": 4, "n_layers": 1, "d_ff": 32,
                            "mlp_head": [16], "max_epochs": 20}))

steps = [
    ["simulate", "--model", "jc", "--seed", "2", "--out", str(work / "one")],
    ["generate", "--model", "sq-td", "--n", "60", "--seed", "0", "--out", str(work / "data.jsonl")],
    ["features", "--in", str(work / "data.jsonl"), "--out", str(work / "features.jsonl")],
    ["train", "--features", str(work / "features.jsonl"), "--config", str(tiny),
     "--out-ckpt", str(work / "model.npz")],
    ["eval", "--ckpt", str(work / "model.npz"), "--features", str(work / "features.jsonl"),
     "--report-dir", str(work / "report")],
    ["invert", "--in", str(work / "data.jsonl"), "--method", "t1", "--out", str(work / "inversion.csv")],
]
for argv in steps:
    code = main(argv)
    print(f"lindblad-learn {argv[0]:<8} -> exit {code}")

# %%
# Outputs

print(sorted(p.name for p in work.iterdir()))
print((work / "one" / "trajectory.csv").read_text().splitlines()[0])
print(json.loads((work / "report" / "metrics.json").read_text())["r2"])
print((work / "inversion.csv").read_text().splitlines()[1])
