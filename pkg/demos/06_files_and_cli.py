"""The three binary formats and the command-line surface.

Feature datasets (SLCF), model checkpoints (SLCM), and statistics banks
(SLCS) all round-trip byte-exactly through little-endian f32 layouts, so a
benchmark, a trained model, and its class statistics are each one portable
file. Everything here is also reachable through the `slowalign` CLI.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from slowalign import (
    RunConfig,
    build_stream,
    gen_synthetic,
    load_bank,
    load_dataset,
    load_model,
    make_split,
    run_stream,
    save_bank,
    save_dataset,
    save_model,
)

workdir = Path(tempfile.mkdtemp(prefix="slowalign-demo-"))

# dataset round trip
ds = gen_synthetic(6, 8, 40, 20, separation=8.0, seed=3)
data_path = workdir / "bench.slcf"
save_dataset(ds, data_path)
again = load_dataset(data_path)
print(f"dataset: {again.num_records} records, dim {again.feature_dim}, "
      f"classes {again.classes}")

# run, then persist model + stats
stream = build_stream(ds, make_split(ds.classes, 3, seed=3))
result = run_stream(stream, RunConfig(method="sl_ca_ln", seed=3))
save_model(result.model, workdir / "model.slcm")
save_bank(result.bank, workdir / "stats.slcs")
print("model classes:", load_model(workdir / "model.slcm").classifier.class_ids.tolist())
print("banked classes:", load_bank(workdir / "stats.slcs").class_ids)

# the same pipeline through the CLI: generate, run, re-align a saved model
def cli(*args):
    proc = subprocess.run([sys.executable, "-m", "slowalign.cli", *args],
                          capture_output=True, text=True)
    print(f"$ slowalign {' '.join(args)}\n  -> exit {proc.returncode}")
    return proc

cli("gen-synth", "--classes", "6", "--dim", "8", "--sep", "8",
    "--seed", "3", "--out", str(workdir / "cli.slcf"))
cli("run", "--data", str(workdir / "cli.slcf"), "--method", "sl_ca_ln",
    "--tasks", "3", "--seed", "3", "--output", str(workdir / "report.json"))
report = json.loads((workdir / "report.json").read_text())
print("report keys:", sorted(report))
print("Last-Acc from report:", report["last_acc"])

cli("align-only", "--model", str(workdir / "model.slcm"),
    "--stats", str(workdir / "stats.slcs"), "--out", str(workdir / "aligned.slcm"))
print("aligned model loads:", load_model(workdir / "aligned.slcm").classifier.num_classes, "classes")
