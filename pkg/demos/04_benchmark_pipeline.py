#!/usr/bin/env python3
"""End-to-end benchmark at toy scale using the manifest-driven pipeline.

Same steps the CLI runs (gen-dataset, train, eval-*, coverage) but from
Python, with quotas small enough to finish in a few minutes. Pass a JSON
manifest to run your own configuration instead of the toy one.

    python3 demos/04_benchmark_pipeline.py [manifest.json]
"""

import json
import sys

from polarbf import bench

overrides = {
    "channel": {"snr_db": [1.0, 2.0, 3.0]},
    "dataset": {
        "train_failed_per_snr": 800,
        "test_failed_per_snr": 500,
        "block_frames": 512,
    },
    "coverage": {"iterations": 20, "failed_per_snr": 400},
    "train": {"epochs": 3, "batch_size": 64},
    "eval": {"t_max": [3, 6]},
    "seed": 99,
    "paths": {"out_dir": "demo_run"},
}
if len(sys.argv) > 1:
    with open(sys.argv[1]) as fh:
        overrides = json.load(fh)

manifest = bench.merge_manifest(overrides)

print("== dataset generation ==")
bench.run_gen_dataset(manifest)

print("== training ==")
weights_path, log = bench.run_train(manifest)
print(f"weights -> {weights_path}")

print("== evaluation ==")
results, paths = bench.run_eval(manifest)
for p in paths:
    print(f"wrote {p}")

print("== critical-set coverage ==")
rows, cov_path = bench.run_coverage(manifest)
print(f"wrote {cov_path}")

print()
print("BLER by scheme and flip budget:")
for row in results["bler"]:
    budget = "-" if row["scheme"] == "bp" else str(row["t_max"])
    print(
        f"  {row['ebn0_db']:.0f} dB  {row['scheme']:>6} t_max={budget:>2}  "
        f"BLER={row['bler']:.4f}  ({row['block_errors']}/{row['frames']})"
    )

print()
print("mean flip attempts per frame (budget = max eval t_max):")
for row in results["attempts"]:
    if row["t_max"] == max(manifest["eval"]["t_max"]):
        print(f"  {row['ebn0_db']:.0f} dB  {row['scheme']:>6}  {row['mean_attempts']:.3f}")

print()
print("coverage of one-flip-correctable failures by the critical set:")
for row in rows:
    print(f"  {row['ebn0_db']:.0f} dB  {row['coverage_pct']:.2f}%")
