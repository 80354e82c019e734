"""Command-line front end for the benchmark pipeline.

Every subcommand takes the same base flags; a JSON manifest supplies the
full configuration and individual flags override it.  Exit status is 0 on
success, 1 when a selftest check fails, 2 on configuration or I/O errors.
"""

import argparse
import json
import sys

from . import bench


def _parse_float_list(text):
    return [float(part) for part in text.split(",") if part.strip()]


def _parse_int_list(text):
    return [int(part) for part in text.split(",") if part.strip()]


def manifest_from_args(args):
    overrides = {}
    if args.manifest:
        with open(args.manifest) as fh:
            overrides = json.load(fh)
    manifest = bench.merge_manifest(overrides)
    if args.seed is not None:
        manifest["seed"] = args.seed
    if args.snr_list:
        manifest["channel"]["snr_db"] = _parse_float_list(args.snr_list)
    if args.frames_per_snr is not None:
        manifest["dataset"]["train_failed_per_snr"] = args.frames_per_snr
        manifest["dataset"]["test_failed_per_snr"] = args.frames_per_snr
        manifest["coverage"]["failed_per_snr"] = args.frames_per_snr
    if args.tmax:
        manifest["eval"]["t_max"] = _parse_int_list(args.tmax)
    if args.out:
        manifest["paths"]["out_dir"] = args.out
    if args.workers is not None:
        manifest["workers"] = args.workers
    return manifest


def cmd_gen_dataset(args):
    manifest = manifest_from_args(args)
    splits = ("train", "test") if args.split == "all" else (args.split,)
    for split, path, report in bench.run_gen_dataset(manifest, splits):
        print(f"{split}: wrote {path}")
        for row in report:
            print(
                f"  {row['ebn0_db']:g} dB: {row['failed']} failed / "
                f"{row['frames']} frames, {row['correctable']} correctable, "
                f"coverage {row['coverage_pct']:.2f}%"
            )
    return 0


def cmd_train(args):
    manifest = manifest_from_args(args)
    weights_path, log = bench.run_train(manifest)
    print(f"trained {len(log.train_loss)} epochs; wrote {weights_path}")
    print(
        f"best epoch {log.best_epoch + 1} "
        f"(validation loss {log.best_val_loss:.6f})"
    )
    return 0


def _cmd_eval(args, table):
    manifest = manifest_from_args(args)
    results, paths = bench.run_eval(manifest, which=(table,))
    print(f"wrote {paths[table]}")
    for row in results[table][: 8 if table == "accuracy" else None]:
        print("  " + " ".join(f"{k}={bench._fmt(v)}" for k, v in row.items()))
    return 0


def cmd_eval_accuracy(args):
    return _cmd_eval(args, "accuracy")


def cmd_eval_bler(args):
    return _cmd_eval(args, "bler")


def cmd_eval_attempts(args):
    return _cmd_eval(args, "attempts")


def cmd_coverage(args):
    manifest = manifest_from_args(args)
    rows, path = bench.run_coverage(manifest)
    print(f"wrote {path}")
    for row in rows:
        ref = (
            f" (reference {row['reference_pct']:.2f}%, "
            f"{row['delta_pp']:+.2f} pp)"
            if row["reference_pct"] is not None
            else ""
        )
        print(
            f"  {row['ebn0_db']:g} dB: {row['coverage_pct']:.2f}% of "
            f"{row['correctable']} correctable frames{ref}"
        )
    return 0


def cmd_selftest(args):
    _ = manifest_from_args(args)  # validates the manifest file if given
    failures = 0
    for name, ok, detail in bench.selftest_report():
        print(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]")
        failures += not ok
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polarbf",
        description="Polar-code bit-flip decoding benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--manifest", help="JSON manifest; missing keys use defaults")
        cmd.add_argument("--seed", type=int, help="master seed override")
        cmd.add_argument("--snr-list", help="comma-separated Eb/N0 values in dB")
        cmd.add_argument(
            "--frames-per-snr", type=int,
            help="failed-frame quota per SNR point (all splits)",
        )
        cmd.add_argument("--tmax", help="comma-separated flip budgets, e.g. 6,12")
        cmd.add_argument("--out", help="output directory")
        cmd.add_argument("--workers", type=int, help="parallel simulation workers")
        cmd.set_defaults(func=func)
        return cmd

    gen = add("gen-dataset", cmd_gen_dataset, "simulate frames and label CRC failures")
    gen.add_argument(
        "--split", choices=("train", "test", "coverage", "all"), default="all",
        help="which split(s) to generate (default: train and test)",
    )
    add("train", cmd_train, "train the flip predictor on the train split")
    add("eval-accuracy", cmd_eval_accuracy, "cumulative flip-success table")
    add("eval-bler", cmd_eval_bler, "block-error rates for BP, CS-BF, CNN-BF")
    add("eval-attempts", cmd_eval_attempts, "mean re-decode attempts per frame")
    add("coverage", cmd_coverage, "critical-set coverage study")
    add("selftest", cmd_selftest, "independent checks of the core machinery")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
